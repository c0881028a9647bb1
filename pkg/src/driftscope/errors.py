class DriftScopeError(Exception):
    """Base class for all analysis errors raised by driftscope."""


class SchemaError(DriftScopeError):
    pass


class LogParseError(DriftScopeError):
    """Raised for unreadable rows, events or malformed documents.

    ``line`` is set for CSV rows, ``offset`` (bytes) for XML documents.
    """

    def __init__(self, message, line=None, offset=None):
        super().__init__(message)
        self.line = line
        self.offset = offset


class EmptyLogError(DriftScopeError):
    pass


class WindowConfigError(DriftScopeError):
    pass
