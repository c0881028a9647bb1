"""Process drift detection from Declare constraint confidence series."""
from .changepoint import ChangePointConfig, Segmentation, pelt_detect
from .declare import Constraint, Template, confidence, constraint_space, support
from .log_ingest import EventLog, Trace, WindowSpec, parse_csv, parse_xes, read_log
from .pipeline import RunConfig, detect

__all__ = [
    "ChangePointConfig", "Constraint", "EventLog", "RunConfig", "Segmentation", "Template",
    "Trace", "WindowSpec", "confidence", "constraint_space", "detect", "parse_csv", "parse_xes",
    "pelt_detect", "read_log", "support",
]
__version__ = "0.1.0"
