"""Hierarchical clustering of constraint confidence series.

Distances are 1 - Pearson correlation; clusters are merged with weighted
linkage (WPGMA) and the dendrogram is cut at a distance threshold.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class Merge:
    left: int
    right: int
    height: float
    size: int


@dataclass(frozen=True)
class Dendrogram:
    """Merge records using scipy-style node ids: leaves 0..n-1, merge k is n+k.

    Heights are not guaranteed to be monotone under weighted linkage.
    """

    n_leaves: int
    merges: tuple[Merge, ...]

    def as_linkage(self) -> np.ndarray:
        return np.array([[m.left, m.right, m.height, m.size] for m in self.merges], dtype=float)


@dataclass(frozen=True)
class ClusterAssignment:
    cluster_of: tuple[int, ...]  # row -> cluster id, 1-based
    display_order: tuple[int, ...]

    @property
    def m(self) -> int:
        return max(self.cluster_of, default=0)

    def members(self, cid: int) -> list[int]:
        """Rows of cluster `cid` in display order."""
        return [r for r in self.display_order if self.cluster_of[r] == cid]

    def cluster_ids(self) -> list[int]:
        """Cluster ids in order of first appearance in the display order."""
        seen = []
        for r in self.display_order:
            if self.cluster_of[r] not in seen:
                seen.append(self.cluster_of[r])
        return seen


def correlation_distance(u, v) -> float:
    """1 - Pearson r, in [0, 2].

    Constant series have no defined correlation: two equal constants are at
    distance 0, a constant against anything else at distance 1.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ValueError(f"length mismatch: {u.shape} vs {v.shape}")
    if len(u) < 2:
        raise ValueError("need series of length >= 2")
    du, dv = u - u.mean(), v - v.mean()
    nu, nv = np.sqrt(du @ du), np.sqrt(dv @ dv)
    u_const, v_const = np.ptp(u) == 0, np.ptp(v) == 0
    if u_const or v_const:
        return 0.0 if (u_const and v_const and u[0] == v[0]) else 1.0
    r = float(du @ dv / (nu * nv))
    return min(max(1.0 - r, 0.0), 2.0)


def distance_matrix(values) -> np.ndarray:
    x = np.asarray(values, dtype=float)
    n = x.shape[0]
    if n == 0:
        return np.zeros((0, 0))
    centered = x - x.mean(axis=1, keepdims=True)
    norms = np.sqrt((centered ** 2).sum(axis=1))
    const = np.ptp(x, axis=1) == 0
    safe = np.where(const, 1.0, norms)
    unit = centered / safe[:, None]
    d = np.clip(1.0 - unit @ unit.T, 0.0, 2.0)
    # constant rows: 0 to an equal constant, 1 to anything else
    if const.any():
        ci = np.flatnonzero(const)
        d[ci, :] = 1.0
        d[:, ci] = 1.0
        eq = x[ci, 0][:, None] == x[ci, 0][None, :]
        d[np.ix_(ci, ci)] = np.where(eq, 0.0, 1.0)
    np.fill_diagonal(d, 0.0)
    return d


def weighted_linkage(d) -> Dendrogram:
    """WPGMA: after merging i and j, d(ij, k) = (d(i, k) + d(j, k)) / 2.

    A merged cluster keeps the slot of its lowest row index, and ties are
    broken by the lowest slot pair, which makes the result deterministic.
    """
    d = np.array(d, dtype=float)
    n = d.shape[0]
    if n < 2:
        return Dendrogram(n, ())
    work = d.copy()
    work[np.tril_indices(n)] = np.inf
    node = list(range(n))
    size = [1] * n
    merges = []
    for k in range(n - 1):
        flat = int(np.argmin(work))  # row-major: lowest (i, j) among ties
        i, j = divmod(flat, n)
        h = float(work[i, j])
        a, b = sorted((node[i], node[j]))
        merges.append(Merge(a, b, h, size[i] + size[j]))
        # distances from the merged cluster (slot i) to every other live slot
        di = np.minimum(work[i, :], work[:, i])  # one of the two is inf
        dj = np.minimum(work[j, :], work[:, j])
        new = (di + dj) / 2
        work[i, :i] = np.inf
        work[:i, i] = new[:i]
        work[i, i + 1:] = new[i + 1:]
        work[j, :] = np.inf
        work[:, j] = np.inf
        work[i, i] = np.inf
        node[i] = n + k
        size[i] += size[j]
    return Dendrogram(n, tuple(merges))


def cut_dendrogram(dg: Dendrogram, threshold: float) -> ClusterAssignment:
    """Join rows of every subtree whose merges all lie at height <= threshold.

    Using the subtree maximum keeps the cut well defined when weighted
    linkage produces non-monotone heights. Cluster ids follow decreasing cluster size, ties by lowest member row.
    """
    if threshold < 0:
        raise ValueError("threshold must be >= 0")
    n = dg.n_leaves
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    rep = list(range(n))  # node id -> some leaf
    top = [0.0] * n  # node id -> highest merge in its subtree
    for mg in dg.merges:
        rep.append(rep[mg.left])
        top.append(max(mg.height, top[mg.left], top[mg.right]))
        if top[-1] <= threshold:
            ra, rb = find(rep[mg.left]), find(rep[mg.right])
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, list[int]] = {}
    for r in range(n):
        groups.setdefault(find(r), []).append(r)
    ordered = sorted(groups.values(), key=lambda g: (-len(g), g[0]))
    cluster_of = [0] * n
    for cid, g in enumerate(ordered, start=1):
        for r in g:
            cluster_of[r] = cid
    display = [r for g in ordered for r in g]
    return ClusterAssignment(tuple(cluster_of), tuple(display))


def order_within_cluster(values, ca: ClusterAssignment) -> ClusterAssignment:
    """Sort rows of each cluster by MSE to the cluster mean series.

    Clusters are laid out by decreasing size, ties by lowest member row.
    """
    x = np.asarray(values, dtype=float)
    groups: dict[int, list[int]] = {}
    for r, cid in enumerate(ca.cluster_of):
        groups.setdefault(cid, []).append(r)
    order = []
    for cid, rows in sorted(groups.items(), key=lambda kv: (-len(kv[1]), kv[1][0])):
        sub = x[rows]
        mse = ((sub - sub.mean(axis=0)) ** 2).mean(axis=1)
        order.extend(r for _, r in sorted(zip(mse.tolist(), rows)))
    return ClusterAssignment(ca.cluster_of, tuple(order))


def cluster_series(values, threshold: float = 0.7) -> ClusterAssignment:
    """Correlation distance, weighted linkage, threshold cut, MSE ordering."""
    x = np.asarray(values, dtype=float)
    n = x.shape[0]
    if n == 0:
        return ClusterAssignment((), ())
    if n == 1:
        return ClusterAssignment((1,), (0,))
    ca = cut_dendrogram(weighted_linkage(distance_matrix(x)), threshold)
    return order_within_cluster(x, ca)
