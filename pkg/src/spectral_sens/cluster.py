"""Multiplicity structure of an ordered eigenvalue at a point.

For the m-th entry of a non-increasing eigenvalue list, the cluster is the
maximal contiguous block of near-equal neighbors around position m.  The
block records how many members sit at or before m (``i``, counting the m-th
itself) and how many after (``j``); ``r = i + j`` is the multiplicity.

Membership is decided by chained adjacent gaps: positions k and k+1 belong
to the same cluster iff values[k] - values[k+1] <= cluster_tol.  Chaining is
order-consistent and transitive on sorted data, which absolute differences
to the m-th value are not.  A chained cluster may end up wider than the
tolerance; the width is reported, not capped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ShapeError

__all__ = ["ClusterIndex", "locate_cluster", "cluster_gap_guard", "default_cluster_tol"]


def default_cluster_tol(scale: float) -> float:
    """Default clustering tolerance for a matrix of Frobenius norm ``scale``."""
    return 1e-8 * max(1.0, scale)


@dataclass(frozen=True, eq=False)
class ClusterIndex:
    """Position bookkeeping for the cluster of the m-th ordered eigenvalue.

    All indices are 1-based.  ``lo = m - i + 1`` and ``hi = m + j`` delimit
    the cluster; ``width`` is the value spread across it (diagnostic only).
    """

    m: int
    i: int
    j: int
    r: int
    value: float
    lo: int
    hi: int
    tol_used: float
    width: float

    def __post_init__(self) -> None:
        if self.i < 1 or self.j < 0 or self.r != self.i + self.j:
            raise ValueError(f"inconsistent cluster indices i={self.i}, j={self.j}, r={self.r}")
        if self.lo != self.m - self.i + 1 or self.hi != self.m + self.j:
            raise ValueError("cluster bounds do not match the (m, i, j) bookkeeping")
        if not 1 <= self.lo <= self.m <= self.hi:
            raise ValueError("cluster bounds must bracket m")

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "i": self.i,
            "j": self.j,
            "r": self.r,
            "value": self.value,
            "tol": self.tol_used,
        }


def _checked_values(eigenvalues) -> np.ndarray:
    vals = np.atleast_1d(np.asarray(eigenvalues, dtype=np.float64))
    if vals.ndim != 1 or vals.size < 1:
        raise ShapeError("eigenvalue list must be a non-empty vector")
    if not np.all(np.isfinite(vals)):
        raise ValueError("eigenvalues must be finite")
    if np.any(np.diff(vals) > 0):
        raise ValueError("eigenvalue list must be non-increasing")
    return vals


def locate_cluster(eigenvalues, m: int, cluster_tol: float) -> ClusterIndex:
    """Cluster of the m-th entry of a non-increasing list (m is 1-based)."""
    vals = _checked_values(eigenvalues)
    n = vals.size
    if not 1 <= m <= n:
        raise ShapeError(f"index m={m} out of range 1..{n}")
    if cluster_tol < 0.0:
        raise ValueError("cluster_tol must be nonnegative")
    lo = m
    while lo > 1 and vals[lo - 2] - vals[lo - 1] <= cluster_tol:
        lo -= 1
    hi = m
    while hi < n and vals[hi - 1] - vals[hi] <= cluster_tol:
        hi += 1
    i = m - lo + 1
    j = hi - m
    return ClusterIndex(
        m=m,
        i=i,
        j=j,
        r=i + j,
        value=float(vals[m - 1]),
        lo=lo,
        hi=hi,
        tol_used=float(cluster_tol),
        width=float(vals[lo - 1] - vals[hi - 1]),
    )


def cluster_gap_guard(eigenvalues, c: ClusterIndex) -> float:
    """Smallest gap separating the cluster from the rest of the spectrum.

    Boundaries that do not exist (cluster touching either end of the list)
    contribute +inf; a positive return certifies separation.
    """
    vals = _checked_values(eigenvalues)
    n = vals.size
    if c.hi > n:
        raise ShapeError("cluster does not fit the eigenvalue list")
    left = vals[c.lo - 2] - vals[c.lo - 1] if c.lo > 1 else math.inf
    right = vals[c.hi - 1] - vals[c.hi] if c.hi < n else math.inf
    return float(min(left, right))
