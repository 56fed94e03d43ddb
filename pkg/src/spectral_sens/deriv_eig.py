"""One-sided directional derivatives of ordered eigenvalues.

For a Hermitian family A(x) and the m-th ordered eigenvalue at x0, the
derivative along a unit direction d is an eigenvalue of the compression

    F'(d) = U2* (sum_j d_j dA/dx_j(x0)) U2,

where the columns of U2 span the eigenspace of the clustered eigenvalue.
With the eigenvalues of F'(d) sorted non-increasingly, the derivative of the
m-th ordered eigenvalue is the i-th of them, i being the within-cluster
position of m.  The sum over the whole cluster is differentiable as a
function of x; its gradient is the per-coordinate trace of the compressed
partials.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cluster import ClusterIndex, cluster_gap_guard, default_cluster_tol, locate_cluster
from .errors import NotHermitianError, ShapeError
from .families import MatrixFamily
from .linalg import (
    ComplexMatrix,
    SpectralDecomposition,
    as_matrix,
    frobenius,
    hermitian_eig,
    hermitian_part,
    trace_hermitian,
)

__all__ = [
    "DerivativeReport",
    "eigvec_block",
    "build_f_prime",
    "eig_directional_derivative",
    "eig_directional_derivatives",
    "cluster_sum_gradient",
]

log = logging.getLogger(__name__)

#: A cluster counts as near-degenerate when its separating gap is within
#: GUARD_FACTOR times the clustering tolerance.
GUARD_FACTOR = 10.0


@dataclass(frozen=True, eq=False)
class DerivativeReport:
    """Outcome of one directional-derivative computation.

    ``mu`` lists the eigenvalues of ``f_prime`` in non-increasing order;
    ``derivative`` is ``mu[selected_index - 1]`` (selected_index is 1-based).
    """

    cluster: ClusterIndex
    direction: np.ndarray
    f_prime: ComplexMatrix
    mu: np.ndarray
    selected_index: int
    derivative: float
    warnings: tuple[str, ...] = ()
    path: str | None = None

    def to_json(self) -> dict:
        payload = {
            "cluster": self.cluster.to_json(),
            "direction": [float(v) for v in self.direction],
            "mu": [float(v) for v in self.mu],
            "selected_index": self.selected_index,
            "derivative": self.derivative,
            "warnings": list(self.warnings),
        }
        if self.path is not None:
            payload["path"] = self.path
        return payload


def unit_direction(d, param_dim: int) -> np.ndarray:
    vec = np.atleast_1d(np.asarray(d, dtype=np.float64))
    if vec.ndim != 1 or vec.size != param_dim:
        raise ShapeError(f"direction must have {param_dim} coordinates, got shape {vec.shape}")
    if abs(float(np.linalg.norm(vec)) - 1.0) > 1e-12:
        raise ValueError("direction must have unit Euclidean norm")
    return vec


def eigvec_block(decomp: SpectralDecomposition, c: ClusterIndex) -> ComplexMatrix:
    """The n x r matrix of eigenvector columns spanning a cluster's eigenspace."""
    if c.hi > decomp.dim:
        raise ShapeError("cluster indices exceed the decomposition dimension")
    return ComplexMatrix(decomp.vectors.data[:, c.lo - 1 : c.hi])


def build_f_prime(
    family: MatrixFamily,
    x0,
    u2,
    d,
    *,
    check_unit: bool = True,
) -> ComplexMatrix:
    """Compression U2* (sum_j d_j dA/dx_j(x0)) U2 of the direction derivative.

    Hermitian whenever the family is.  ``check_unit=False`` skips the unit-norm
    requirement on d (internal linearity checks only).
    """
    if not family.hermitian:
        raise NotHermitianError("F'(d) compression requires a Hermitian family")
    d = np.atleast_1d(np.asarray(d, dtype=np.float64))
    if check_unit:
        d = unit_direction(d, family.param_dim)
    u = as_matrix(u2)
    if u.rows != family.rows:
        raise ShapeError(f"eigenvector block has {u.rows} rows, family is {family.rows}x{family.cols}")
    g = family.weighted_partial(x0, d)
    return ComplexMatrix(hermitian_part(u.data.conj().T @ g.data @ u.data))


def _cluster_warnings(eigenvalues: np.ndarray, c: ClusterIndex) -> tuple[str, ...]:
    notes: list[str] = []
    guard = cluster_gap_guard(eigenvalues, c)
    if guard <= GUARD_FACTOR * c.tol_used:
        notes.append(
            f"near-degenerate cluster at m={c.m}: separating gap {guard:.3e} "
            f"is within {GUARD_FACTOR:g}x the cluster tolerance {c.tol_used:.3e}"
        )
    if c.width > GUARD_FACTOR * c.tol_used:
        notes.append(
            f"chained cluster at m={c.m} spans {c.width:.3e}, wider than "
            f"{GUARD_FACTOR:g}x the cluster tolerance {c.tol_used:.3e}"
        )
    for note in notes:
        log.warning("%s", note)
    return tuple(notes)


def eig_directional_derivatives(
    family: MatrixFamily,
    x0,
    ms: Sequence[int],
    directions,
    cluster_tol: float | None = None,
) -> list[DerivativeReport]:
    """Derivative reports for every (m, direction) pair, m-major order.

    The point decomposition is computed once, and all indices that share a
    cluster reuse a single eigendecomposition of F'(d) per direction.
    """
    if not family.hermitian:
        raise NotHermitianError("eigenvalue derivatives require a Hermitian family")
    if len(ms) == 0:
        raise ShapeError("at least one eigenvalue index m is required")
    dirs = [unit_direction(d, family.param_dim) for d in np.atleast_2d(np.asarray(directions, dtype=np.float64))]
    if not dirs:
        raise ShapeError("at least one direction is required")
    a0 = family.evaluate(x0)
    if cluster_tol is None:
        cluster_tol = default_cluster_tol(frobenius(a0))
    dec = hermitian_eig(a0)
    clusters = {m: locate_cluster(dec.eigenvalues, m, cluster_tol) for m in set(ms)}

    groups: dict[tuple[int, int], list[int]] = {}
    for m, c in clusters.items():
        groups.setdefault((c.lo, c.hi), []).append(m)

    by_pair: dict[tuple[int, int], DerivativeReport] = {}
    for (lo, hi), members in groups.items():
        c_any = clusters[members[0]]
        u2 = eigvec_block(dec, c_any)
        warnings = _cluster_warnings(dec.eigenvalues, c_any)
        for d_idx, d in enumerate(dirs):
            f = build_f_prime(family, x0, u2, d)
            mu = hermitian_eig(f).eigenvalues
            for m in members:
                c = clusters[m]
                by_pair[(m, d_idx)] = DerivativeReport(
                    cluster=c,
                    direction=d,
                    f_prime=f,
                    mu=mu,
                    selected_index=c.i,
                    derivative=float(mu[c.i - 1]),
                    warnings=warnings,
                )
    return [by_pair[(m, d_idx)] for m in ms for d_idx in range(len(dirs))]


def eig_directional_derivative(
    family: MatrixFamily,
    x0,
    m: int,
    d,
    cluster_tol: float | None = None,
) -> DerivativeReport:
    """Derivative of the m-th ordered eigenvalue of A(x) at x0 along unit d."""
    return eig_directional_derivatives(family, x0, [m], [d], cluster_tol)[0]


def cluster_sum_gradient(
    family: MatrixFamily,
    x0,
    m: int,
    cluster_tol: float | None = None,
) -> np.ndarray:
    """Gradient of the sum of the eigenvalue cluster containing index m.

    Component j is trace(U2* dA/dx_j(x0) U2); the sum of the cluster's
    ordered eigenvalues is differentiable near x0 and its directional
    derivative along any unit d equals the dot product of this gradient
    with d (which is also the trace of F'(d)).
    """
    if not family.hermitian:
        raise NotHermitianError("cluster-sum gradients require a Hermitian family")
    a0 = family.evaluate(x0)
    if cluster_tol is None:
        cluster_tol = default_cluster_tol(frobenius(a0))
    dec = hermitian_eig(a0)
    c = locate_cluster(dec.eigenvalues, m, cluster_tol)
    u2 = eigvec_block(dec, c).data
    grad = np.empty(family.param_dim, dtype=np.float64)
    for j in range(family.param_dim):
        compressed = hermitian_part(u2.conj().T @ family.partial(x0, j + 1).data @ u2)
        grad[j] = trace_hermitian(compressed)
    return grad
