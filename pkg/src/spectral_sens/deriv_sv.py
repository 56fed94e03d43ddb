"""One-sided directional derivatives of singular values.

Singular-value sensitivity is reduced to the Hermitian theory through the
symmetric embedding M(x) = [[0, A(x)], [A(x)*, 0]], whose spectrum is
(sigma_1, ..., sigma_q, 0, ..., 0, -sigma_q, ..., -sigma_1).  Two routes to
the same derivative are provided:

* the embedding path compresses the embedded direction derivative onto the
  cluster columns W2 of the embedding eigenbasis;
* the reduced path works with the stacked sub-blocks U2, V2 of W2 and the
  r x r matrix U2* G V2 + (U2* G V2)*, where G is the direction-weighted
  partial of A itself.

Both must agree; keeping both alive is the package's core cross-check.
Derivatives at (near-)zero singular values are refused: the index
bookkeeping inside the zero block of the embedding is ill-defined.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .cluster import ClusterIndex, default_cluster_tol, locate_cluster
from .deriv_eig import DerivativeReport, _cluster_warnings, unit_direction
from .errors import ConvergenceError, ShapeError, SigmaAtZeroError
from .families import MatrixFamily
from .linalg import (
    ComplexMatrix,
    MatrixLike,
    as_matrix,
    frobenius,
    hermitian_eig,
    hermitian_part,
    trace_hermitian,
)

__all__ = [
    "SingularDecomposition",
    "wielandt_embed",
    "embed_family",
    "sv_decomposition",
    "sv_directional_derivative",
    "sv_derivative_reduced",
    "sv_derivative_pair",
    "sv_cluster_sum_gradient",
    "sigma_floor",
]

#: Derivatives are refused when sigma_k <= SIGMA_FLOOR_FACTOR * ||A(x0)||_F.
SIGMA_FLOOR_FACTOR = 1e-6


def sigma_floor(scale: float) -> float:
    return SIGMA_FLOOR_FACTOR * scale


def wielandt_embed(a: MatrixLike) -> ComplexMatrix:
    """The Hermitian block matrix [[0, A], [A*, 0]] of a rectangular A."""
    mat = as_matrix(a)
    m, n = mat.rows, mat.cols
    out = np.zeros((m + n, m + n), dtype=np.complex128)
    out[:m, m:] = mat.data
    out[m:, :m] = mat.data.conj().T
    return ComplexMatrix(out)


def embed_family(family: MatrixFamily) -> MatrixFamily:
    """Hermitian family of embeddings of a rectangular family."""
    return MatrixFamily(
        param_dim=family.param_dim,
        rows=family.rows + family.cols,
        cols=family.rows + family.cols,
        hermitian=True,
        evaluator=lambda x: wielandt_embed(family.evaluate(x)),
        partials=lambda x, j: wielandt_embed(family.partial(x, j)),
        domain=family.domain,
    )


@dataclass(frozen=True, eq=False)
class SingularDecomposition:
    """Eigendecomposition of the symmetric embedding of a rectangular matrix.

    ``sigma`` holds the q = min(rows, cols) singular values (non-increasing,
    clamped at zero); ``eigenvalues`` is the full embedding spectrum and
    ``w_matrix`` its unitary eigenbasis.  Column j of ``u_block`` /
    ``v_block`` gives the sub-vectors u_j (rows x 1) and v_j (cols x 1) of
    the j-th embedding eigenvector stacked as (u_j; v_j).
    """

    rows: int
    cols: int
    q: int
    sigma: np.ndarray
    eigenvalues: np.ndarray
    w_matrix: ComplexMatrix

    @property
    def u_block(self) -> np.ndarray:
        return self.w_matrix.data[: self.rows, :]

    @property
    def v_block(self) -> np.ndarray:
        return self.w_matrix.data[self.rows :, :]


def sv_decomposition(a: MatrixLike, convergence_tol: float | None = None) -> SingularDecomposition:
    """Singular values of A through the eigendecomposition of its embedding."""
    mat = as_matrix(a)
    m, n = mat.rows, mat.cols
    q = min(m, n)
    emb = wielandt_embed(mat)
    dec = hermitian_eig(emb) if convergence_tol is None else hermitian_eig(emb, convergence_tol)
    vals = dec.eigenvalues
    asym = float(np.max(np.abs(vals + vals[::-1])))
    if asym > 1e-10 * max(frobenius(mat), np.finfo(float).tiny):
        raise ConvergenceError(
            f"embedding spectrum is not symmetric about zero (defect {asym:.3e})", asym
        )
    sigma = np.maximum(vals[:q], 0.0)
    sigma.setflags(write=False)
    return SingularDecomposition(
        rows=m, cols=n, q=q, sigma=sigma, eigenvalues=vals, w_matrix=dec.vectors
    )


class SvPoint(NamedTuple):
    """Shared per-point state for singular-value derivative computations."""

    embedded: MatrixFamily
    sdec: SingularDecomposition
    cluster: ClusterIndex
    w2: np.ndarray
    u2: np.ndarray
    v2: np.ndarray
    warnings: tuple[str, ...]
    cluster_tol: float


def prepare_sv_point(
    family: MatrixFamily,
    x0,
    k: int,
    cluster_tol: float | None = None,
) -> SvPoint:
    """Locate the cluster of sigma_k inside the embedding spectrum at x0.

    Refuses indices whose singular value sits at or near zero, and clusters
    that chain past the strictly positive part of the spectrum.
    """
    a0 = family.evaluate(x0)
    sdec = sv_decomposition(a0)
    if not 1 <= k <= sdec.q:
        raise ShapeError(f"singular value index k={k} out of range 1..{sdec.q}")
    floor = sigma_floor(frobenius(a0))
    if sdec.sigma[k - 1] <= floor:
        raise SigmaAtZeroError(
            f"sigma_at_zero: sigma_{k} = {sdec.sigma[k - 1]:.3e} is within the "
            f"floor {floor:.3e} of zero; derivative selection is undefined there"
        )
    if cluster_tol is None:
        cluster_tol = default_cluster_tol(frobenius(wielandt_embed(a0)))
    c = locate_cluster(sdec.eigenvalues, k, cluster_tol)
    if c.hi > sdec.q:
        raise SigmaAtZeroError(
            f"sigma_at_zero: the cluster of sigma_{k} chains past the strictly "
            f"positive spectrum (upper index {c.hi} > q = {sdec.q})"
        )
    w2 = sdec.w_matrix.data[:, c.lo - 1 : c.hi]
    warnings = _cluster_warnings(sdec.eigenvalues, c)
    return SvPoint(
        embedded=embed_family(family),
        sdec=sdec,
        cluster=c,
        w2=w2,
        u2=w2[: family.rows, :],
        v2=w2[family.rows :, :],
        warnings=warnings,
        cluster_tol=cluster_tol,
    )


def _report(point: SvPoint, d: np.ndarray, f: ComplexMatrix, path: str) -> DerivativeReport:
    mu = hermitian_eig(f).eigenvalues
    c = point.cluster
    return DerivativeReport(
        cluster=c,
        direction=d,
        f_prime=f,
        mu=mu,
        selected_index=c.i,
        derivative=float(mu[c.i - 1]),
        warnings=point.warnings,
        path=path,
    )


def embedding_report(point: SvPoint, x0, d) -> DerivativeReport:
    """Derivative report through the full embedding compression W2* M'(d) W2."""
    d = unit_direction(d, point.embedded.param_dim)
    g = point.embedded.weighted_partial(x0, d)
    f = ComplexMatrix(hermitian_part(point.w2.conj().T @ g.data @ point.w2))
    return _report(point, d, f, "embedding")


def reduced_report(point: SvPoint, family: MatrixFamily, x0, d) -> DerivativeReport:
    """Derivative report through the reduced r x r form U2* G V2 + (U2* G V2)*."""
    d = unit_direction(d, family.param_dim)
    g = family.weighted_partial(x0, d)
    b = point.u2.conj().T @ g.data @ point.v2
    return _report(point, d, ComplexMatrix(b + b.conj().T), "reduced")


def sv_directional_derivative(
    family: MatrixFamily,
    x0,
    k: int,
    d,
    cluster_tol: float | None = None,
) -> DerivativeReport:
    """Derivative of sigma_k(A(x)) at x0 along unit d, embedding path."""
    point = prepare_sv_point(family, x0, k, cluster_tol)
    return embedding_report(point, x0, d)


def sv_derivative_reduced(
    family: MatrixFamily,
    x0,
    k: int,
    d,
    cluster_tol: float | None = None,
) -> DerivativeReport:
    """Derivative of sigma_k(A(x)) at x0 along unit d, reduced path."""
    point = prepare_sv_point(family, x0, k, cluster_tol)
    return reduced_report(point, family, x0, d)


def sv_derivative_pair(
    family: MatrixFamily,
    x0,
    k: int,
    d,
    cluster_tol: float | None = None,
) -> tuple[DerivativeReport, DerivativeReport]:
    """(reduced, embedding) reports sharing one point analysis."""
    point = prepare_sv_point(family, x0, k, cluster_tol)
    return reduced_report(point, family, x0, d), embedding_report(point, x0, d)


def sv_cluster_sum_gradient(
    family: MatrixFamily,
    x0,
    k: int,
    cluster_tol: float | None = None,
) -> np.ndarray:
    """Gradient of the sum of the singular-value cluster containing index k."""
    point = prepare_sv_point(family, x0, k, cluster_tol)
    grad = np.empty(family.param_dim, dtype=np.float64)
    for j in range(family.param_dim):
        dm = point.embedded.partial(x0, j + 1).data
        grad[j] = trace_hermitian(hermitian_part(point.w2.conj().T @ dm @ point.w2))
    return grad
