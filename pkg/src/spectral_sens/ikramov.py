"""Critical-point analysis of the smallest structured-perturbation singular value.

For a fixed square A (n >= 3) and xi in R^4, the block-upper-triangular
perturbation

    Q(xi) = [[A, xi1*I, (xi3 + i*xi4)*I],
             [0, A,     xi2*I          ],
             [0, 0,     A              ]]

defines f(xi) = sigma_{3n-2}(Q(xi)), the (3n-2)-th ordered singular value.
At a candidate local maximizer xi0 with sigma0 = f(xi0) > 0 of multiplicity
mult = p + q (p members at or before position 3n-2, q after), the one-sided
derivatives along d and -d are tied together by the spectrum mu of the
mult x mult compression F'(d):

    f'(xi0, d)  = mu_p(d),        f'(xi0, -d) = -mu_{mult-p+1}(d).

When p <= mult - (p - 1) (the decisive case) a local maximum forces every
directional derivative to vanish; any direction with mu_p(d) clearly
negative therefore refutes the local-max hypothesis.  In the remaining
dubious case no sign conclusion is available and only per-direction data is
reported.  The level function H(xi) = t(xi) - mult*sigma0, built from the
differentiable cluster sum t, supplies the tangent-space identity: the mu
spectrum of F'(d) sums to grad(H) . d.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .deriv_sv import (
    SvPoint,
    embedding_report,
    prepare_sv_point,
    sv_cluster_sum_gradient,
)
from .errors import ShapeError
from .families import MatrixFamily
from .linalg import ComplexMatrix, MatrixLike, as_matrix

__all__ = [
    "CriticalCase",
    "DirectionAnalysis",
    "CriticalPointAnalysis",
    "LevelFunctionReport",
    "build_q",
    "q_family",
    "is_decisive",
    "forward_backward",
    "analyze_direction_pair",
    "classify_critical_point",
    "level_function_report",
    "coarse_maximize",
]

#: Sign tests near zero use CHECK_TOL_FACTOR * max(1, sigma0).
CHECK_TOL_FACTOR = 1e-7


class CriticalCase(enum.Enum):
    DECISIVE = "decisive"
    DUBIOUS = "dubious"


def _square_input(a: MatrixLike) -> ComplexMatrix:
    mat = as_matrix(a)
    if not mat.is_square:
        raise ShapeError(f"expected a square matrix, got {mat.rows}x{mat.cols}")
    if mat.rows < 3:
        raise ShapeError(f"the block perturbation needs n >= 3, got n = {mat.rows}")
    return mat


def _xi(xi) -> np.ndarray:
    vec = np.atleast_1d(np.asarray(xi, dtype=np.float64))
    if vec.shape != (4,):
        raise ShapeError(f"xi must be a real 4-vector, got shape {vec.shape}")
    if not np.all(np.isfinite(vec)):
        raise ValueError("xi must be finite")
    return vec


def build_q(a: MatrixLike, xi) -> ComplexMatrix:
    """The 3n x 3n block-upper-triangular perturbation of A at xi."""
    mat = _square_input(a)
    vec = _xi(xi)
    n = mat.rows
    eye = np.eye(n, dtype=np.complex128)
    out = np.zeros((3 * n, 3 * n), dtype=np.complex128)
    for block in range(3):
        out[block * n : (block + 1) * n, block * n : (block + 1) * n] = mat.data
    out[:n, n : 2 * n] = vec[0] * eye
    out[:n, 2 * n :] = (vec[2] + 1j * vec[3]) * eye
    out[n : 2 * n, 2 * n :] = vec[1] * eye
    return ComplexMatrix(out)


def _q_partials(n: int) -> tuple[ComplexMatrix, ...]:
    eye = np.eye(n, dtype=np.complex128)
    mats = []
    for factor, row_block, col_block in ((1.0, 0, 1), (1.0, 1, 2), (1.0, 0, 2), (1.0j, 0, 2)):
        p = np.zeros((3 * n, 3 * n), dtype=np.complex128)
        p[row_block * n : (row_block + 1) * n, col_block * n : (col_block + 1) * n] = factor * eye
        mats.append(ComplexMatrix(p))
    return tuple(mats)


def q_family(a: MatrixLike) -> MatrixFamily:
    """The perturbation wrapped as a 4-parameter (non-Hermitian) family."""
    mat = _square_input(a)
    n = mat.rows
    partials = _q_partials(n)
    return MatrixFamily(
        param_dim=4,
        rows=3 * n,
        cols=3 * n,
        hermitian=False,
        evaluator=lambda x: build_q(mat, x),
        partials=lambda x, j: partials[j - 1],
    )


def critical_index(n: int) -> int:
    return 3 * n - 2


def is_decisive(p: int, mult: int) -> bool:
    """Index condition p <= mult - (p - 1) separating the two sign cases."""
    if not 1 <= p <= mult:
        raise ValueError(f"within-cluster position p={p} out of range 1..{mult}")
    return p <= mult - (p - 1)


def forward_backward(mu: Sequence[float], p: int) -> tuple[float, float]:
    """(f'(xi0, d), f'(xi0, -d)) read off the mu spectrum of F'(d).

    Forward is mu_p; backward is -mu_{mult-p+1}, the reflection of the p-th
    entry counted from the bottom of the list.
    """
    mu = np.atleast_1d(np.asarray(mu, dtype=np.float64))
    mult = mu.size
    if not 1 <= p <= mult:
        raise ValueError(f"within-cluster position p={p} out of range 1..{mult}")
    if np.any(np.diff(mu) > 0):
        raise ValueError("mu spectrum must be non-increasing")
    return float(mu[p - 1]), float(-mu[mult - p])


@dataclass(frozen=True, eq=False)
class DirectionAnalysis:
    """Per-direction record: mu spectrum and both one-sided derivatives."""

    direction: np.ndarray
    mu: np.ndarray
    f_forward: float
    f_backward: float
    reflection_delta: float

    @property
    def trace(self) -> float:
        return float(np.sum(self.mu))

    def to_json(self) -> dict:
        return {
            "d": [float(v) for v in self.direction],
            "mu": [float(v) for v in self.mu],
            "f_fwd": self.f_forward,
            "f_bwd": self.f_backward,
            "reflection_delta": self.reflection_delta,
        }


def _direction_analysis(point: SvPoint, xi0: np.ndarray, d: np.ndarray) -> DirectionAnalysis:
    fwd = embedding_report(point, xi0, d)
    p = point.cluster.i
    f_fwd, f_bwd = forward_backward(fwd.mu, p)
    bwd = embedding_report(point, xi0, -d)
    return DirectionAnalysis(
        direction=fwd.direction,
        mu=fwd.mu,
        f_forward=f_fwd,
        f_backward=f_bwd,
        reflection_delta=abs(f_bwd - bwd.derivative),
    )


def analyze_direction_pair(
    a: MatrixLike,
    xi0,
    d,
    cluster_tol: float | None = None,
) -> DirectionAnalysis:
    """Forward/backward derivative record for one direction.

    ``f_backward`` comes from the reflection identity on the forward mu
    spectrum; ``reflection_delta`` is its disagreement with the directly
    computed derivative along -d (a genuine cross-check, since that route
    eigendecomposes F'(-d) separately).
    """
    mat = _square_input(a)
    xi0 = _xi(xi0)
    point = prepare_sv_point(q_family(mat), xi0, critical_index(mat.rows), cluster_tol)
    return _direction_analysis(point, xi0, np.asarray(d, dtype=np.float64))


@dataclass(frozen=True, eq=False)
class CriticalPointAnalysis:
    """Full sign analysis of a candidate local maximizer."""

    xi0: np.ndarray
    sigma0: float
    p: int
    q: int
    mult: int
    case: CriticalCase
    per_direction: tuple[DirectionAnalysis, ...]
    h_gradient: np.ndarray
    check_tol: float
    refutations: tuple[int, ...]

    @property
    def trace_sums(self) -> tuple[float, ...]:
        return tuple(rec.trace for rec in self.per_direction)

    def to_json(self) -> dict:
        return {
            "xi0": [float(v) for v in self.xi0],
            "sigma0": self.sigma0,
            "p": self.p,
            "q": self.q,
            "m": self.mult,
            "case": self.case.value,
            "per_direction": [rec.to_json() for rec in self.per_direction],
            "h_gradient": [float(v) for v in self.h_gradient],
            "trace_sums": list(self.trace_sums),
            "check_tol": self.check_tol,
            "refutations": list(self.refutations),
        }


def classify_critical_point(
    a: MatrixLike,
    xi0,
    directions,
    cluster_tol: float | None = None,
) -> CriticalPointAnalysis:
    """Necessary-condition analysis of a candidate local maximizer of f.

    The caller asserts that xi0 is a candidate local maximizer; nothing here
    certifies maximality.  In the decisive case a local maximum forces every
    directional derivative to vanish, so ``refutations`` lists the directions
    whose forward derivative is clearly nonzero: positive means direct
    ascent, negative means the reflected direction ascends.  In the dubious
    case the sign analysis is inconclusive; only per-direction data is
    reported and nothing is flagged.
    """
    mat = _square_input(a)
    xi0 = _xi(xi0)
    dirs = np.atleast_2d(np.asarray(directions, dtype=np.float64))
    if dirs.shape[0] < 1:
        raise ShapeError("at least one direction is required")
    fam = q_family(mat)
    k = critical_index(mat.rows)
    point = prepare_sv_point(fam, xi0, k, cluster_tol)
    p, q_count, mult = point.cluster.i, point.cluster.j, point.cluster.r
    sigma0 = float(point.sdec.sigma[k - 1])
    case = CriticalCase.DECISIVE if is_decisive(p, mult) else CriticalCase.DUBIOUS
    check_tol = CHECK_TOL_FACTOR * max(1.0, sigma0)

    records = tuple(_direction_analysis(point, xi0, d) for d in dirs)
    refutations = []
    if case is CriticalCase.DECISIVE:
        refutations = [
            idx for idx, rec in enumerate(records) if abs(rec.f_forward) > check_tol
        ]

    h_gradient = sv_cluster_sum_gradient(fam, xi0, k, cluster_tol)
    return CriticalPointAnalysis(
        xi0=xi0,
        sigma0=sigma0,
        p=p,
        q=q_count,
        mult=mult,
        case=case,
        per_direction=records,
        h_gradient=h_gradient,
        check_tol=check_tol,
        refutations=tuple(refutations),
    )


@dataclass(frozen=True, eq=False)
class LevelFunctionReport:
    """Value and gradient of H(xi) = t(xi) - mult*sigma0 at the anchor point."""

    h_value: float
    h_gradient: np.ndarray
    sigma0: float
    mult: int

    def to_json(self) -> dict:
        return {
            "H_value": self.h_value,
            "h_gradient": [float(v) for v in self.h_gradient],
            "sigma0": self.sigma0,
            "m": self.mult,
        }


def level_function_report(
    a: MatrixLike,
    xi0,
    cluster_tol: float | None = None,
) -> LevelFunctionReport:
    """Anchor value (zero by construction) and gradient of the level function.

    For any direction d orthogonal to the gradient, the mu spectrum of F'(d)
    sums to zero; for arbitrary d the sum equals gradient . d.
    """
    mat = _square_input(a)
    xi0 = _xi(xi0)
    fam = q_family(mat)
    k = critical_index(mat.rows)
    point = prepare_sv_point(fam, xi0, k, cluster_tol)
    c = point.cluster
    sigma0 = float(point.sdec.sigma[k - 1])
    t0 = float(np.sum(point.sdec.eigenvalues[c.lo - 1 : c.hi]))
    grad = sv_cluster_sum_gradient(fam, xi0, k, cluster_tol)
    return LevelFunctionReport(
        h_value=t0 - c.r * sigma0,
        h_gradient=grad,
        sigma0=sigma0,
        mult=c.r,
    )


def coarse_maximize(
    a: MatrixLike,
    radius: float = 1.0,
    grid_points: int = 5,
    refine_iters: int = 40,
) -> np.ndarray:
    """Grid scan plus compass pattern search for a candidate maximizer of f.

    Deliberately coarse: it yields a candidate xi0 for the sign analysis,
    not a certified local maximum.  Deterministic for fixed arguments.
    """
    mat = _square_input(a)
    if radius <= 0.0 or grid_points < 2 or refine_iters < 0:
        raise ValueError("radius must be positive, grid_points >= 2, refine_iters >= 0")
    fam = q_family(mat)
    k = critical_index(mat.rows)

    from .deriv_sv import sv_decomposition

    def f(xi: np.ndarray) -> float:
        return float(sv_decomposition(fam.evaluate(xi)).sigma[k - 1])

    axis = np.linspace(-radius, radius, grid_points)
    best_xi = np.zeros(4)
    best_val = -np.inf
    for x1 in axis:
        for x2 in axis:
            for x3 in axis:
                for x4 in axis:
                    xi = np.array([x1, x2, x3, x4])
                    val = f(xi)
                    if val > best_val:
                        best_val, best_xi = val, xi

    step = float(axis[1] - axis[0]) if grid_points > 1 else radius
    for _ in range(refine_iters):
        improved = False
        for coord in range(4):
            for sign in (1.0, -1.0):
                probe = best_xi.copy()
                probe[coord] += sign * step
                val = f(probe)
                if val > best_val:
                    best_val, best_xi = val, probe
                    improved = True
        if not improved:
            step *= 0.5
            if step < 1e-7 * radius:
                break
    return best_xi
