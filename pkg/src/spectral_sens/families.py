"""Parametric matrix families x -> A(x) with exact per-coordinate partials.

A family carries its own differentiation rule: ``partial(x, j)`` must return
the exact entrywise partial derivative with respect to the j-th coordinate
(1-based, matching the coordinate numbering used everywhere in this package).
Affine families, where the partials are the constant coefficient matrices,
cover all file-based input; arbitrary smooth families can be built
programmatically through :class:`MatrixFamily`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import InputFormatError, NotHermitianError, ShapeError
from .linalg import (
    ComplexMatrix,
    MatrixLike,
    as_matrix,
    hermiticity_defect,
    hermiticity_tolerance,
)

__all__ = [
    "MatrixFamily",
    "AffineFamily",
    "make_affine",
    "kato_family",
    "fd_partial_check",
]


def _as_point(x, param_dim: int) -> np.ndarray:
    vec = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if vec.ndim != 1 or vec.size != param_dim:
        raise ShapeError(f"parameter point must have {param_dim} coordinates, got shape {vec.shape}")
    if not np.all(np.isfinite(vec)):
        raise ValueError("parameter point must be finite")
    return vec


@dataclass(frozen=True, eq=False)
class MatrixFamily:
    """A C^1 family of complex matrices over an open subset of R^p.

    ``evaluator`` maps a parameter point to the matrix value and ``partials``
    maps ``(x, j)`` to the j-th partial derivative (j = 1..param_dim).  When
    ``hermitian`` is set, every value and every partial must be Hermitian;
    this is enforced at each evaluation.
    """

    param_dim: int
    rows: int
    cols: int
    hermitian: bool
    evaluator: Callable[[np.ndarray], MatrixLike]
    partials: Callable[[np.ndarray, int], MatrixLike]
    domain: tuple[np.ndarray, np.ndarray] | None = None

    def __post_init__(self) -> None:
        if self.param_dim < 1:
            raise ShapeError("a matrix family needs at least one parameter")
        if self.rows < 1 or self.cols < 1:
            raise ShapeError("matrix dimensions must be positive")
        if self.domain is not None:
            lo = np.asarray(self.domain[0], dtype=np.float64)
            hi = np.asarray(self.domain[1], dtype=np.float64)
            if lo.shape != (self.param_dim,) or hi.shape != (self.param_dim,):
                raise ShapeError("domain bounds must match the parameter dimension")
            if np.any(lo >= hi):
                raise ValueError("domain lower bounds must be below upper bounds")
            object.__setattr__(self, "domain", (lo, hi))

    def _check_point(self, x) -> np.ndarray:
        vec = _as_point(x, self.param_dim)
        if self.domain is not None:
            lo, hi = self.domain
            if np.any(vec < lo) or np.any(vec > hi):
                raise ValueError(f"point {vec} is outside the declared domain box")
        return vec

    def _checked(self, raw: MatrixLike, what: str) -> ComplexMatrix:
        mat = as_matrix(raw)
        if mat.rows != self.rows or mat.cols != self.cols:
            raise ShapeError(
                f"{what} has shape {mat.rows}x{mat.cols}, declared {self.rows}x{self.cols}"
            )
        if self.hermitian:
            defect = hermiticity_defect(mat)
            if defect > hermiticity_tolerance(mat):
                raise NotHermitianError(
                    f"{what} of a family declared Hermitian has defect {defect:.3e}"
                )
        return mat

    def evaluate(self, x) -> ComplexMatrix:
        vec = self._check_point(x)
        return self._checked(self.evaluator(vec), "value")

    def partial(self, x, j: int) -> ComplexMatrix:
        vec = self._check_point(x)
        if not 1 <= j <= self.param_dim:
            raise ShapeError(f"partial index {j} out of range 1..{self.param_dim}")
        return self._checked(self.partials(vec, j), f"partial {j}")

    def weighted_partial(self, x, weights) -> ComplexMatrix:
        """sum_j weights[j] * dA/dx_j(x); no normalization is applied."""
        w = _as_point(weights, self.param_dim)
        acc = np.zeros((self.rows, self.cols), dtype=np.complex128)
        for j in range(self.param_dim):
            acc += w[j] * self.partial(x, j + 1).data
        return ComplexMatrix(acc)


def _all_hermitian(mats: Sequence[ComplexMatrix]) -> bool:
    return all(
        m.is_square and hermiticity_defect(m) <= hermiticity_tolerance(m) for m in mats
    )


def make_affine(
    base: MatrixLike,
    coefficients: Sequence[MatrixLike],
    hermitian: bool | None = None,
    domain=None,
) -> MatrixFamily:
    """Family A(x) = base + sum_j x_j * coefficients[j].

    The partials are exactly the coefficient matrices.  With ``hermitian``
    left as None the flag is detected from the inputs; an explicit True is
    verified and raises when the inputs do not support it.
    """
    base_m = as_matrix(base)
    coeff_m = tuple(as_matrix(c) for c in coefficients)
    if len(coeff_m) < 1:
        raise ShapeError("an affine family needs at least one coefficient matrix")
    for idx, c in enumerate(coeff_m):
        if (c.rows, c.cols) != (base_m.rows, base_m.cols):
            raise ShapeError(
                f"coefficient {idx + 1} has shape {c.rows}x{c.cols}, "
                f"base is {base_m.rows}x{base_m.cols}"
            )
    detected = _all_hermitian((base_m,) + coeff_m)
    if hermitian is None:
        hermitian = detected
    elif hermitian and not detected:
        raise NotHermitianError("family declared Hermitian but base or a coefficient is not")

    def evaluator(x: np.ndarray) -> np.ndarray:
        acc = base_m.data.copy()
        for j, c in enumerate(coeff_m):
            acc += x[j] * c.data
        return acc

    def partials(x: np.ndarray, j: int) -> ComplexMatrix:
        return coeff_m[j - 1]

    return MatrixFamily(
        param_dim=len(coeff_m),
        rows=base_m.rows,
        cols=base_m.cols,
        hermitian=hermitian,
        evaluator=evaluator,
        partials=partials,
        domain=domain,
    )


@dataclass(frozen=True, eq=False)
class AffineFamily:
    """Serializable payload for an affine family (the only file format)."""

    base: ComplexMatrix
    coefficients: tuple[ComplexMatrix, ...]
    hermitian: bool

    def to_family(self) -> MatrixFamily:
        return make_affine(self.base, self.coefficients, hermitian=self.hermitian)

    def to_json(self) -> dict:
        return {
            "base": self.base.to_json(),
            "coefficients": [c.to_json() for c in self.coefficients],
            "hermitian": self.hermitian,
        }

    @classmethod
    def from_json(cls, obj) -> "AffineFamily":
        if not isinstance(obj, dict):
            raise InputFormatError("family JSON must be an object")
        for key in ("base", "coefficients", "hermitian"):
            if key not in obj:
                raise InputFormatError(f"family JSON is missing the '{key}' field")
        if not isinstance(obj["hermitian"], bool):
            raise InputFormatError("family JSON 'hermitian' must be a boolean")
        if not isinstance(obj["coefficients"], list) or not obj["coefficients"]:
            raise InputFormatError("family JSON 'coefficients' must be a non-empty list")
        base = ComplexMatrix.from_json(obj["base"])
        coeffs = tuple(ComplexMatrix.from_json(c) for c in obj["coefficients"])
        payload = cls(base=base, coefficients=coeffs, hermitian=obj["hermitian"])
        try:
            payload.to_family()
        except (ShapeError, NotHermitianError) as exc:
            raise InputFormatError(f"inconsistent family JSON: {exc}") from exc
        return payload


def kato_family() -> MatrixFamily:
    """The 2x2 Hermitian family [[x1, i*x2], [-i*x2, -x1]].

    Its ordered eigenvalues are +-sqrt(x1^2 + x2^2): smooth away from the
    origin, continuous but nondifferentiable at it.  The canonical exercise
    for one-sided derivative machinery.
    """
    b1 = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)
    b2 = np.array([[0.0, 1.0j], [-1.0j, 0.0]], dtype=np.complex128)
    return make_affine(ComplexMatrix.zeros(2, 2), [b1, b2], hermitian=True)


def fd_partial_check(family: MatrixFamily, x0, j: int, h: float) -> float:
    """Frobenius defect between a central difference and the declared partial.

    Exact (up to roundoff) for affine families; O(h^2) for smooth ones.
    """
    if h <= 0.0:
        raise ValueError("step h must be positive")
    x0 = _as_point(x0, family.param_dim)
    declared = family.partial(x0, j)
    step = np.zeros(family.param_dim)
    step[j - 1] = h
    diff = (family.evaluate(x0 + step).data - family.evaluate(x0 - step).data) / (2.0 * h)
    return float(np.linalg.norm(diff - declared.data))
