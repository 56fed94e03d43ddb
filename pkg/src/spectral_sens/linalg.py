"""Dense complex matrices and a self-contained Hermitian eigensolver.

Eigenvalues are reported in non-increasing order throughout the package; the
eigenvector columns are permuted to match.  The eigensolver is a cyclic-by-row
complex Jacobi iteration with unitary 2x2 rotations, which is unconditionally
stable for Hermitian input and accurate enough for the dense sizes this
package targets (n up to a few hundred).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import ConvergenceError, InputFormatError, NotHermitianError, ShapeError

__all__ = [
    "ComplexMatrix",
    "SpectralDecomposition",
    "as_matrix",
    "frobenius",
    "hermitian_part",
    "hermiticity_defect",
    "hermiticity_tolerance",
    "hermitian_eig",
    "trace_hermitian",
    "DEFAULT_CONVERGENCE_TOL",
    "DEFAULT_MAX_SWEEPS",
]

#: Jacobi convergence threshold, relative to the Frobenius norm of the input.
DEFAULT_CONVERGENCE_TOL = 1e-14
#: Hard cap on the number of Jacobi sweeps before reporting failure.
DEFAULT_MAX_SWEEPS = 60

#: Residual/orthonormality budget for a decomposition of size n is
#: RESIDUAL_FACTOR * n (times ||A||_F for the residual).
RESIDUAL_FACTOR = 1e-10

#: A matrix counts as Hermitian when ||A - A*||_F <= HERMIT_TOL_FACTOR * ||A||_F.
HERMIT_TOL_FACTOR = 1e-12


@dataclass(frozen=True, eq=False)
class ComplexMatrix:
    """Immutable dense complex matrix with finite entries."""

    data: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.data, dtype=np.complex128, order="C")
        if arr.ndim != 2:
            raise ShapeError(f"expected a 2-d matrix, got array of ndim {arr.ndim}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ShapeError(f"matrix dimensions must be positive, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("matrix entries must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.data
        return self.data.astype(dtype)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "ComplexMatrix":
        return cls(np.zeros((rows, cols), dtype=np.complex128))

    @classmethod
    def identity(cls, n: int) -> "ComplexMatrix":
        return cls(np.eye(n, dtype=np.complex128))

    def to_json(self) -> dict:
        """Row-major wire format: {"rows", "cols", "entries": [[re, im], ...]}."""
        entries = [[float(z.real), float(z.imag)] for z in self.data.ravel()]
        return {"rows": self.rows, "cols": self.cols, "entries": entries}

    @classmethod
    def from_json(cls, obj) -> "ComplexMatrix":
        if not isinstance(obj, dict):
            raise InputFormatError("matrix JSON must be an object")
        for key in ("rows", "cols", "entries"):
            if key not in obj:
                raise InputFormatError(f"matrix JSON is missing the '{key}' field")
        rows, cols, entries = obj["rows"], obj["cols"], obj["entries"]
        if not isinstance(rows, int) or not isinstance(cols, int) or rows < 1 or cols < 1:
            raise InputFormatError("matrix JSON 'rows'/'cols' must be positive integers")
        if not isinstance(entries, list) or len(entries) != rows * cols:
            raise InputFormatError(
                f"matrix JSON 'entries' must list exactly rows*cols = {rows * cols} pairs"
            )
        flat = np.empty(rows * cols, dtype=np.complex128)
        for idx, pair in enumerate(entries):
            if (
                not isinstance(pair, (list, tuple))
                or len(pair) != 2
                or not all(isinstance(v, (int, float)) for v in pair)
            ):
                raise InputFormatError(f"entry {idx} is not an [re, im] pair")
            flat[idx] = complex(pair[0], pair[1])
        if not np.all(np.isfinite(flat)):
            raise InputFormatError("matrix JSON entries must be finite")
        return cls(flat.reshape(rows, cols))


MatrixLike = Union[ComplexMatrix, np.ndarray, Sequence]


def as_matrix(a: MatrixLike) -> ComplexMatrix:
    """Coerce an array-like into a validated :class:`ComplexMatrix`."""
    if isinstance(a, ComplexMatrix):
        return a
    return ComplexMatrix(np.asarray(a))


def frobenius(a: MatrixLike) -> float:
    return float(np.linalg.norm(as_matrix(a).data))


def hermitian_part(a: np.ndarray) -> np.ndarray:
    """(A + A*) / 2, exactly Hermitian entry by entry.

    Congruences W* G W of a Hermitian G are Hermitian in exact arithmetic but
    pick up absolute-scale roundoff asymmetry; taking the Hermitian part
    removes it without changing the represented matrix.
    """
    return 0.5 * (a + a.conj().T)


def hermiticity_defect(a: MatrixLike) -> float:
    """Frobenius distance ||A - A*||_F between A and its conjugate transpose."""
    mat = as_matrix(a)
    if not mat.is_square:
        raise ShapeError(f"hermiticity defect needs a square matrix, got {mat.rows}x{mat.cols}")
    return float(np.linalg.norm(mat.data - mat.data.conj().T))


def hermiticity_tolerance(a: MatrixLike) -> float:
    """Roundoff-level slack under which a matrix is accepted as Hermitian."""
    return HERMIT_TOL_FACTOR * frobenius(a)


def trace_hermitian(a: MatrixLike) -> float:
    """Real part of the trace of a Hermitian matrix.

    Raises if the matrix is not Hermitian within tolerance or if the imaginary
    part of the trace is larger than roundoff allows.
    """
    mat = as_matrix(a)
    defect = hermiticity_defect(mat)
    if defect > hermiticity_tolerance(mat):
        raise NotHermitianError(
            f"matrix is not Hermitian: defect {defect:.3e} exceeds tolerance"
        )
    tr = complex(np.trace(mat.data))
    scale = max(1.0, frobenius(mat))
    if abs(tr.imag) > RESIDUAL_FACTOR * mat.rows * scale:
        raise NotHermitianError(f"trace has non-negligible imaginary part {tr.imag:.3e}")
    return tr.real


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigenvalues in non-increasing order with matching unitary eigenvectors."""

    dim: int
    eigenvalues: np.ndarray
    vectors: ComplexMatrix

    def __post_init__(self) -> None:
        vals = np.array(self.eigenvalues, dtype=np.float64)
        if vals.ndim != 1 or vals.size != self.dim:
            raise ShapeError("eigenvalue list does not match the declared dimension")
        if np.any(np.diff(vals) > 0):
            raise ValueError("eigenvalues must be in non-increasing order")
        if self.vectors.rows != self.dim or self.vectors.cols != self.dim:
            raise ShapeError("eigenvector matrix does not match the declared dimension")
        vals.setflags(write=False)
        object.__setattr__(self, "eigenvalues", vals)

    def reconstruct(self) -> np.ndarray:
        """U diag(lambda) U*, the matrix the decomposition represents."""
        u = self.vectors.data
        return (u * self.eigenvalues) @ u.conj().T


def _offdiagonal_norm(w: np.ndarray) -> float:
    return float(np.linalg.norm(w - np.diag(np.diagonal(w))))


def _jacobi(w: np.ndarray, tol: float, max_sweeps: int) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic-by-row complex Jacobi on a Hermitian matrix (modified in place)."""
    n = w.shape[0]
    v = np.eye(n, dtype=np.complex128)
    norm_a = float(np.linalg.norm(w))
    if n == 1 or norm_a == 0.0:
        return np.real(np.diagonal(w)).copy(), v
    target = tol * norm_a
    # Elements below `skip` cannot push the off-diagonal mass above target.
    skip = target / n
    for _ in range(max_sweeps):
        if _offdiagonal_norm(w) <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = w[p, q]
                ab = abs(b)
                if ab <= skip:
                    continue
                app = w[p, p].real
                aqq = w[q, q].real
                tau = (app - aqq) / (2.0 * ab)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.hypot(1.0, tau))
                else:
                    t = -1.0 / (-tau + math.hypot(1.0, tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                phase = b / ab
                sp = s * phase
                spc = s * phase.conjugate()
                # Two-sided update J* W J restricted to rows/columns p, q.
                row_p = c * w[p, :] + sp * w[q, :]
                w[q, :] = -spc * w[p, :] + c * w[q, :]
                w[p, :] = row_p
                col_p = c * w[:, p] + spc * w[:, q]
                w[:, q] = -sp * w[:, p] + c * w[:, q]
                w[:, p] = col_p
                w[p, p] = app + t * ab
                w[q, q] = aqq - t * ab
                w[p, q] = 0.0
                w[q, p] = 0.0
                vcol_p = c * v[:, p] + spc * v[:, q]
                v[:, q] = -sp * v[:, p] + c * v[:, q]
                v[:, p] = vcol_p
    else:
        off = _offdiagonal_norm(w)
        if off > target:
            raise ConvergenceError(
                f"Jacobi iteration did not converge in {max_sweeps} sweeps: "
                f"off-diagonal residual {off:.3e}, target {target:.3e}",
                residual=off,
            )
    return np.real(np.diagonal(w)).copy(), v


def hermitian_eig(
    a: MatrixLike,
    convergence_tol: float = DEFAULT_CONVERGENCE_TOL,
    max_sweeps: int = DEFAULT_MAX_SWEEPS,
) -> SpectralDecomposition:
    """Full eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Parameters
    ----------
    a:
        Square matrix, Hermitian within ``hermiticity_tolerance(a)``.
    convergence_tol:
        Sweep termination once the off-diagonal Frobenius mass drops below
        ``convergence_tol * ||a||_F``.
    max_sweeps:
        Limit on cyclic sweeps; exceeding it raises :class:`ConvergenceError`.
    """
    mat = as_matrix(a)
    if not mat.is_square:
        raise ShapeError(f"eigendecomposition needs a square matrix, got {mat.rows}x{mat.cols}")
    if convergence_tol <= 0.0:
        raise ValueError("convergence_tol must be positive")
    defect = hermiticity_defect(mat)
    if defect > hermiticity_tolerance(mat):
        raise NotHermitianError(
            f"matrix is not Hermitian: defect {defect:.3e} exceeds "
            f"tolerance {hermiticity_tolerance(mat):.3e}"
        )
    w = 0.5 * (mat.data + mat.data.conj().T)
    vals, vecs = _jacobi(w, convergence_tol, max_sweeps)
    order = np.argsort(-vals, kind="stable")
    vals = vals[order]
    vecs = np.ascontiguousarray(vecs[:, order])
    dec = SpectralDecomposition(dim=mat.rows, eigenvalues=vals, vectors=ComplexMatrix(vecs))

    n = mat.rows
    orth = float(np.linalg.norm(vecs.conj().T @ vecs - np.eye(n)))
    if orth > RESIDUAL_FACTOR * n:
        raise ConvergenceError(f"eigenvector orthonormality residual {orth:.3e} too large", orth)
    resid = float(np.linalg.norm(mat.data @ vecs - vecs * vals))
    if resid > RESIDUAL_FACTOR * n * max(frobenius(mat), np.finfo(float).tiny):
        raise ConvergenceError(f"eigenpair residual {resid:.3e} too large", resid)
    return dec
