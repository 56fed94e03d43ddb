"""Seeded construction of structured random instances.

Builders for the degenerate-at-a-point families the test suite and the
example scripts exercise: Hermitian affine families whose value at a chosen
point has prescribed eigenvalue multiplicities, rectangular families with
repeated positive singular values, and block-perturbation base matrices with
special singular-vector geometry.
"""

from __future__ import annotations

import numpy as np

from .families import MatrixFamily, make_affine
from .linalg import ComplexMatrix

__all__ = [
    "random_complex",
    "random_hermitian",
    "random_unitary",
    "repeated_value_pattern",
    "degenerate_hermitian_affine",
    "repeated_sigma_affine",
    "first_order_flat_matrix",
    "random_spread_matrix",
]


def random_complex(rng: np.random.Generator, rows: int, cols: int, scale: float = 1.0) -> np.ndarray:
    return scale * (rng.uniform(-1, 1, (rows, cols)) + 1j * rng.uniform(-1, 1, (rows, cols)))


def random_hermitian(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    g = random_complex(rng, n, n, scale)
    return 0.5 * (g + g.conj().T)


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(random_complex(rng, n, n))
    # Fix the phase convention so the factor is unique.
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def repeated_value_pattern(
    rng: np.random.Generator,
    n: int,
    min_gap: float = 0.75,
    positive: bool = False,
) -> np.ndarray:
    """Non-increasing length-n value pattern containing at least one repeat.

    Distinct levels are separated by at least ``min_gap``; with ``positive``
    the smallest level stays at or above 1.
    """
    if n < 2:
        raise ValueError("a repeated pattern needs n >= 2")
    n_levels = int(rng.integers(1, n))  # < n levels forces a repeat
    cuts = sorted(rng.choice(np.arange(1, n), size=n_levels - 1, replace=False)) if n_levels > 1 else []
    sizes = np.diff([0, *cuts, n])
    gaps = min_gap + rng.uniform(0.0, 0.5, n_levels)
    levels = np.cumsum(gaps)[::-1]  # descending, spaced by at least min_gap
    if positive:
        levels = levels - levels[-1] + 1.0
    else:
        levels = levels - np.mean(levels) + rng.uniform(-0.5, 0.5)
    return np.repeat(levels, sizes)


def degenerate_hermitian_affine(
    rng: np.random.Generator,
    n: int,
    p: int,
    pattern: np.ndarray | None = None,
) -> tuple[MatrixFamily, np.ndarray]:
    """Affine Hermitian family whose value at the returned point is
    unitarily conjugated from a diagonal with repeated entries."""
    if pattern is None:
        pattern = repeated_value_pattern(rng, n)
    u = random_unitary(rng, n)
    at_x0 = u @ np.diag(pattern.astype(np.float64)) @ u.conj().T
    at_x0 = 0.5 * (at_x0 + at_x0.conj().T)
    x0 = rng.uniform(-1, 1, p)
    coeffs = [random_hermitian(rng, n) for _ in range(p)]
    base = at_x0 - sum(x0[j] * coeffs[j] for j in range(p))
    base = 0.5 * (base + base.conj().T)
    return make_affine(ComplexMatrix(base), coeffs, hermitian=True), x0


def repeated_sigma_affine(
    rng: np.random.Generator,
    rows: int,
    cols: int,
    p: int,
    pattern: np.ndarray | None = None,
) -> tuple[MatrixFamily, np.ndarray]:
    """Affine rectangular family with prescribed (repeating, positive)
    singular values at the returned point."""
    q = min(rows, cols)
    if pattern is None:
        pattern = repeated_value_pattern(rng, q, positive=True)
    u = random_unitary(rng, rows)
    v = random_unitary(rng, cols)
    sig = np.zeros((rows, cols), dtype=np.complex128)
    sig[:q, :q] = np.diag(pattern.astype(np.float64))
    at_x0 = u @ sig @ v.conj().T
    x0 = rng.uniform(-1, 1, p)
    coeffs = [random_complex(rng, rows, cols, scale=0.5) for _ in range(p)]
    base = at_x0 - sum(x0[j] * coeffs[j] for j in range(p))
    return make_affine(ComplexMatrix(base), coeffs, hermitian=False), x0


def first_order_flat_matrix() -> ComplexMatrix:
    """A 3x3 base matrix whose smallest singular triple has orthogonal left
    and right singular vectors.

    With this base, every block-perturbation compression F'(d) at xi = 0
    vanishes identically, so all one-sided derivatives of the critical
    singular value are exactly zero there: a first-order-flat anchor point
    with multiplicity three and within-cluster position one.
    """
    return ComplexMatrix(
        np.array(
            [
                [0.0, 0.0, 1.0],
                [3.0, 0.0, 0.0],
                [0.0, 2.0, 0.0],
            ],
            dtype=np.complex128,
        )
    )


def random_spread_matrix(
    rng: np.random.Generator,
    n: int = 3,
    sigma: tuple[float, ...] = (3.0, 2.2, 1.5),
) -> ComplexMatrix:
    """Random square matrix with prescribed well-separated singular values."""
    if len(sigma) != n:
        raise ValueError("need one singular value per dimension")
    u = random_unitary(rng, n)
    v = random_unitary(rng, n)
    return ComplexMatrix(u @ np.diag(np.asarray(sigma, dtype=np.float64)) @ v.conj().T)
