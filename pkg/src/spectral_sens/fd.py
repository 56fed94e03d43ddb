"""Finite-difference oracle for one-sided derivatives and gradients.

This is the independent ground truth the analytic derivative formulas are
checked against.  ``fd_directional`` approximates the one-sided limit of
(phi(x0 + t*d) - phi(x0)) / t as t -> 0+ with Richardson extrapolation on a
halving step sequence; ``fd_gradient`` does the same on central differences,
for functions that are differentiable near x0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = ["FDEstimate", "fd_directional", "fd_gradient", "default_step"]

#: An estimate is trusted when the spread of the last three extrapolants is
#: below TRUST_FACTOR * max(1, |value|).
TRUST_FACTOR = 1e-3


def default_step(x0) -> float:
    return 1e-3 * max(1.0, float(np.linalg.norm(np.atleast_1d(x0))))


@dataclass(frozen=True, eq=False)
class FDEstimate:
    """Extrapolated difference quotient plus the evidence behind it."""

    value: float
    step_sequence: tuple[tuple[float, float], ...]
    extrapolated: float
    stability_indicator: float

    @property
    def trusted(self) -> bool:
        return self.stability_indicator <= TRUST_FACTOR * max(1.0, abs(self.value))


def _eval(phi: Callable, x: np.ndarray) -> float:
    val = float(phi(x))
    if not np.isfinite(val):
        raise ValueError(f"phi returned a non-finite value at {x}")
    return val


def _extrapolants(quotients: list[float], ratio_base: float) -> list[float]:
    """Diagonal of the Richardson table: best estimate per refinement level.

    Entry k combines quotients 0..k assuming an error expansion in powers of
    ``ratio_base`` (2 for one-sided first-order, 4 for central second-order)
    with steps halved between consecutive quotients.
    """
    column = list(quotients)
    diagonal = [column[0]]
    for j in range(1, len(quotients)):
        factor = ratio_base**j
        column = [
            (factor * column[k + 1] - column[k]) / (factor - 1.0)
            for k in range(len(column) - 1)
        ]
        diagonal.append(column[0])
    return diagonal


def fd_directional(
    phi: Callable,
    x0,
    d,
    h0: float | None = None,
    levels: int = 6,
) -> FDEstimate:
    """One-sided directional difference quotient, Richardson extrapolated.

    Parameters
    ----------
    phi:
        Scalar function of a real parameter vector, evaluable on the forward
        segment x0 + t*d for 0 < t <= h0.
    d:
        Unit direction.
    h0:
        Initial step; defaults to 1e-3 * max(1, ||x0||).
    levels:
        Number of halvings (>= 3); quotients are taken at h0 * 2^-k.
    """
    x0 = np.atleast_1d(np.asarray(x0, dtype=np.float64))
    d = np.atleast_1d(np.asarray(d, dtype=np.float64))
    if x0.shape != d.shape:
        raise ValueError("x0 and d must have the same shape")
    if abs(float(np.linalg.norm(d)) - 1.0) > 1e-12:
        raise ValueError("direction d must have unit Euclidean norm")
    if levels < 3:
        raise ValueError("levels must be at least 3")
    if h0 is None:
        h0 = default_step(x0)
    if h0 <= 0.0:
        raise ValueError("h0 must be positive")
    phi0 = _eval(phi, x0)
    steps: list[tuple[float, float]] = []
    quotients: list[float] = []
    h = float(h0)
    for _ in range(levels):
        q = (_eval(phi, x0 + h * d) - phi0) / h
        steps.append((h, q))
        quotients.append(q)
        h *= 0.5
    diagonal = _extrapolants(quotients, ratio_base=2.0)
    value = diagonal[-1]
    tail = diagonal[-3:]
    stability = max(tail) - min(tail)
    return FDEstimate(
        value=value,
        step_sequence=tuple(steps),
        extrapolated=value,
        stability_indicator=stability,
    )


def fd_gradient(phi: Callable, x0, h0: float | None = None, levels: int = 6) -> np.ndarray:
    """Central-difference gradient with Richardson extrapolation on h^2.

    Only meaningful when phi is differentiable near x0; exact to roundoff on
    polynomials of degree <= 2.
    """
    x0 = np.atleast_1d(np.asarray(x0, dtype=np.float64))
    if levels < 3:
        raise ValueError("levels must be at least 3")
    if h0 is None:
        h0 = default_step(x0)
    if h0 <= 0.0:
        raise ValueError("h0 must be positive")
    grad = np.empty(x0.size, dtype=np.float64)
    for coord in range(x0.size):
        step = np.zeros_like(x0)
        quotients: list[float] = []
        h = float(h0)
        for _ in range(levels):
            step[coord] = h
            quotients.append((_eval(phi, x0 + step) - _eval(phi, x0 - step)) / (2.0 * h))
            h *= 0.5
        grad[coord] = _extrapolants(quotients, ratio_base=4.0)[-1]
    return grad
