"""Exception types shared across the package.

The CLI maps these onto its exit-code contract: input/parse problems are
distinguished from mathematical failures.
"""

from __future__ import annotations


class SpectralSensError(Exception):
    """Base class for all package-specific errors."""


class ShapeError(SpectralSensError, ValueError):
    """Dimension mismatch, non-square input, or an index out of range."""


class NotHermitianError(SpectralSensError, ValueError):
    """A matrix required to be Hermitian exceeds the hermiticity tolerance."""


class ConvergenceError(SpectralSensError, RuntimeError):
    """An iterative solver failed to reach its target residual."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class SigmaAtZeroError(SpectralSensError, ValueError):
    """Singular-value derivative requested at or too close to sigma = 0.

    The index bookkeeping inside the zero block of the symmetric embedding is
    ill-defined, so these requests are refused rather than guessed at.
    """

    code = "sigma_at_zero"


class InputFormatError(SpectralSensError, ValueError):
    """Malformed JSON input, bad CLI value, or inconsistent declared metadata."""
