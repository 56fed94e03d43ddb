"""Reproducible quasi-uniform sampling of unit directions.

Directions come from a seeded, scrambled Halton sequence pushed through the
inverse normal CDF and normalized: low-discrepancy in the cube, hence
quasi-uniform on the sphere, and byte-reproducible for a fixed seed.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtri
from scipy.stats import qmc

__all__ = ["sphere_directions", "normalize_direction"]

DEFAULT_SEED = 42


def normalize_direction(d) -> np.ndarray:
    """Explicit rescaling of a vector to unit Euclidean norm."""
    vec = np.atleast_1d(np.asarray(d, dtype=np.float64))
    norm = float(np.linalg.norm(vec))
    if norm < 1e-12:
        raise ValueError("cannot normalize a (near-)zero direction")
    return vec / norm


def sphere_directions(dim: int, count: int, seed: int = DEFAULT_SEED) -> np.ndarray:
    """``count`` unit vectors in R^dim, rows of the returned array."""
    if dim < 1:
        raise ValueError("dimension must be at least 1")
    if count < 1:
        raise ValueError("at least one direction is required")
    sampler = qmc.Halton(d=dim, scramble=True, seed=seed)
    rows: list[np.ndarray] = []
    while len(rows) < count:
        block = sampler.random(count - len(rows))
        gauss = ndtri(np.clip(block, 1e-12, 1.0 - 1e-12))
        for row in gauss:
            norm = float(np.linalg.norm(row))
            if norm > 1e-9:
                rows.append(row / norm)
    return np.array(rows)
