"""spectral-sens: directional derivatives of ordered eigenvalues and
singular values of complex matrix families.

Ordered eigenvalue functions of a Hermitian family are continuous but can be
nondifferentiable where eigenvalues coalesce; one-sided directional
derivatives always exist and are computed here exactly (up to eigensolver
roundoff) through compressions onto the coalescing eigenspace.  Singular
values are handled through the symmetric zero-block embedding, and the
block-perturbation critical-point analysis builds on both.  A seeded
finite-difference oracle provides independent cross-validation.
"""

from .cluster import ClusterIndex, cluster_gap_guard, default_cluster_tol, locate_cluster
from .deriv_eig import (
    DerivativeReport,
    build_f_prime,
    cluster_sum_gradient,
    eig_directional_derivative,
    eig_directional_derivatives,
    eigvec_block,
)
from .deriv_sv import (
    SingularDecomposition,
    sv_cluster_sum_gradient,
    sv_decomposition,
    sv_derivative_pair,
    sv_derivative_reduced,
    sv_directional_derivative,
    wielandt_embed,
)
from .directions import normalize_direction, sphere_directions
from .errors import (
    ConvergenceError,
    InputFormatError,
    NotHermitianError,
    ShapeError,
    SigmaAtZeroError,
    SpectralSensError,
)
from .families import AffineFamily, MatrixFamily, fd_partial_check, kato_family, make_affine
from .fd import FDEstimate, fd_directional, fd_gradient
from .ikramov import (
    CriticalCase,
    CriticalPointAnalysis,
    DirectionAnalysis,
    LevelFunctionReport,
    analyze_direction_pair,
    build_q,
    classify_critical_point,
    coarse_maximize,
    forward_backward,
    is_decisive,
    level_function_report,
    q_family,
)
from .linalg import (
    ComplexMatrix,
    SpectralDecomposition,
    hermiticity_defect,
    hermitian_eig,
    trace_hermitian,
)

__version__ = "0.1.0"

__all__ = [
    "AffineFamily",
    "ClusterIndex",
    "ComplexMatrix",
    "ConvergenceError",
    "CriticalCase",
    "CriticalPointAnalysis",
    "DerivativeReport",
    "DirectionAnalysis",
    "FDEstimate",
    "InputFormatError",
    "LevelFunctionReport",
    "MatrixFamily",
    "NotHermitianError",
    "ShapeError",
    "SigmaAtZeroError",
    "SingularDecomposition",
    "SpectralDecomposition",
    "SpectralSensError",
    "analyze_direction_pair",
    "build_f_prime",
    "build_q",
    "classify_critical_point",
    "cluster_gap_guard",
    "cluster_sum_gradient",
    "coarse_maximize",
    "default_cluster_tol",
    "eig_directional_derivative",
    "eig_directional_derivatives",
    "eigvec_block",
    "fd_directional",
    "fd_gradient",
    "fd_partial_check",
    "forward_backward",
    "hermiticity_defect",
    "hermitian_eig",
    "is_decisive",
    "kato_family",
    "level_function_report",
    "locate_cluster",
    "make_affine",
    "normalize_direction",
    "q_family",
    "sphere_directions",
    "sv_cluster_sum_gradient",
    "sv_decomposition",
    "sv_derivative_pair",
    "sv_derivative_reduced",
    "sv_directional_derivative",
    "trace_hermitian",
    "wielandt_embed",
]
