"""Chebyshev systems: certification, construction, interpolation, minimax
approximation, moment problems, and polyharmonic uniqueness on the disk."""

__version__ = "0.1.0"

from .core import C_INFINITY, FunctionSystem, Interval, SpanElement, eval_span
from .errors import (
    ChebsysError, ConfigError, DomainError, MomentError, SingularSystemError, SmoothnessError,
)
from .colloc import (
    CertificationResult, CollocationReport, KnotSpec, ZeroReport, certify_t_property,
    collocation_determinant, collocation_matrix, count_zeros, write_sweep_csv,
)
from .construct import Weight, WeightChain, build_nested, nested_derivative
from .interp import (
    DTData, HermiteData, boundary_data_matrix, dimension_check, dt_boundary_basis, dt_solve,
    hermite_solve, interpolation_residual,
)
from .approx import AlternationRefutation, AlternationResult, remez, verify_alternation
from .moments import (
    AtomicMeasure, MomentData, gauss_from_moments, monomial_moments, verify_measure,
)
from .polyharmonic import (
    AlmansiCoefficients, DiskConfig, FourierBoundaryData, UniquenessCertificate,
    apply_laplacian, boundary_residual_concentric, boundary_residual_subdisk,
    concentric_matrix, dirichlet_matrix, eval_field, solve_concentric, solve_dirichlet_disk,
    uniqueness_certificate,
)
from .report import emit_report, load_report

__all__ = [name for name in dir() if not name.startswith("_")]
