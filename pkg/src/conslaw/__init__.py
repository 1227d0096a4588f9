"""Statistics of conservation laws with random initial data.

Solves rho_t = (H(rho))_x from white-noise-type initial densities through
the variational (Hopf-Lax) formula and evaluates the closed-form laws of
the resulting random fields: argmax densities, shock-jump kernels, hitting
and transition densities, and the Airy-function identity they satisfy,
each cross-checked against Monte Carlo or finite differences.
"""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .errors import (
    AccuracyError,
    ConfigError,
    ConslawError,
    ConvergenceError,
    DomainError,
    RangeError,
    SeedError,
    StabilityError,
    TableRangeError,
    TruncationError,
)
from .hamiltonian import (
    ConvexFunctionSpec,
    cosh_spec,
    legendre_derivative,
    legendre_transform,
    phi_from_hamiltonian,
    power,
    quadratic,
    quartic,
    tabulated,
    validate_convexity,
)
from .paths import (
    GridPath,
    GridSpec,
    LevySample,
    LevySpec,
    sample_bessel3_bridge,
    sample_excursion,
    sample_levy,
    sample_two_sided_bm,
    truncate_jumps,
)
from .solver import ShockReport, SolutionField, psi_process, shock_census, solve_field

__all__ = [
    "AccuracyError",
    "BACKEND",
    "ConfigError",
    "ConslawError",
    "ConvergenceError",
    "ConvexFunctionSpec",
    "DomainError",
    "GridPath",
    "GridSpec",
    "LevySample",
    "LevySpec",
    "RangeError",
    "SeedError",
    "ShockReport",
    "SolutionField",
    "StabilityError",
    "TableRangeError",
    "TruncationError",
    "__version__",
    "cosh_spec",
    "legendre_derivative",
    "legendre_transform",
    "phi_from_hamiltonian",
    "power",
    "psi_process",
    "quadratic",
    "quartic",
    "sample_bessel3_bridge",
    "sample_excursion",
    "sample_levy",
    "sample_two_sided_bm",
    "shock_census",
    "solve_field",
    "tabulated",
    "truncate_jumps",
    "validate_convexity",
]
