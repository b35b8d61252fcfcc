"""Non-topological bubbling solutions of a rank-2 competitive Chern-Simons system.

The package reduces the system to two couplings ``(a1, a2)``, describes the
admissible decay exponents, solves the scalar limit profile, shoots the radial
system for a shrinking height ``eps`` and compares the result with explicit
Liouville bubbles.
"""

__version__ = "0.1.0"

from .bubbles import BubbleProfile, blowdown, compare_bubble, interval_mass
from .errors import (
    BracketNotFound,
    BubbleError,
    ConfigError,
    Diverged,
    DomainError,
    NotConverged,
    OriginValidationError,
    ProfileOverflow,
    StepUnderflow,
    ToleranceNotMet,
)
from .integrator import Controls, RadialProfile, RadialState, integrate_system, pohozaev_ledger
from .model import (
    CARTAN,
    BubbleParams,
    ExponentPair,
    ModelParams,
    RegionReport,
    alpha_of_gamma,
    cartan_to_params,
    gamma_cap,
    gamma_of,
    junction_point,
    limit_constants,
    quad_J,
    region_report,
    sigma_gamma_range,
    sigma_nonempty,
)
from .scalar import ScalarSolution, scalar_gamma, solve_scalar
from .shooter import ShootReport, geometric_schedule, shoot, sweep

__all__ = [
    "__version__",
    "BracketNotFound",
    "BubbleError",
    "ConfigError",
    "Diverged",
    "DomainError",
    "NotConverged",
    "OriginValidationError",
    "ProfileOverflow",
    "StepUnderflow",
    "ToleranceNotMet",
    "CARTAN",
    "BubbleParams",
    "ExponentPair",
    "ModelParams",
    "RegionReport",
    "alpha_of_gamma",
    "cartan_to_params",
    "gamma_cap",
    "gamma_of",
    "junction_point",
    "limit_constants",
    "quad_J",
    "region_report",
    "sigma_gamma_range",
    "sigma_nonempty",
    "BubbleProfile",
    "blowdown",
    "compare_bubble",
    "interval_mass",
    "Controls",
    "RadialProfile",
    "RadialState",
    "integrate_system",
    "pohozaev_ledger",
    "ScalarSolution",
    "scalar_gamma",
    "solve_scalar",
    "ShootReport",
    "geometric_schedule",
    "shoot",
    "sweep",
]
