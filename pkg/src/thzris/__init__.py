"""Coverage of RIS-assisted indoor THz downlinks, analytically and by simulation."""

__version__ = "0.1.0"

from ._backend import backend_name
from .analysis import (
    AssociationBreakdown,
    CoverageResult,
    ScenarioMismatch,
    association,
    association_low_ris,
    association_mass,
    conditional_coverage,
    coverage,
    coverage_low_ris,
    lt_interference_direct,
    lt_interference_ris,
    lt_interference_ris_low,
    total_coverage,
)
from .config import ConfigError, NetworkConfig, default_paper_config, load_config, validate
from .montecarlo import McEstimate, ModeUnavailable, estimate
from .quadrature import NonConvergence, QuadratureNonConvergence

__all__ = [
    "AssociationBreakdown", "ConfigError", "CoverageResult", "McEstimate", "ModeUnavailable",
    "NetworkConfig", "NonConvergence", "QuadratureNonConvergence", "ScenarioMismatch",
    "association", "association_low_ris", "association_mass", "backend_name",
    "conditional_coverage", "coverage", "coverage_low_ris", "default_paper_config", "estimate",
    "load_config", "lt_interference_direct", "lt_interference_ris", "lt_interference_ris_low",
    "total_coverage", "validate",
]
