"""Correlations between reservoir frequency bands of a periodically driven oscillator."""
from .bands import (
    NONRESONANT,
    RESONANT,
    UNCORRELATED,
    BandPair,
    BandSpec,
    CorrelationReport,
    ThermalEnvironment,
    correlation_report,
    cross_generator,
    heat_current,
    negativity_closed,
)
from .errors import (
    ConfigError,
    DegeneratePurityError,
    InvariantInconsistencyError,
    RegimeError,
    RelationError,
    UnphysicalCovarianceError,
    ValidityHorizonError,
)
from .gaussian import (
    TwoModeCovariance,
    gaussian_discord_exact,
    log_negativity_exact,
    mutual_information_exact,
    symplectic_eigenvalues,
    symplectic_invariants,
)
from .green import DrivingSpec, GreenCoefficients, SpectralDensity, solve_green_coefficients
from .sweep import SCENARIOS, SweepConfig, parse_config, run_sweep, run_validation, scenario_config

__version__ = "0.1.0"
