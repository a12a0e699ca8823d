"""Exception types raised across the package."""


class UnphysicalCovarianceError(ValueError):
    """Covariance matrix violates the uncertainty principle."""


class InvariantInconsistencyError(ValueError):
    """Symplectic invariants give a negative discriminant beyond tolerance."""


class ValidityHorizonError(ValueError):
    """Linear-in-time covariance used past the point where it is trustworthy."""


class RegimeError(ValueError):
    """An approximate formula was requested outside its regime."""


class DegeneratePurityError(ValueError):
    """Closed forms for resonant pairs divide by mu_i - mu_j."""


class RelationError(ValueError):
    """Operation requested for the wrong band-pair relation."""


class ConfigError(ValueError):
    """Malformed or out-of-range sweep configuration."""

    def __init__(self, key, message):
        super().__init__(f"{key}: {message}")
        self.key = key
