"""Exception types shared across the package."""


class TwinwellError(Exception):
    """Base class for all package-specific errors."""


class SectorViolation(TwinwellError):
    """An operator string does not conserve the particle number of a sector."""


class BasisMismatch(TwinwellError):
    """Two objects built over different Fock bases were combined."""


class ConvergenceFailure(TwinwellError):
    """An eigensolver failed to reach its accuracy target."""


class ConfigError(TwinwellError):
    """A sweep configuration is malformed or inconsistent."""


class UnknownPreset(ConfigError):
    """A figure preset id is not recognized."""


class NumericalFailure(TwinwellError):
    """A numerical evaluation failed at a specific grid point."""


class TableExhausted(TwinwellError):
    """A requested lookup lies beyond the tabulated range."""
