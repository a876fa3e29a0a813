"""Exception types shared across the package."""


class QToroidalError(Exception):
    """Base class for all library errors."""


class RegionError(QToroidalError, ValueError):
    """Parameters fall outside the admissible region."""


class DomainError(QToroidalError, ValueError):
    """A function was evaluated outside its domain (e.g. Theta at zero)."""


class PoleError(QToroidalError, ZeroDivisionError):
    """A meromorphic evaluator hit (or came too close to) a pole."""


class ResidueError(QToroidalError):
    """Contour estimates disagree, so the singularity is not a simple pole."""


class ConstructionError(QToroidalError):
    """A theta-space basis could not be built consistently."""


class StaleElementError(QToroidalError):
    """A theta element was evaluated against a different parameter set."""


class EnvelopeError(QToroidalError, ValueError):
    """A requested problem size exceeds the supported computational envelope."""


class ConfigError(QToroidalError, ValueError):
    """An invalid verification campaign configuration."""


class SamplingError(QToroidalError, RuntimeError):
    """Rejection sampling failed to find an admissible point."""
