"""Numerical verification toolkit for elliptic theta identities and free-field currents."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConfigError,
    ConstructionError,
    DomainError,
    EnvelopeError,
    PoleError,
    QToroidalError,
    RegionError,
    ResidueError,
    SamplingError,
    StaleElementError,
)
from .params import DEFAULT_TRUNC, ParameterSet, TruncationConfig, build_params, make_rng, sample_params  # noqa: E402
from .report import CheckRecord, VerificationReport, strip_timing  # noqa: E402

__all__ = [
    "CheckRecord",
    "ConfigError",
    "ConstructionError",
    "DEFAULT_TRUNC",
    "DomainError",
    "EnvelopeError",
    "ParameterSet",
    "PoleError",
    "QToroidalError",
    "RegionError",
    "ResidueError",
    "SamplingError",
    "StaleElementError",
    "TruncationConfig",
    "VerificationReport",
    "build_params",
    "make_rng",
    "sample_params",
    "strip_timing",
]
