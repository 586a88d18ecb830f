"""Beam-diagram detection post-processing and analytical beam solving."""

__version__ = "0.1.0"

from .model import (
    AppliedMoment,
    BeamSpec,
    BeamValidationError,
    DistributedLoad,
    ParseError,
    PointLoad,
    SectionProperties,
    Support,
    SupportKind,
    Units,
    ValidatedBeam,
    deserialize_beam,
    serialize_beam,
    validate_beam,
)
from .solver import BeamSolution, SolverError, solve_beam

__all__ = [
    "__version__",
    "AppliedMoment",
    "BeamSpec",
    "BeamSolution",
    "BeamValidationError",
    "DistributedLoad",
    "ParseError",
    "PointLoad",
    "SectionProperties",
    "SolverError",
    "Support",
    "SupportKind",
    "Units",
    "ValidatedBeam",
    "deserialize_beam",
    "serialize_beam",
    "solve_beam",
    "validate_beam",
]
