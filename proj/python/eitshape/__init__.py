"""Level-set reconstruction of EIT inclusions via the distributed shape derivative."""

from ._core import (
    EitProblem,
    EitshapeError,
    MeasurementSet,
    OptTrace,
    ShapeSpec,
    TraceRow,
    advect,
    level_set,
    noise_level,
    reconstruct,
    signed_distance,
    sublevel_area,
    symmetric_difference,
    synthesize_measurements,
    verify_gaps,
)

__all__ = [
    "EitProblem",
    "EitshapeError",
    "MeasurementSet",
    "OptTrace",
    "ShapeSpec",
    "TraceRow",
    "advect",
    "level_set",
    "noise_level",
    "reconstruct",
    "signed_distance",
    "sublevel_area",
    "symmetric_difference",
    "synthesize_measurements",
    "verify_gaps",
]
