"""Guided genetic search for crash-reproducing tests."""

from .fitness import (
    WORST,
    CrashTarget,
    FitnessBreakdown,
    FitnessFunction,
    InvalidTargetError,
    compute_exception_distance,
    compute_line_distance,
    compute_stack_distance,
    fitness,
)
from .ga import (
    EXCEPTION_THROWN,
    LINE_NOT_REACHED,
    LINE_REACHED,
    NOT_STARTED,
    REPRODUCED,
    SEEDING_MODES,
    STATUSES,
    SearchConfig,
    SearchOutcome,
    build_models,
    classify,
    prepare_seeds,
    run_search,
)
from .operators import CannotBuild, TestFactory

__all__ = [
    "WORST", "CrashTarget", "FitnessBreakdown", "FitnessFunction", "InvalidTargetError",
    "compute_exception_distance", "compute_line_distance", "compute_stack_distance", "fitness",
    "EXCEPTION_THROWN", "LINE_NOT_REACHED", "LINE_REACHED", "NOT_STARTED", "REPRODUCED",
    "SEEDING_MODES", "STATUSES", "SearchConfig", "SearchOutcome", "build_models", "classify",
    "prepare_seeds", "run_search", "CannotBuild", "TestFactory",
]
