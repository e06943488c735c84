"""Static and dynamic call-sequence collection, test carving and cloning."""

from .cfg import MAX_PATHS, build_cfg, enumerate_paths
from .dynamic import (
    TEST_SEEDING_UNAVAILABLE,
    carve_objects,
    class_dependencies,
    clone_tests,
    collect_dynamic_sequences,
    referenced_classes,
)
from .sequences import DYNAMIC, STATIC, CallSequence, dump_sequences, load_sequences, merge
from .static import collect_static_sequences, method_sequences

__all__ = [
    "MAX_PATHS", "build_cfg", "enumerate_paths",
    "TEST_SEEDING_UNAVAILABLE", "carve_objects", "class_dependencies", "clone_tests",
    "collect_dynamic_sequences", "referenced_classes",
    "DYNAMIC", "STATIC", "CallSequence", "dump_sequences", "load_sequences", "merge",
    "collect_static_sequences", "method_sequences",
]
