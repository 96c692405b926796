"""Pure-mixing and exact maps on the Gehman dendrite, built from graph-cover presentations."""
from .cover_core import (
    CoverSequence,
    LevelGraph,
    Subshift,
    build_subshift_presentation,
    thread_successor,
    validate_presentation,
)
from .dendrite import ArcPoint, Endpoint, Node, assign_codes, build_skeleton, metric
from .dynamics_f import FMap
from .errors import (
    AmbiguityError,
    CompatibilityError,
    ConstructionError,
    DepthRangeError,
    GehmanError,
    NotCantorError,
    StructuralError,
)
from .exact_mod import ExactMap, Nested, stage_check
from .system import GehmanSystem, SystemSpec

__version__ = "0.1.0"

__all__ = [
    "AmbiguityError", "ArcPoint", "CompatibilityError", "ConstructionError",
    "CoverSequence", "DepthRangeError", "Endpoint", "ExactMap", "FMap",
    "GehmanError", "GehmanSystem", "LevelGraph", "Nested", "Node",
    "NotCantorError", "StructuralError", "Subshift", "SystemSpec",
    "assign_codes", "build_skeleton", "build_subshift_presentation", "metric",
    "stage_check", "thread_successor", "validate_presentation",
]
