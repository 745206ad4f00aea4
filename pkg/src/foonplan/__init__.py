"""Parse FOON subgraph files, merge them into a universal network, and
retrieve task trees for goal objects."""

from .export import DotDocument, from_structured_dump, to_dot, to_structured_dump
from .graph import NetworkStats, UniversalFOON, merge, producers_of, stats
from .model import (
    FunctionalUnit,
    GoalSpec,
    Kitchen,
    MissingMotionProbability,
    MotionNode,
    MotionProbabilities,
    ObjectIdentity,
    ObjectNode,
    StateDescriptor,
    Subgraph,
    TaskTree,
    UnitKey,
    canonical_unit,
    object_identity,
    unit_key,
)
from .parser import (
    DuplicateMotionWarning,
    ErrorKind,
    ParseError,
    load_kitchen,
    load_motion_probs,
    load_subgraph,
    parse_kitchen,
    parse_motion_probs,
    parse_state_spec,
    parse_subgraph,
    serialize_kitchen,
    serialize_motion_probs,
    serialize_subgraph,
    serialize_units,
)
from .planner import (
    DecisionEvent,
    DecisionTrace,
    PlanError,
    PlanErrorKind,
    Strategy,
    StrategyKind,
    Violation,
    resolve_goal,
    retrieve,
    select_first,
    select_max_success,
    select_min_inputs,
    unique_input_count,
    validate_task_tree,
)

__version__ = "0.1.0"
