"""Task-tree retrieval over a universal FOON.

The search works backwards from the goal object.  Each object taken off the
frontier is either available in the kitchen, already expanded, or resolved by
picking one of the units that output it; that unit's inputs go back on the
frontier.  The recorded units, reversed, are the task tree.

Four strategies differ only in frontier discipline and candidate choice:

========================  ========  ===========================================
kind                      frontier  candidate
========================  ========  ===========================================
``FirstCandidate``        FIFO      first producer in network order
``IterativeDeepening``    LIFO      first producer, depth-bounded with restarts
``MaxMotionSuccess``      FIFO      highest motion success probability
``MinUniqueInputs``       FIFO      fewest unique input ingredients
========================  ========  ===========================================
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Sequence, Union

from .graph import UniversalFOON, producers_of
from .model import (
    FunctionalUnit,
    GoalSpec,
    Kitchen,
    MotionProbabilities,
    ObjectIdentity,
    ObjectNode,
    TaskTree,
    UnitKey,
    object_identity,
    unit_key,
)

DEFAULT_MAX_DEPTH = 50


class StrategyKind(str, enum.Enum):
    FIRST_CANDIDATE = "FirstCandidate"
    ITERATIVE_DEEPENING = "IterativeDeepening"
    MAX_MOTION_SUCCESS = "MaxMotionSuccess"
    MIN_UNIQUE_INPUTS = "MinUniqueInputs"


@dataclass(frozen=True)
class Strategy:
    kind: StrategyKind = StrategyKind.FIRST_CANDIDATE
    probs: Optional[MotionProbabilities] = None
    max_depth_cap: int = DEFAULT_MAX_DEPTH

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", StrategyKind(self.kind))
        if self.kind is StrategyKind.MAX_MOTION_SUCCESS and self.probs is None:
            raise ValueError("MaxMotionSuccess needs motion probabilities")
        if int(self.max_depth_cap) < 1:
            raise ValueError(f"max_depth_cap must be positive, got {self.max_depth_cap}")

    @classmethod
    def first_candidate(cls) -> Strategy:
        return cls(StrategyKind.FIRST_CANDIDATE)

    @classmethod
    def iterative_deepening(cls, max_depth_cap: int = DEFAULT_MAX_DEPTH) -> Strategy:
        return cls(StrategyKind.ITERATIVE_DEEPENING, max_depth_cap=max_depth_cap)

    @classmethod
    def max_motion_success(cls, probs: MotionProbabilities) -> Strategy:
        return cls(StrategyKind.MAX_MOTION_SUCCESS, probs=probs)

    @classmethod
    def min_unique_inputs(cls) -> Strategy:
        return cls(StrategyKind.MIN_UNIQUE_INPUTS)


class PlanErrorKind(str, enum.Enum):
    UNREACHABLE_OBJECT = "UnreachableObject"
    GOAL_NOT_IN_NETWORK = "GoalNotInNetwork"
    DEPTH_CAP_EXCEEDED = "DepthCapExceeded"


class PlanError(Exception):
    def __init__(
        self,
        kind: PlanErrorKind,
        object: Optional[ObjectIdentity] = None,
        depth: Optional[int] = None,
        detail: str = "",
    ):
        self.kind = PlanErrorKind(kind)
        self.object = object
        self.depth = depth
        self.detail = detail
        super().__init__(str(self))

    def __str__(self) -> str:
        text = {
            PlanErrorKind.UNREACHABLE_OBJECT: "unreachable object",
            PlanErrorKind.GOAL_NOT_IN_NETWORK: "goal not in network",
            PlanErrorKind.DEPTH_CAP_EXCEEDED: "depth cap exceeded",
        }[self.kind]
        if self.object is not None:
            text += f" {self.object.canonical()}"
        if self.depth is not None:
            text += f" (depth {self.depth})"
        if self.detail:
            text += f": {self.detail}"
        return text


class DecisionEvent(NamedTuple):
    object: ObjectIdentity
    candidates: tuple[UnitKey, ...]
    chosen_index: int
    score: Union[float, int]


@dataclass(frozen=True)
class DecisionTrace:
    """Selection events of the returned search, plus frontier bookkeeping.

    ``peak_frontier`` is the largest frontier size seen over every iteration;
    ``max_depth`` is the final depth bound for iterative deepening, else None.
    """

    events: tuple[DecisionEvent, ...] = ()
    peak_frontier: int = 0
    max_depth: Optional[int] = None
    restarts: int = 0

    def __len__(self) -> int:
        return len(self.events)


@dataclass(frozen=True)
class Violation:
    step: Optional[int]
    identity: ObjectIdentity
    reason: str

    def __str__(self) -> str:
        where = "after last step" if self.step is None else f"step {self.step}"
        return f"{where}: {self.reason} {self.identity.canonical()}"


def select_first(candidates: Sequence[FunctionalUnit]) -> int:
    if not candidates:
        raise ValueError("no candidates")
    return 0


def select_max_success(candidates: Sequence[FunctionalUnit], probs: MotionProbabilities) -> int:
    """Index of the first candidate whose motion has the highest probability."""
    best, index = -1.0, -1
    for i, unit in enumerate(candidates):
        p = probs.lookup(unit.motion.name)
        if p > best:
            best, index = p, i
    if index < 0:
        raise ValueError("no candidates")
    return index


def unique_input_count(unit: FunctionalUnit) -> int:
    """Distinct ingredient names among the inputs.

    A container with contents counts its contents instead of itself, and a
    name seen both inside a container and as a separate input counts once.
    """
    names: set[str] = set()
    for node in unit.inputs:
        contents = node.contained_ingredients()
        if contents:
            names.update(contents)
        else:
            names.add(node.name.lower())
    return len(names)


def select_min_inputs(candidates: Sequence[FunctionalUnit]) -> int:
    best, index = float("inf"), -1
    for i, unit in enumerate(candidates):
        count = unique_input_count(unit)
        if count < best:
            best, index = count, i
    if index < 0:
        raise ValueError("no candidates")
    return index


def needed_inputs(unit: FunctionalUnit) -> list[ObjectNode]:
    """Inputs that must be obtained separately.

    An input whose name is already listed in the contents of another input of
    the same unit is covered by that container and left out.
    """
    needed = []
    for i, node in enumerate(unit.inputs):
        name = node.name.lower()
        covered = any(name in other.contained_ingredients() for j, other in enumerate(unit.inputs) if j != i)
        if not covered:
            needed.append(node)
    return needed


def resolve_goal(net: UniversalFOON, kitchen: Kitchen, goal: GoalSpec) -> ObjectIdentity:
    """Pick the network or kitchen object that best matches ``goal``.

    Among objects with the goal's name and all required states, the one with
    the fewest states wins; ties go to the smallest canonical form.
    """
    name = goal.name.lower()
    required = {s.key for s in goal.required_states}
    matches = [
        ident
        for ident in list(net.producer_index) + sorted(kitchen.identities)
        if ident.name == name and required <= set(ident.state_keys)
    ]
    if not matches:
        raise PlanError(PlanErrorKind.GOAL_NOT_IN_NETWORK, detail=goal_label(goal))
    return min(matches, key=lambda ident: (len(ident.state_keys), ident.canonical()))


def goal_label(goal: GoalSpec) -> str:
    if not goal.required_states:
        return goal.name
    return f"{goal.name}[{','.join(str(s) for s in goal.required_states)}]"


def validate_task_tree(
    tree: Union[TaskTree, Sequence[FunctionalUnit]],
    kitchen: Kitchen,
    goal_identity: ObjectIdentity,
) -> Optional[Violation]:
    """Simulate the steps forward; return the first violation, or None if executable."""
    steps = tree.steps if isinstance(tree, TaskTree) else tuple(tree)
    available = set(kitchen.identities)
    for i, unit in enumerate(steps):
        for node in needed_inputs(unit):
            ident = object_identity(node)
            if ident not in available:
                return Violation(i, ident, "input not available")
        available.update(object_identity(o) for o in unit.outputs)
    if goal_identity not in available:
        return Violation(None, goal_identity, "goal never produced")
    return None


def _executable_order(units: Sequence[FunctionalUnit], kitchen: Kitchen) -> Optional[list[FunctionalUnit]]:
    # stable topological sort: always take the earliest unit whose inputs are ready
    available = set(kitchen.identities)
    remaining = list(units)
    ordered = []
    while remaining:
        for i, unit in enumerate(remaining):
            if all(object_identity(n) in available for n in needed_inputs(unit)):
                break
        else:
            return None
        ordered.append(remaining.pop(i))
        available.update(object_identity(o) for o in unit.outputs)
    return ordered


Chooser = Callable[[Sequence[FunctionalUnit]], tuple[int, Union[float, int]]]


def _chooser(strategy: Strategy) -> Chooser:
    kind = strategy.kind
    if kind is StrategyKind.MAX_MOTION_SUCCESS:
        probs = strategy.probs

        def choose(cands):
            i = select_max_success(cands, probs)
            return i, probs.lookup(cands[i].motion.name)

    elif kind is StrategyKind.MIN_UNIQUE_INPUTS:

        def choose(cands):
            i = select_min_inputs(cands)
            return i, unique_input_count(cands[i])

    else:

        def choose(cands):
            return select_first(cands), 0

    return choose


@dataclass
class _Pass:
    recorded: list[FunctionalUnit]
    events: list[DecisionEvent]
    peak_frontier: int
    overflow: Optional[tuple[ObjectIdentity, int]] = None


def _search(
    net: UniversalFOON,
    kitchen: Kitchen,
    goal_id: ObjectIdentity,
    choose: Chooser,
    lifo: bool,
    depth_limit: Optional[int],
) -> _Pass:
    frontier: deque[tuple[ObjectIdentity, int]] = deque([(goal_id, 0)])
    queued = {goal_id}
    expanded: set[ObjectIdentity] = set()
    recorded: list[FunctionalUnit] = []
    recorded_keys: set[UnitKey] = set()
    events: list[DecisionEvent] = []
    peak = 1

    while frontier:
        ident, depth = frontier.pop() if lifo else frontier.popleft()
        if depth_limit is not None and depth > depth_limit:
            return _Pass(recorded, events, peak, overflow=(ident, depth))
        if ident in kitchen or ident in expanded:
            continue
        expanded.add(ident)

        candidates = producers_of(net, ident)
        if not candidates:
            raise PlanError(PlanErrorKind.UNREACHABLE_OBJECT, ident, depth,
                            "not in kitchen and no unit produces it")
        index, score = choose(candidates)
        keys = tuple(unit_key(u) for u in candidates)
        events.append(DecisionEvent(ident, keys, index, score))

        unit = candidates[index]
        if keys[index] not in recorded_keys:
            recorded_keys.add(keys[index])
            recorded.append(unit)

        for node in needed_inputs(unit):
            child = object_identity(node)
            if child in queued:
                continue
            queued.add(child)
            frontier.append((child, depth + 1))
        peak = max(peak, len(frontier))

    return _Pass(recorded, events, peak)


def retrieve(
    net: UniversalFOON,
    kitchen: Kitchen,
    goal: GoalSpec,
    strategy: Optional[Strategy] = None,
) -> tuple[TaskTree, DecisionTrace]:
    """Retrieve an executable task tree for ``goal``.

    Raises :class:`PlanError` when the goal cannot be matched, some needed
    object can be neither found in the kitchen nor produced, or iterative
    deepening runs past its cap.  Under ``MaxMotionSuccess`` a motion missing
    from the probability table (with no default) raises
    :class:`~foonplan.model.MissingMotionProbability`.
    """
    strategy = strategy or Strategy()
    goal_id = resolve_goal(net, kitchen, goal)
    choose = _chooser(strategy)

    if strategy.kind is StrategyKind.ITERATIVE_DEEPENING:
        limit, restarts, peak = 1, 0, 0
        while True:
            result = _search(net, kitchen, goal_id, choose, lifo=True, depth_limit=limit)
            peak = max(peak, result.peak_frontier)
            if result.overflow is None:
                break
            if limit >= strategy.max_depth_cap:
                raise PlanError(PlanErrorKind.DEPTH_CAP_EXCEEDED, result.overflow[0], limit)
            limit += 1
            restarts += 1
        trace = DecisionTrace(tuple(result.events), peak, limit, restarts)
    else:
        result = _search(net, kitchen, goal_id, choose, lifo=False, depth_limit=None)
        trace = DecisionTrace(tuple(result.events), result.peak_frontier)

    steps = result.recorded[::-1]
    violation = validate_task_tree(steps, kitchen, goal_id)
    if violation is not None:
        ordered = _executable_order(steps, kitchen)
        if ordered is None:
            # chosen producers depend on each other in a cycle
            raise PlanError(PlanErrorKind.UNREACHABLE_OBJECT, violation.identity,
                            detail="selected units form a dependency cycle")
        steps = ordered
    return TaskTree(tuple(steps), goal), trace
