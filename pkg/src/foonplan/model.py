"""Domain types for functional object-oriented networks (FOON).

Everything here is immutable.  Names are opaque tokens; the parser lower-cases
them, and the identity/key functions lower-case again so hand-built values
compare the same way as parsed ones.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Optional

RESERVED_LABELS = frozenset({"o", "m", "s", "//"})
_WHITESPACE = re.compile(r"\s")


def _check_token(value: str, what: str, forbidden: str = "") -> None:
    if not isinstance(value, str) or not value:
        raise ValueError(f"{what} must be a non-empty string")
    if _WHITESPACE.search(value):
        raise ValueError(f"{what} {value!r} contains whitespace")
    bad = [c for c in forbidden if c in value]
    if bad:
        raise ValueError(f"{what} {value!r} contains {bad[0]!r}")


StateKey = tuple[str, tuple[str, ...]]


@dataclass(frozen=True)
class StateDescriptor:
    """One ``S`` line: a label plus an optional contents list.

    ``ingredients`` keeps file order; identity comparisons use :attr:`key`.
    """

    label: str
    ingredients: tuple[str, ...] = ()
    key: StateKey = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        _check_token(self.label, "state label", "{},")
        if self.label.lower() in RESERVED_LABELS:
            raise ValueError(f"state label {self.label!r} is a reserved tag")
        object.__setattr__(self, "ingredients", tuple(self.ingredients))
        seen = set()
        for item in self.ingredients:
            _check_token(item, "ingredient", "{},")
            low = item.lower()
            if low in seen:
                raise ValueError(f"duplicate ingredient {item!r} in state {self.label!r}")
            seen.add(low)
        object.__setattr__(self, "key", (self.label.lower(), tuple(sorted(seen))))

    def __str__(self) -> str:
        if self.ingredients:
            return f"{self.label}{{{','.join(self.ingredients)}}}"
        return self.label


def _dedup_states(states: Iterable[StateDescriptor]) -> tuple[StateDescriptor, ...]:
    seen: set[StateKey] = set()
    out = []
    for s in states:
        if s.key not in seen:
            seen.add(s.key)
            out.append(s)
    return tuple(out)


class ObjectIdentity(NamedTuple):
    """Matching key for an object: name plus sorted state keys, no motion flag."""

    name: str
    state_keys: tuple[StateKey, ...]

    def canonical(self) -> str:
        parts = []
        for label, ingredients in self.state_keys:
            parts.append(f"{label}{{{','.join(ingredients)}}}" if ingredients else label)
        return f"{self.name}[{','.join(parts)}]"


@dataclass(frozen=True)
class ObjectNode:
    name: str
    motion_flag: int = 0
    states: tuple[StateDescriptor, ...] = ()

    def __post_init__(self) -> None:
        _check_token(self.name, "object name")
        if self.motion_flag not in (0, 1) or isinstance(self.motion_flag, bool):
            raise ValueError(f"motion flag must be 0 or 1, got {self.motion_flag!r}")
        # duplicate S lines collapse silently, first occurrence kept
        object.__setattr__(self, "states", _dedup_states(self.states))

    @property
    def identity(self) -> ObjectIdentity:
        return object_identity(self)

    def contained_ingredients(self) -> tuple[str, ...]:
        """Lower-cased contents across all states, in first-seen order."""
        out: dict[str, None] = {}
        for s in self.states:
            for item in s.ingredients:
                out.setdefault(item.lower(), None)
        return tuple(out)


@dataclass(frozen=True)
class MotionNode:
    name: str
    timestamp_raw: Optional[str] = None

    def __post_init__(self) -> None:
        _check_token(self.name, "motion name")
        ts = self.timestamp_raw
        if ts is not None:
            if not (len(ts) >= 2 and ts.startswith("<") and ts.endswith(">")):
                raise ValueError(f"timestamp {ts!r} must be enclosed in '<' and '>'")
            if "\n" in ts or "\r" in ts:
                raise ValueError("timestamp must be a single line")


@dataclass(frozen=True)
class FunctionalUnit:
    inputs: tuple[ObjectNode, ...]
    motion: MotionNode
    outputs: tuple[ObjectNode, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        if not self.inputs:
            raise ValueError("functional unit needs at least one input")
        if not self.outputs:
            raise ValueError("functional unit needs at least one output")

    @property
    def key(self) -> UnitKey:
        return unit_key(self)


@dataclass(frozen=True, order=True)
class UnitKey:
    """Order-insensitive, timestamp-free serialization of a unit."""

    canonical_form: str

    def __str__(self) -> str:
        return self.canonical_form


@dataclass(frozen=True)
class Subgraph:
    units: tuple[FunctionalUnit, ...] = ()
    source_label: str = "<memory>"

    def __post_init__(self) -> None:
        object.__setattr__(self, "units", tuple(self.units))

    def __len__(self) -> int:
        return len(self.units)

    def __iter__(self):
        return iter(self.units)


@dataclass(frozen=True)
class Kitchen:
    """Objects available before any step runs; one entry per identity."""

    entries: tuple[ObjectNode, ...] = ()
    identities: frozenset[ObjectIdentity] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        seen: dict[ObjectIdentity, ObjectNode] = {}
        for node in self.entries:
            seen.setdefault(object_identity(node), node)
        object.__setattr__(self, "entries", tuple(seen.values()))
        object.__setattr__(self, "identities", frozenset(seen))

    def __contains__(self, item: object) -> bool:
        if isinstance(item, ObjectNode):
            item = object_identity(item)
        return item in self.identities

    def __len__(self) -> int:
        return len(self.entries)

    def with_entries(self, extra: Iterable[ObjectNode]) -> Kitchen:
        return Kitchen(self.entries + tuple(extra))


@dataclass(frozen=True)
class GoalSpec:
    name: str
    required_states: tuple[StateDescriptor, ...] = ()

    def __post_init__(self) -> None:
        _check_token(self.name, "goal name")
        object.__setattr__(self, "required_states", _dedup_states(self.required_states))


class MissingMotionProbability(KeyError):
    """A motion has no entry in the probability table and no default is set."""

    def __init__(self, motion: str):
        super().__init__(motion)
        self.motion = motion

    def __str__(self) -> str:
        return f"no success probability for motion {self.motion!r}"


def _check_probability(p: float, what: str) -> float:
    p = float(p)
    if math.isnan(p) or not 0.0 <= p <= 1.0:
        raise ValueError(f"{what} must be within [0, 1], got {p!r}")
    return p


@dataclass(frozen=True)
class MotionProbabilities:
    table: Mapping[str, float] = field(default_factory=dict)
    default: Optional[float] = None

    def __post_init__(self) -> None:
        clean = {str(k).lower(): _check_probability(v, f"probability of {k!r}")
                 for k, v in self.table.items()}
        object.__setattr__(self, "table", clean)
        if self.default is not None:
            object.__setattr__(self, "default", _check_probability(self.default, "default probability"))

    def __contains__(self, motion: str) -> bool:
        return motion.lower() in self.table

    def lookup(self, motion: str) -> float:
        try:
            return self.table[motion.lower()]
        except KeyError:
            if self.default is None:
                raise MissingMotionProbability(motion) from None
            return self.default

    def with_default(self, default: Optional[float]) -> MotionProbabilities:
        return MotionProbabilities(dict(self.table), default)


@dataclass(frozen=True)
class TaskTree:
    steps: tuple[FunctionalUnit, ...]
    goal: GoalSpec

    def __post_init__(self) -> None:
        object.__setattr__(self, "steps", tuple(self.steps))

    def __len__(self) -> int:
        return len(self.steps)


def object_identity(node: ObjectNode) -> ObjectIdentity:
    return ObjectIdentity(node.name.lower(), tuple(sorted(s.key for s in node.states)))


def _object_form(node: ObjectNode) -> list:
    ident = object_identity(node)
    return [ident.name, node.motion_flag, [[label, list(ings)] for label, ings in ident.state_keys]]


def unit_key(unit: FunctionalUnit) -> UnitKey:
    def side(objs):
        return sorted(json.dumps(_object_form(o), separators=(",", ":")) for o in objs)

    form = [side(unit.inputs), unit.motion.name.lower(), side(unit.outputs)]
    return UnitKey(json.dumps(form, separators=(",", ":")))


def canonical_object(node: ObjectNode) -> ObjectNode:
    states = sorted(
        (StateDescriptor(s.label.lower(), tuple(sorted(i.lower() for i in s.ingredients)))
         for s in node.states),
        key=lambda s: s.key,
    )
    return ObjectNode(node.name.lower(), node.motion_flag, tuple(states))


def canonical_unit(unit: FunctionalUnit) -> FunctionalUnit:
    """Lower-case everything and sort objects, states and ingredients.

    Timestamps are kept verbatim; they are not part of the unit key anyway.
    """

    def side(objs):
        objs = [canonical_object(o) for o in objs]
        return tuple(sorted(objs, key=lambda o: json.dumps(_object_form(o))))

    motion = MotionNode(unit.motion.name.lower(), unit.motion.timestamp_raw)
    return FunctionalUnit(side(unit.inputs), motion, side(unit.outputs))
