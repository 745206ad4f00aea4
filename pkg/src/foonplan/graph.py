"""Universal FOON assembly: merge subgraphs, drop exact repeats, index producers."""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping

from .model import FunctionalUnit, ObjectIdentity, Subgraph, UnitKey, object_identity, unit_key


@dataclass(frozen=True)
class UniversalFOON:
    units: tuple[FunctionalUnit, ...] = ()
    sources: tuple[str, ...] = ()
    key_set: frozenset[UnitKey] = field(init=False, repr=False, compare=False)
    producer_index: Mapping[ObjectIdentity, tuple[int, ...]] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        units = tuple(self.units)
        keys = [unit_key(u) for u in units]
        if len(set(keys)) != len(keys):
            raise ValueError("UniversalFOON units must have distinct keys; use merge()")
        index: dict[ObjectIdentity, list[int]] = {}
        for pos, unit in enumerate(units):
            for out in unit.outputs:
                positions = index.setdefault(object_identity(out), [])
                if not positions or positions[-1] != pos:
                    positions.append(pos)
        object.__setattr__(self, "units", units)
        object.__setattr__(self, "sources", tuple(self.sources))
        object.__setattr__(self, "key_set", frozenset(keys))
        object.__setattr__(
            self, "producer_index", MappingProxyType({k: tuple(v) for k, v in index.items()})
        )

    def __len__(self) -> int:
        return len(self.units)

    def as_subgraph(self, label: str = "universal") -> Subgraph:
        return Subgraph(self.units, label)


@dataclass(frozen=True)
class NetworkStats:
    unit_count: int
    unique_motion_count: int
    unique_object_identity_count: int
    source_count: int

    def __str__(self) -> str:
        return (
            f"units={self.unit_count} motions={self.unique_motion_count} "
            f"objects={self.unique_object_identity_count} sources={self.source_count}"
        )


def merge(subgraphs: Iterable[Subgraph]) -> UniversalFOON:
    """Concatenate subgraphs in order, keeping the first unit seen for each key."""
    seen: set[UnitKey] = set()
    kept: list[FunctionalUnit] = []
    sources: list[str] = []
    for sub in subgraphs:
        sources.append(sub.source_label)
        for unit in sub.units:
            key = unit_key(unit)
            if key in seen:
                continue
            seen.add(key)
            kept.append(unit)
    return UniversalFOON(tuple(kept), tuple(sources))


def producers_of(net: UniversalFOON, identity: ObjectIdentity) -> list[FunctionalUnit]:
    return [net.units[i] for i in net.producer_index.get(identity, ())]


def stats(net: UniversalFOON) -> NetworkStats:
    motions = {u.motion.name.lower() for u in net.units}
    objects = {object_identity(o) for u in net.units for o in u.inputs + u.outputs}
    return NetworkStats(
        unit_count=len(net.units),
        unique_motion_count=len(motions),
        unique_object_identity_count=len(objects),
        source_count=len(dict.fromkeys(net.sources)),
    )
