"""DOT and JSON renderings of unit lists."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .model import FunctionalUnit, MotionNode, ObjectNode, StateDescriptor, object_identity


@dataclass(frozen=True)
class DotDocument:
    text: str

    def __str__(self) -> str:
        return self.text


def _quote(value: str) -> str:
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def _object_label(node: ObjectNode) -> str:
    ident = object_identity(node)
    states = ",".join(
        f"{label}{{{','.join(ings)}}}" if ings else label for label, ings in ident.state_keys
    )
    return f"{ident.name}\n{states}" if states else ident.name


def to_dot(units: Sequence[FunctionalUnit], name: str = "foon") -> DotDocument:
    """Render units as a digraph: objects are ellipses, motions are boxes.

    Object vertices are shared by identity, so a chain of units shows up as a
    connected graph.  Motion vertex ``i`` is labelled ``"<motion> (i)"``.
    """
    objects: dict[str, str] = {}
    motions: list[str] = []
    edges: list[str] = []
    for i, unit in enumerate(units):
        motion_id = f"motion_{i}"
        motions.append(f"  {_quote(motion_id)} [shape=box, label={_quote(f'{unit.motion.name} ({i})')}];")
        for node in unit.inputs:
            vid = object_identity(node).canonical()
            objects.setdefault(vid, _object_label(node))
            edges.append(f"  {_quote(vid)} -> {_quote(motion_id)};")
        for node in unit.outputs:
            vid = object_identity(node).canonical()
            objects.setdefault(vid, _object_label(node))
            edges.append(f"  {_quote(motion_id)} -> {_quote(vid)};")

    lines = [f"digraph {_quote(name)} {{"]
    lines += [f"  {_quote(vid)} [shape=ellipse, label={_quote(label)}];" for vid, label in sorted(objects.items())]
    lines += motions
    lines += edges
    lines.append("}")
    return DotDocument("\n".join(lines) + "\n")


def _object_dict(node: ObjectNode) -> dict:
    return {
        "name": node.name,
        "motion_flag": node.motion_flag,
        "states": [{"label": s.label, "ingredients": list(s.ingredients)} for s in node.states],
    }


def to_structured_dump(units: Iterable[FunctionalUnit]) -> str:
    """JSON dump of the units with a fixed field order."""
    payload = {
        "units": [
            {
                "inputs": [_object_dict(o) for o in unit.inputs],
                "motion": {"name": unit.motion.name, "timestamp": unit.motion.timestamp_raw},
                "outputs": [_object_dict(o) for o in unit.outputs],
            }
            for unit in units
        ]
    }
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def _object_from_dict(data: dict) -> ObjectNode:
    states = tuple(StateDescriptor(s["label"], tuple(s.get("ingredients", ()))) for s in data.get("states", ()))
    return ObjectNode(data["name"], int(data["motion_flag"]), states)


def from_structured_dump(text: str) -> list[FunctionalUnit]:
    data = json.loads(text)
    return [
        FunctionalUnit(
            tuple(_object_from_dict(o) for o in u["inputs"]),
            MotionNode(u["motion"]["name"], u["motion"].get("timestamp")),
            tuple(_object_from_dict(o) for o in u["outputs"]),
        )
        for u in data["units"]
    ]
