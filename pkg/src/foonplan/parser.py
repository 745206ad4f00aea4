"""Reading and writing the FOON text formats.

A subgraph file is a sequence of functional units separated by ``//`` lines::

    O carrot 0
    S orange
    S unpeeled
    M peel <0:24,0:26>
    O carrot 0
    S peeled
    //

``O`` blocks before the ``M`` line are inputs, those after it are outputs.  A
state may carry a contents list: ``S contains {salt,pepper}``.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterator, Optional, Union

from .model import (
    FunctionalUnit,
    Kitchen,
    MotionNode,
    MotionProbabilities,
    ObjectNode,
    StateDescriptor,
    Subgraph,
)

Source = Union[str, bytes, IO[str], IO[bytes]]


class ErrorKind(str, enum.Enum):
    UNKNOWN_LINE_TAG = "UnknownLineTag"
    MISSING_MOTION = "MissingMotion"
    MULTIPLE_MOTIONS = "MultipleMotions"
    EMPTY_INPUTS = "EmptyInputs"
    EMPTY_OUTPUTS = "EmptyOutputs"
    BAD_MOTION_FLAG = "BadMotionFlag"
    BAD_PROBABILITY = "BadProbability"
    DANGLING_STATE = "DanglingState"
    UNTERMINATED_UNIT = "UnterminatedUnit"
    MALFORMED_LINE = "MalformedLine"


class ParseError(ValueError):
    def __init__(self, file: str, line: int, kind: ErrorKind, detail: str = ""):
        self.file = file
        self.line = line
        self.kind = ErrorKind(kind)
        self.detail = detail
        super().__init__(str(self))

    def __str__(self) -> str:
        msg = f"{self.file}:{self.line}: {self.kind.value}"
        return f"{msg}: {self.detail}" if self.detail else msg


class DuplicateMotionWarning(UserWarning):
    pass


def _read_text(source: Source, label: str) -> str:
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, (bytes, bytearray)):
        try:
            return bytes(source).decode("utf-8")
        except UnicodeDecodeError as exc:
            line = bytes(source)[: exc.start].count(b"\n") + 1
            raise ParseError(label, line, ErrorKind.MALFORMED_LINE, "invalid UTF-8") from None
    return source


def _lines(text: str) -> Iterator[tuple[int, list[str], str]]:
    """Yield (line number, tokens, stripped line) for meaningful lines."""
    for number, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield number, line.split(), line


def _tag(tokens: list[str]) -> str:
    tag = tokens[0]
    return tag if tag == "//" else tag.upper()


def _parse_object(tokens: list[str], label: str, number: int) -> tuple[str, int]:
    if len(tokens) < 2:
        raise ParseError(label, number, ErrorKind.MALFORMED_LINE, "O line without object name")
    if len(tokens) < 3:
        raise ParseError(label, number, ErrorKind.BAD_MOTION_FLAG,
                         f"object {tokens[1]!r} has no motion flag")
    if tokens[2] not in ("0", "1"):
        raise ParseError(label, number, ErrorKind.BAD_MOTION_FLAG,
                         f"motion flag must be 0 or 1, got {tokens[2]!r}")
    if len(tokens) > 3:
        raise ParseError(label, number, ErrorKind.MALFORMED_LINE,
                         f"unexpected tokens after motion flag: {' '.join(tokens[3:])!r}")
    return tokens[1].lower(), int(tokens[2])


def _parse_state(line: str, tag: str, label: str, number: int) -> StateDescriptor:
    rest = line[len(tag):].strip()
    ingredients: tuple[str, ...] = ()
    if "{" in rest or "}" in rest:
        head, sep, body = rest.partition("{")
        if not sep or not body.endswith("}") or "{" in body or "}" in body[:-1]:
            raise ParseError(label, number, ErrorKind.MALFORMED_LINE, f"bad ingredient list in {rest!r}")
        rest = head.strip()
        inner = body[:-1].strip()
        if inner:
            items = [item.strip().lower() for item in inner.split(",")]
            if any(not item or any(c.isspace() for c in item) for item in items):
                raise ParseError(label, number, ErrorKind.MALFORMED_LINE,
                                 f"empty or multi-word ingredient in {{{inner}}}")
            ingredients = tuple(dict.fromkeys(items))
    parts = rest.split()
    if len(parts) != 1:
        raise ParseError(label, number, ErrorKind.MALFORMED_LINE,
                         "S line needs exactly one state label")
    try:
        return StateDescriptor(parts[0].lower(), ingredients)
    except ValueError as exc:
        raise ParseError(label, number, ErrorKind.MALFORMED_LINE, str(exc)) from None


def parse_state_spec(text: str, source_label: str = "<argument>") -> StateDescriptor:
    """Parse a state written as ``label`` or ``label{a,b}``."""
    return _parse_state(text.strip(), "", source_label, 1)


def _parse_motion(line: str, tokens: list[str], label: str, number: int) -> MotionNode:
    if len(tokens) < 2:
        raise ParseError(label, number, ErrorKind.MALFORMED_LINE, "M line without motion name")
    # timestamp is everything after the name, verbatim
    rest = line[len(tokens[0]):].lstrip()
    rest = rest[len(tokens[1]):].strip()
    try:
        return MotionNode(tokens[1].lower(), rest or None)
    except ValueError as exc:
        raise ParseError(label, number, ErrorKind.MALFORMED_LINE, str(exc)) from None


@dataclass
class _ObjectBuilder:
    name: str
    flag: int
    states: list[StateDescriptor] = field(default_factory=list)

    def build(self) -> ObjectNode:
        return ObjectNode(self.name, self.flag, tuple(self.states))


@dataclass
class _UnitBuilder:
    label: str
    inputs: list[ObjectNode] = field(default_factory=list)
    outputs: list[ObjectNode] = field(default_factory=list)
    motion: Optional[MotionNode] = None
    current: Optional[_ObjectBuilder] = None
    has_content: bool = False

    def flush(self) -> None:
        if self.current is not None:
            side = self.outputs if self.motion is not None else self.inputs
            side.append(self.current.build())
            self.current = None

    def complete(self) -> bool:
        return self.motion is not None and bool(self.outputs)


def parse_subgraph(source: Source, source_label: str = "<string>") -> Subgraph:
    """Parse subgraph text into a :class:`Subgraph`; raises :class:`ParseError`."""
    label = source_label
    text = _read_text(source, label)
    units: list[FunctionalUnit] = []
    unit = _UnitBuilder(label)
    last_line = 0

    for number, tokens, line in _lines(text):
        last_line = number
        tag = _tag(tokens)
        if tag == "//":
            if len(tokens) > 1:
                raise ParseError(label, number, ErrorKind.MALFORMED_LINE, "text after '//'")
            unit.flush()
            if unit.has_content:
                if unit.motion is None:
                    raise ParseError(label, number, ErrorKind.MISSING_MOTION,
                                     "unit closed without an M line")
                if not unit.outputs:
                    raise ParseError(label, number, ErrorKind.EMPTY_OUTPUTS,
                                     f"motion {unit.motion.name!r} has no outputs")
                units.append(FunctionalUnit(tuple(unit.inputs), unit.motion, tuple(unit.outputs)))
            unit = _UnitBuilder(label)
            continue

        unit.has_content = True
        if tag == "O":
            unit.flush()
            name, flag = _parse_object(tokens, label, number)
            unit.current = _ObjectBuilder(name, flag)
        elif tag == "S":
            if unit.current is None:
                raise ParseError(label, number, ErrorKind.DANGLING_STATE, "S line outside an object block")
            unit.current.states.append(_parse_state(line, tokens[0], label, number))
        elif tag == "M":
            if unit.motion is not None:
                raise ParseError(label, number, ErrorKind.MULTIPLE_MOTIONS,
                                 f"second motion {tokens[1:2]} in one unit")
            unit.flush()
            if not unit.inputs:
                raise ParseError(label, number, ErrorKind.EMPTY_INPUTS, "motion has no input objects")
            unit.motion = _parse_motion(line, tokens, label, number)
        else:
            raise ParseError(label, number, ErrorKind.UNKNOWN_LINE_TAG, f"unknown tag {tokens[0]!r}")

    unit.flush()
    if unit.has_content:
        if not unit.complete():
            raise ParseError(label, last_line, ErrorKind.UNTERMINATED_UNIT,
                             "end of file inside an incomplete unit")
        units.append(FunctionalUnit(tuple(unit.inputs), unit.motion, tuple(unit.outputs)))
    return Subgraph(tuple(units), source_label)


def _object_lines(node: ObjectNode) -> list[str]:
    lines = [f"O\t{node.name}\t{node.motion_flag}"]
    for state in node.states:
        if state.ingredients:
            lines.append(f"S\t{state.label}\t{{{','.join(state.ingredients)}}}")
        else:
            lines.append(f"S\t{state.label}")
    return lines


def serialize_units(units) -> str:
    lines: list[str] = []
    for unit in units:
        for node in unit.inputs:
            lines.extend(_object_lines(node))
        motion = unit.motion
        lines.append(f"M\t{motion.name}\t{motion.timestamp_raw}" if motion.timestamp_raw else f"M\t{motion.name}")
        for node in unit.outputs:
            lines.extend(_object_lines(node))
        lines.append("//")
    return "".join(line + "\n" for line in lines)


def serialize_subgraph(sub: Subgraph) -> str:
    return serialize_units(sub.units)


def parse_kitchen(source: Source, source_label: str = "<kitchen>") -> Kitchen:
    """Parse a kitchen file: ``O``/``S`` blocks only, ``//`` lines ignored."""
    label = source_label
    text = _read_text(source, label)
    nodes: list[ObjectNode] = []
    current: Optional[_ObjectBuilder] = None
    for number, tokens, line in _lines(text):
        tag = _tag(tokens)
        if tag == "//":
            continue
        if tag == "O":
            if current is not None:
                nodes.append(current.build())
            name, flag = _parse_object(tokens, label, number)
            current = _ObjectBuilder(name, flag)
        elif tag == "S":
            if current is None:
                raise ParseError(label, number, ErrorKind.DANGLING_STATE, "S line outside an object block")
            current.states.append(_parse_state(line, tokens[0], label, number))
        else:
            raise ParseError(label, number, ErrorKind.UNKNOWN_LINE_TAG,
                             f"tag {tokens[0]!r} not allowed in a kitchen file")
    if current is not None:
        nodes.append(current.build())
    return Kitchen(tuple(nodes))


def serialize_kitchen(kitchen: Kitchen) -> str:
    lines = [line for node in kitchen.entries for line in _object_lines(node)]
    return "".join(line + "\n" for line in lines)


def parse_motion_probs(source: Source, source_label: str = "<motion-probs>") -> MotionProbabilities:
    """Parse ``name<TAB>probability`` lines.

    Repeated motion names keep the last value and emit a
    :class:`DuplicateMotionWarning`.
    """
    label = source_label
    text = _read_text(source, label)
    table: dict[str, float] = {}
    for number, tokens, _ in _lines(text):
        if len(tokens) > 2:
            raise ParseError(label, number, ErrorKind.MALFORMED_LINE,
                             "expected '<motion> <probability>'")
        name = tokens[0].lower()
        if len(tokens) < 2:
            raise ParseError(label, number, ErrorKind.BAD_PROBABILITY, f"no probability for {name!r}")
        try:
            p = float(tokens[1])
        except ValueError:
            raise ParseError(label, number, ErrorKind.BAD_PROBABILITY,
                             f"{tokens[1]!r} is not a number") from None
        if math.isnan(p) or not 0.0 <= p <= 1.0:
            raise ParseError(label, number, ErrorKind.BAD_PROBABILITY, f"{tokens[1]} is outside [0, 1]")
        if name in table:
            warnings.warn(f"{label}:{number}: motion {name!r} listed again, keeping {p}",
                          DuplicateMotionWarning, stacklevel=2)
        table[name] = p
    return MotionProbabilities(table)


def serialize_motion_probs(probs: MotionProbabilities) -> str:
    return "".join(f"{name}\t{p!r}\n" for name, p in probs.table.items())


def load_subgraph(path: Union[str, Path]) -> Subgraph:
    path = Path(path)
    return parse_subgraph(path.read_bytes(), str(path))


def load_kitchen(path: Union[str, Path]) -> Kitchen:
    path = Path(path)
    return parse_kitchen(path.read_bytes(), str(path))


def load_motion_probs(path: Union[str, Path]) -> MotionProbabilities:
    path = Path(path)
    return parse_motion_probs(path.read_bytes(), str(path))


__all__ = [
    "DuplicateMotionWarning",
    "ErrorKind",
    "ParseError",
    "load_kitchen",
    "load_motion_probs",
    "load_subgraph",
    "parse_kitchen",
    "parse_motion_probs",
    "parse_state_spec",
    "parse_subgraph",
    "serialize_kitchen",
    "serialize_motion_probs",
    "serialize_subgraph",
    "serialize_units",
]
