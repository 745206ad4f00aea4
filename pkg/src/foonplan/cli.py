"""Command-line entry point: ``foonplan {merge,plan,stats,validate,check-tree}``.

Exit status: 0 success, 1 parse error, 2 plan error, 3 usage error.
"""

from __future__ import annotations

import argparse
import os
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, TextIO

from .export import to_dot, to_structured_dump
from .graph import UniversalFOON, merge, stats
from .model import GoalSpec, Kitchen, MissingMotionProbability, MotionProbabilities, StateDescriptor, Subgraph
from .parser import (
    ParseError,
    load_kitchen,
    load_motion_probs,
    load_subgraph,
    parse_state_spec,
    serialize_units,
)
from .planner import (
    DEFAULT_MAX_DEPTH,
    PlanError,
    Strategy,
    StrategyKind,
    resolve_goal,
    retrieve,
    validate_task_tree,
)

EXIT_OK, EXIT_PARSE, EXIT_PLAN, EXIT_USAGE = 0, 1, 2, 3

ALGORITHMS = {
    "bfs": StrategyKind.FIRST_CANDIDATE,
    "ids": StrategyKind.ITERATIVE_DEEPENING,
    "h1": StrategyKind.MAX_MOTION_SUCCESS,
    "h2": StrategyKind.MIN_UNIQUE_INPUTS,
}
COMMANDS = ("merge", "plan", "stats", "validate", "check-tree")


class UsageError(Exception):
    pass


@dataclass
class CliConfig:
    command: str
    foon_paths: list[str] = field(default_factory=list)
    kitchen_path: Optional[str] = None
    goal_name: Optional[str] = None
    goal_states: list[str] = field(default_factory=list)
    algo: str = "bfs"
    motion_probs_path: Optional[str] = None
    default_motion_prob: Optional[float] = None
    max_depth: int = DEFAULT_MAX_DEPTH
    out_path: Optional[str] = None
    dot_path: Optional[str] = None
    dump_path: Optional[str] = None
    strict: bool = True

    def check(self) -> None:
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.algo not in ALGORITHMS:
            raise UsageError(f"unknown algorithm {self.algo!r}")
        if not self.foon_paths:
            raise UsageError(f"{self.command} needs at least one --foon file")
        if self.command in ("plan", "check-tree") and not self.goal_name:
            raise UsageError(f"{self.command} needs --goal")
        if self.command == "merge" and not self.out_path:
            raise UsageError("merge needs --out")
        if self.algo == "h1" and self.motion_probs_path is None and self.default_motion_prob is None:
            raise UsageError("--algo h1 needs --motion-probs or --default-motion-prob")
        if self.default_motion_prob is not None and not 0.0 <= self.default_motion_prob <= 1.0:
            raise UsageError("--default-motion-prob must be within [0, 1]")
        if self.max_depth < 1:
            raise UsageError("--max-depth must be positive")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--foon", dest="foon_paths", action="append", default=[], metavar="PATH",
                        help="FOON subgraph file (repeatable)")
    common.add_argument("--kitchen", dest="kitchen_path", metavar="PATH")
    common.add_argument("--goal", dest="goal_name", metavar="NAME")
    common.add_argument("--goal-state", dest="goal_states", action="append", default=[], metavar="STATE",
                        help="required goal state, 'label' or 'label{a,b}' (repeatable)")
    common.add_argument("--algo", choices=sorted(ALGORITHMS), default="bfs")
    common.add_argument("--motion-probs", dest="motion_probs_path", metavar="PATH")
    common.add_argument("--default-motion-prob", type=float, metavar="P")
    common.add_argument("--max-depth", type=int, default=DEFAULT_MAX_DEPTH)
    common.add_argument("--out", dest="out_path", metavar="PATH")
    common.add_argument("--dot", dest="dot_path", metavar="PATH")
    common.add_argument("--dump", dest="dump_path", metavar="PATH", help="write a JSON dump of the units")
    common.add_argument("--strict", action=argparse.BooleanOptionalAction, default=True,
                        help="fail when h1 meets a motion without probability and no default")

    parser = _Parser(prog="foonplan", description="FOON merging and task-tree retrieval")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "merge": "merge subgraph files into one universal FOON",
        "plan": "retrieve a task tree for a goal object",
        "stats": "print network statistics",
        "validate": "check that files parse",
        "check-tree": "check that a task tree file is executable",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def _use_color(stream: TextIO) -> bool:
    return not os.environ.get("FOONPLAN_NO_COLOR") and hasattr(stream, "isatty") and stream.isatty()


class _Console:
    def __init__(self, out: TextIO, err: TextIO):
        self.out, self.err = out, err
        self.color = _use_color(err)

    def info(self, msg: str) -> None:
        print(msg, file=self.out)

    def _diag(self, level: str, code: str, msg: str) -> None:
        prefix = f"\033[{code}m{level}:\033[0m" if self.color else f"{level}:"
        print(f"{prefix} {msg}", file=self.err)

    def error(self, msg: str) -> None:
        self._diag("error", "31", msg)

    def warn(self, msg: str) -> None:
        self._diag("warning", "33", msg)


def _write(path: str, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8", newline="")


def _load_network(paths: Sequence[str]) -> UniversalFOON:
    return merge(load_subgraph(p) for p in paths)


def _goal(cfg: CliConfig) -> GoalSpec:
    states: list[StateDescriptor] = [parse_state_spec(s, "--goal-state") for s in cfg.goal_states]
    try:
        return GoalSpec(cfg.goal_name.lower(), tuple(states))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _strategy(cfg: CliConfig) -> Strategy:
    kind = ALGORITHMS[cfg.algo]
    if kind is StrategyKind.MAX_MOTION_SUCCESS:
        probs = load_motion_probs(cfg.motion_probs_path) if cfg.motion_probs_path else MotionProbabilities()
        default = cfg.default_motion_prob
        if default is None and not cfg.strict:
            default = 0.0
        return Strategy(kind, probs=probs.with_default(default))
    return Strategy(kind, max_depth_cap=cfg.max_depth)


def _cmd_merge(cfg: CliConfig, con: _Console) -> int:
    net = _load_network(cfg.foon_paths)
    _write(cfg.out_path, serialize_units(net.units))
    if cfg.dot_path:
        _write(cfg.dot_path, to_dot(net.units).text)
    if cfg.dump_path:
        _write(cfg.dump_path, to_structured_dump(net.units))
    con.info(str(stats(net)))
    return EXIT_OK


def _cmd_stats(cfg: CliConfig, con: _Console) -> int:
    con.info(str(stats(_load_network(cfg.foon_paths))))
    return EXIT_OK


def _cmd_plan(cfg: CliConfig, con: _Console) -> int:
    net = _load_network(cfg.foon_paths)
    kitchen = load_kitchen(cfg.kitchen_path) if cfg.kitchen_path else Kitchen()
    goal = _goal(cfg)
    strategy = _strategy(cfg)
    try:
        tree, trace = retrieve(net, kitchen, goal, strategy)
    except MissingMotionProbability as exc:
        con.error(f"{cfg.motion_probs_path or '--default-motion-prob'}: {exc}")
        return EXIT_PLAN

    if strategy.probs is not None:
        by_key = {u.key: u for u in net.units}
        missing = sorted({by_key[k].motion.name for ev in trace.events for k in ev.candidates
                          if by_key[k].motion.name not in strategy.probs})
        if missing:
            con.warn(f"{cfg.motion_probs_path or '<none>'}: no probability for "
                     f"{', '.join(missing)}; used {strategy.probs.default}")

    violation = validate_task_tree(tree, kitchen, resolve_goal(net, kitchen, goal))
    if violation is not None:
        con.error(f"{cfg.foon_paths[0]}: retrieved tree is not executable: {violation}")
        return EXIT_PLAN

    text = serialize_units(tree.steps)
    if cfg.out_path:
        _write(cfg.out_path, text)
    else:
        con.out.write(text)
    if cfg.dot_path:
        _write(cfg.dot_path, to_dot(tree.steps).text)
    if cfg.dump_path:
        _write(cfg.dump_path, to_structured_dump(tree.steps))
    summary = f"steps: {len(tree)} decisions: {len(trace)}"
    if trace.max_depth is not None:
        summary += f" max_depth: {trace.max_depth}"
    (con.info if cfg.out_path else lambda m: print(m, file=con.err))(summary)
    return EXIT_OK


def _cmd_validate(cfg: CliConfig, con: _Console) -> int:
    status = EXIT_OK
    jobs = [(p, load_subgraph) for p in cfg.foon_paths]
    if cfg.kitchen_path:
        jobs.append((cfg.kitchen_path, load_kitchen))
    if cfg.motion_probs_path:
        jobs.append((cfg.motion_probs_path, load_motion_probs))
    for path, loader in jobs:
        try:
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                value = loader(path)
        except ParseError as exc:
            con.error(str(exc))
            status = EXIT_PARSE
            continue
        for w in caught:
            con.warn(str(w.message))
        size = len(value.table) if isinstance(value, MotionProbabilities) else len(value)
        con.info(f"{path}: ok ({size} entries)")
    return status


def _cmd_check_tree(cfg: CliConfig, con: _Console) -> int:
    tree_units = [u for p in cfg.foon_paths for u in load_subgraph(p).units]
    kitchen = load_kitchen(cfg.kitchen_path) if cfg.kitchen_path else Kitchen()
    goal_id = resolve_goal(merge([Subgraph(tuple(tree_units), cfg.foon_paths[0])]), kitchen, _goal(cfg))
    violation = validate_task_tree(tree_units, kitchen, goal_id)
    if violation is not None:
        con.error(f"{cfg.foon_paths[0]}: {violation}")
        return EXIT_PLAN
    con.info(f"{cfg.foon_paths[0]}: executable ({len(tree_units)} steps)")
    return EXIT_OK


HANDLERS = {
    "merge": _cmd_merge,
    "plan": _cmd_plan,
    "stats": _cmd_stats,
    "validate": _cmd_validate,
    "check-tree": _cmd_check_tree,
}


def run(cfg: CliConfig, out: TextIO = None, err: TextIO = None) -> int:
    con = _Console(out or sys.stdout, err or sys.stderr)
    try:
        cfg.check()
        return HANDLERS[cfg.command](cfg, con)
    except UsageError as exc:
        con.error(str(exc))
        return EXIT_USAGE
    except ParseError as exc:
        con.error(str(exc))
        return EXIT_PARSE
    except PlanError as exc:
        con.error(f"{cfg.foon_paths[0] if cfg.foon_paths else '<none>'}: {exc}")
        return EXIT_PLAN
    except OSError as exc:
        con.error(f"{exc.filename or ''}: {exc.strerror or exc}")
        return EXIT_USAGE


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = CliConfig(**vars(args))
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
