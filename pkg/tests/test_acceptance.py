"""Exit criteria.  Each test records one PASS/FAIL line shown in the summary."""

import random
import time


from foonplan import (
    ObjectNode,
    PlanError,
    PlanErrorKind,
    StateDescriptor,
    Strategy,
    Subgraph,
    merge,
    object_identity,
    parse_subgraph,
    retrieve,
    serialize_kitchen,
    serialize_subgraph,
    serialize_motion_probs,
    unique_input_count,
    unit_key,
    validate_task_tree,
)
from foonplan.cli import main

from .conftest import ACCEPTANCE
from .generators import (
    complete_tree_problem,
    cyclic_problem,
    layered_problem,
    obj,
    random_subgraph,
    restamped,
    unit,
)
from .oracles import brute_union_size, executable_trees, tree_signature
from .test_planner import ALL_STRATEGIES, PROBS


def record(name, ok, detail):
    ACCEPTANCE.append((name, bool(ok), detail))
    assert ok, f"{name}: {detail}"


def test_round_trip_suite():
    rng = random.Random(20240501)
    start = time.perf_counter()
    failures = 0
    for _ in range(500):
        sub = random_subgraph(rng, min_units=1, max_units=30, max_states=5, max_ingredients=4)
        again = parse_subgraph(serialize_subgraph(sub))
        failures += [unit_key(u) for u in again.units] != [unit_key(u) for u in sub.units]
    elapsed = time.perf_counter() - start
    record("round-trip", failures == 0 and elapsed < 5.0, f"500 subgraphs, {failures} mismatches, {elapsed:.2f}s (< 5s)")


def test_dedup_suite():
    rng = random.Random(7)
    mismatches = 0
    for _ in range(200):
        a = random_subgraph(rng, max_units=15)
        b_units = list(random_subgraph(rng, max_units=15).units)
        for u in rng.sample(a.units, rng.randint(1, len(a.units))):
            b_units.insert(rng.randint(0, len(b_units)), restamped(u, rng))
        b = Subgraph(tuple(b_units), "b")
        mismatches += len(merge([a, b])) != brute_union_size(a, b)
    record("dedup", mismatches == 0, f"200 pairs, {mismatches} count mismatches vs brute-force union")


def test_oracle_equivalence():
    failures, slowest = [], 0.0
    for seed in range(300):
        problem = layered_problem(random.Random(10_000 + seed), max_units=15)
        assert len(problem.net) <= 15
        start = time.perf_counter()
        trees = executable_trees(problem.net.units, problem.kitchen.entries, problem.goal_object)
        goal_id = object_identity(problem.goal_object)
        for strategy in ALL_STRATEGIES:
            tree, _ = retrieve(problem.net, problem.kitchen, problem.goal, strategy)
            if tree_signature(tree.steps) not in trees or validate_task_tree(tree, problem.kitchen, goal_id):
                failures.append((seed, strategy.kind.value))
        slowest = max(slowest, time.perf_counter() - start)
    record("oracle equivalence", not failures and slowest < 1.0,
           f"300 networks x 4 strategies, {len(failures)} failures, slowest {slowest:.3f}s (< 1s)")


def test_selector_invariants():
    h1_events = h2_events = violations = 0
    seed = 0
    while h1_events < 1000 or h2_events < 1000:
        problem = layered_problem(random.Random(50_000 + seed))
        seed += 1
        by_key = {u.key: u for u in problem.net.units}
        _, trace = retrieve(problem.net, problem.kitchen, problem.goal, Strategy.max_motion_success(PROBS))
        for ev in trace.events:
            scores = [PROBS.lookup(by_key[k].motion.name) for k in ev.candidates]
            violations += ev.chosen_index != scores.index(max(scores)) or ev.score != max(scores)
            h1_events += 1
        _, trace = retrieve(problem.net, problem.kitchen, problem.goal, Strategy.min_unique_inputs())
        for ev in trace.events:
            counts = [unique_input_count(by_key[k]) for k in ev.candidates]
            violations += ev.chosen_index != counts.index(min(counts)) or ev.score != min(counts)
            h2_events += 1
    record("selector invariants", violations == 0,
           f"{h1_events} max-success + {h2_events} min-inputs events, {violations} violations")


def _multi(name, *contents_by_state):
    return ObjectNode(name, 0, tuple(StateDescriptor(label, tuple(c)) for label, c in contents_by_state))


INGREDIENT_TABLE = [
    ([obj("bowl", contains=("salt", "pepper")), obj("salt"), obj("spoon")], 3),
    ([obj("carrot", "orange", "unpeeled"), obj("peeler", "clean", "sharp", flag=1)], 2),
    ([obj("pot", contains=("water", "onion")), obj("pan", contains=("onion",))], 2),
    ([obj("salt")], 1),
    ([obj("salt", "fine"), obj("salt", "coarse")], 1),
    ([obj("bowl", "empty")], 1),
    ([obj("bowl", "left", contains=("salt",)), obj("bowl", "right", contains=("pepper",))], 2),
    ([obj("bowl", contains=("salt", "pepper")), obj("pot", contains=("pepper", "salt"))], 2),
    ([obj("bowl", contains=("salt", "pepper")), obj("salt"), obj("pepper")], 2),
    ([obj("bowl", contains=("salt",)), obj("pepper")], 2),
    ([obj("bowl", contains=("egg", "milk", "flour")), obj("whisk", flag=1)], 4),
    ([obj("bowl", contains=("egg",)), obj("egg", "raw"), obj("egg", "boiled"), obj("whisk")], 2),
    ([obj("pan", contains=("oil",)), obj("bowl", contains=("oil", "egg")), obj("spatula"), obj("oil")], 3),
    ([obj("cup", contains=("water",)), obj("water", "cold")], 1),
    ([obj("cup", contains=("water",)), obj("kettle", contains=("water",)), obj("water")], 1),
    ([obj("knife"), obj("board"), obj("onion"), obj("carrot")], 4),
    ([obj("tray", contains=("cookie", "cake")), obj("plate", contains=("cake",))], 2),
    ([_multi("bowl", ("contains", ["salt"]), ("topped", ["herbs"]))], 2),
    ([obj("Salt"), obj("salt", "fine")], 1),
    ([obj("bowl", contains=("salt", "pepper")), obj("plate"), obj("bowl", "clean")], 4),
]


def test_ingredient_counting_table():
    assert len(INGREDIENT_TABLE) == 20
    wrong = [i for i, (inputs, expected) in enumerate(INGREDIENT_TABLE)
             if unique_input_count(unit(inputs, "mix", [obj("result")])) != expected]
    record("ingredient counting", not wrong, f"20 hand-built input lists, mismatched rows {wrong}")


def test_ids_behaviour():
    problem = complete_tree_problem(branching=3, depth=6)
    start = time.perf_counter()
    _, ids = retrieve(problem.net, problem.kitchen, problem.goal, Strategy.iterative_deepening())
    _, bfs = retrieve(problem.net, problem.kitchen, problem.goal, Strategy.first_candidate())
    elapsed = time.perf_counter() - start
    ok = ids.max_depth == 6 and ids.peak_frontier <= 19 and bfs.peak_frontier >= 243 and elapsed < 2.0
    record("IDS behaviour", ok,
           f"final depth {ids.max_depth} (=6), IDS peak {ids.peak_frontier} (<=19), "
           f"FIFO peak {bfs.peak_frontier} (>=243), {elapsed:.2f}s (< 2s)")


def test_ids_bfs_agreement():
    mismatches = 0
    for seed in range(100):
        problem = layered_problem(random.Random(70_000 + seed), single_producer=True)
        assert all(len(p) == 1 for p in problem.net.producer_index.values())
        bfs, _ = retrieve(problem.net, problem.kitchen, problem.goal, Strategy.first_candidate())
        ids, _ = retrieve(problem.net, problem.kitchen, problem.goal, Strategy.iterative_deepening())
        mismatches += sorted(map(unit_key, bfs.steps)) != sorted(map(unit_key, ids.steps))
    record("IDS/BFS agreement", mismatches == 0, f"100 single-producer networks, {mismatches} mismatches")


def _has_producer_cycle(net):
    edges = {}
    for i, u in enumerate(net.units):
        edges[i] = {j for o in u.inputs for j in net.producer_index.get(object_identity(o), ())}
    state = {}

    def visit(n):
        state[n] = 1
        for m in edges[n]:
            if state.get(m) == 1 or (m not in state and visit(m)):
                return True
        state[n] = 2
        return False

    return any(n not in state and visit(n) for n in edges)


def test_termination_on_cycles():
    bad, slowest, outcomes = [], 0.0, {"tree": 0, "unreachable": 0}
    for seed in range(50):
        problem = cyclic_problem(random.Random(90_000 + seed))
        assert _has_producer_cycle(problem.net)
        goal_id = object_identity(problem.goal_object)
        for strategy in ALL_STRATEGIES:
            start = time.perf_counter()
            try:
                tree, _ = retrieve(problem.net, problem.kitchen, problem.goal, strategy)
            except PlanError as exc:
                if exc.kind is not PlanErrorKind.UNREACHABLE_OBJECT:
                    bad.append((seed, exc.kind.value))
                outcomes["unreachable"] += 1
            else:
                if validate_task_tree(tree, problem.kitchen, goal_id) is not None:
                    bad.append((seed, "invalid tree"))
                outcomes["tree"] += 1
            slowest = max(slowest, time.perf_counter() - start)
    record("termination on cycles", not bad and slowest < 1.0,
           f"50 cyclic networks x 4 strategies, {outcomes}, {len(bad)} bad, slowest {slowest:.3f}s (< 1s)")


def _pipeline(tmp, problem, algo, run_id):
    half = len(problem.net.units) // 2
    parts = []
    for i, chunk in enumerate((problem.net.units[:half], problem.net.units[half:])):
        path = tmp / f"part{i}.txt"
        path.write_text(serialize_subgraph(Subgraph(chunk)))
        parts += ["--foon", str(path)]
    kitchen = tmp / "kitchen.txt"
    kitchen.write_text(serialize_kitchen(problem.kitchen))
    probs = tmp / "probs.txt"
    probs.write_text(serialize_motion_probs(PROBS))
    out = tmp / f"run{run_id}"
    out.mkdir()
    assert main(["merge", *parts, "--out", str(out / "universal.txt")]) == 0
    goal = ["--goal", problem.goal.name] + [x for s in problem.goal.required_states for x in ("--goal-state", str(s))]
    extra = ["--motion-probs", str(probs), "--default-motion-prob", "0.5"] if algo == "h1" else []
    assert main(["plan", "--foon", str(out / "universal.txt"), "--kitchen", str(kitchen), *goal,
                 "--algo", algo, *extra, "--out", str(out / "tree.txt"), "--dot", str(out / "tree.dot"),
                 "--dump", str(out / "tree.json")]) == 0
    return {p.name: p.read_bytes() for p in sorted(out.iterdir())}


def test_cli_determinism(tmp_path, capsys):
    differing = []
    for seed in range(5):
        problem = layered_problem(random.Random(123 + seed))
        for algo in ("bfs", "ids", "h1", "h2"):
            base = tmp_path / f"{seed}-{algo}"
            base.mkdir()
            first = _pipeline(base, problem, algo, 1)
            second = _pipeline(base, problem, algo, 2)
            if first != second:
                differing.append((seed, algo))
    capsys.readouterr()
    record("determinism", not differing, f"merge->plan->dot twice, 5 networks x 4 algos, {len(differing)} differing")
