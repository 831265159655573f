"""Command-line front end: dpath solve|cover|approx|gen|verify|analyze.

Instances are JSON documents

    {"vertices": n, "edges": [[u, v], ...], "terminals": [...],
     "demand_edges": [[s, t], ...], "k": 2, "labels": {"id": label}}

where ``labels`` marks the skew-labelled form (demand is then derived from
the labels). A DIMACS edge file is accepted as the supply graph when the
demand comes from ``--demand``.

Exit codes: 0 paths found, 1 no / cover, 2 pattern witness, 3 budget
exhausted, 4 unreadable input.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from pathlib import Path

from .ep_cover import EpStats, HittingSet, MatchingWitness, Paths, ep_cover_top, fpt_approx_run, verify_outcome
from .fpt_pipeline import No, SkewWitness, SolveBudgetExhausted, SolveStats, Thresholds, show_constants, solve_fpt
from .graph_core import (
    INDUCED_MATCHING,
    SKEW_BICLIQUE,
    WITNESS_KINDS,
    BudgetExhausted,
    Instance,
    InvalidInput,
    PathSet,
    PatternWitness,
    default_budget,
    verify_hitting_set,
    verify_solution,
)
from .hardness_gen import (
    GridTilingInstance,
    SkewLabeledInstance,
    gen_grid_tiling,
    reduce_matching,
    reduce_skew,
    valid_label_pairs,
)
from .pattern_ramsey import brute_find_pattern, verify_witness

EXIT_PATHS, EXIT_NO, EXIT_WITNESS, EXIT_BUDGET, EXIT_INPUT = 0, 1, 2, 3, 4


class ParseError(InvalidInput):
    pass


# --- file formats -------------------------------------------------------------

def _field(doc: dict, name: str, kind, default=None):
    if name not in doc:
        if default is not None:
            return default
        raise ParseError(f"missing field {name!r}")
    val = doc[name]
    if not isinstance(val, kind) or isinstance(val, bool):
        raise ParseError(f"field {name!r} must be {kind.__name__}")
    return val


def _pairs(doc: dict, name: str) -> list[tuple[int, int]]:
    out = []
    for i, e in enumerate(_field(doc, name, list, [])):
        if not (isinstance(e, list) and len(e) == 2 and all(isinstance(x, int) for x in e)):
            raise ParseError(f"field {name!r}, entry {i}: expected [int, int], got {e!r}")
        out.append((e[0], e[1]))
    return out


def instance_from_doc(doc) -> tuple[Instance, dict | None]:
    """Instance plus the label map (None unless the file is skew-labelled)."""
    if not isinstance(doc, dict):
        raise ParseError("instance file must hold a JSON object")
    n = _field(doc, "vertices", int)
    edges = _pairs(doc, "edges")
    k = _field(doc, "k", int, 0)
    labels = None
    if "labels" in doc:
        raw = _field(doc, "labels", dict)
        try:
            labels = {int(v): int(x) for v, x in raw.items()}
        except (TypeError, ValueError):
            raise ParseError("field 'labels': keys and values must be integers") from None
        sli = SkewLabeledInstance(n, tuple(edges), labels)
        demand = valid_label_pairs(labels)
        given = _pairs(doc, "demand_edges")
        if given and {tuple(sorted(e)) for e in given} != set(demand):
            raise ParseError("field 'demand_edges' disagrees with the labels")
        terms = sli.terminals
    else:
        terms = _field(doc, "terminals", list)
        if not all(isinstance(t, int) for t in terms):
            raise ParseError("field 'terminals' must list integers")
        demand = _pairs(doc, "demand_edges")
    try:
        return Instance.make(n, edges, terms, demand, k), labels
    except InvalidInput as e:
        raise ParseError(str(e)) from None


def instance_to_doc(inst: Instance, labels: dict | None = None) -> dict:
    doc = {
        "vertices": inst.n,
        "edges": [list(e) for e in sorted(inst.edges)],
        "terminals": list(inst.terminals),
        "demand_edges": [list(e) for e in sorted(inst.demand)],
        "k": inst.k,
    }
    if labels is not None:
        doc["labels"] = {str(v): labels[v] for v in sorted(labels)}
    return doc


def dumps(doc) -> str:
    return json.dumps(doc, indent=1, sort_keys=False) + "\n"


def read_dimacs(text: str) -> tuple[int, list[tuple[int, int]]]:
    """DIMACS edge format ('p edge n m', 'e u v', 1-based) to (n, 0-based edges)."""
    n = None
    edges = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        parts = line.split()
        if not parts or parts[0] == "c":
            continue
        if parts[0] == "p":
            if len(parts) < 4:
                raise ParseError(f"line {lineno}: malformed problem line")
            n = int(parts[2])
        elif parts[0] == "e":
            if n is None or len(parts) < 3:
                raise ParseError(f"line {lineno}: edge before problem line or missing endpoint")
            try:
                u, v = int(parts[1]) - 1, int(parts[2]) - 1
            except ValueError:
                raise ParseError(f"line {lineno}: non-integer endpoint") from None
            edges.append((u, v))
        else:
            raise ParseError(f"line {lineno}: unknown record {parts[0]!r}")
    if n is None:
        raise ParseError("no problem line")
    return n, edges


def _load_json(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"{path}: {e.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: line {e.lineno}, column {e.colno}: {e.msg}") from None


def load_instance(path: str, demand: str | None = None) -> tuple[Instance, dict | None]:
    if demand is not None:
        try:
            n, edges = read_dimacs(Path(path).read_text(encoding="utf-8"))
        except OSError as e:
            raise ParseError(f"{path}: {e.strerror}") from None
        doc = _load_json(demand)
        if not isinstance(doc, dict):
            raise ParseError(f"{demand}: expected a JSON object")
        doc = {**doc, "vertices": n, "edges": [list(e) for e in edges]}
        return instance_from_doc(doc)
    try:
        return instance_from_doc(_load_json(path))
    except ParseError as e:
        if str(e).startswith(path):
            raise
        raise ParseError(f"{path}: {e}") from None


def grid_tiling_to_doc(gt: GridTilingInstance) -> dict:
    doc = {"k": gt.k, "n": gt.n,
           "sets": [[sorted(list(p) for p in s) for s in row] for row in gt.sets]}
    if gt.solution is not None:
        doc["solution"] = [[list(p) for p in row] for row in gt.solution]
    return doc


def grid_tiling_from_doc(doc: dict) -> GridTilingInstance:
    sets = tuple(tuple(frozenset(tuple(p) for p in s) for s in row) for row in doc["sets"])
    sol = doc.get("solution")
    if sol is not None:
        sol = tuple(tuple(tuple(p) for p in row) for row in sol)
    return GridTilingInstance(doc["k"], doc["n"], sets, sol)


# --- witnesses ------------------------------------------------------------------

def witness_doc(out) -> dict | None:
    if isinstance(out, Paths):
        return {"kind": "paths", "paths": [list(p) for p in out.paths]}
    if isinstance(out, HittingSet):
        return {"kind": "hitting_set", "vertices": sorted(out.vertices)}
    if isinstance(out, (MatchingWitness, SkewWitness)):
        w = out.witness
        return {"kind": "pattern", "pattern": w.kind, "vertices": list(w.vertices)}
    return None


def check_witness(inst: Instance, w: dict, k: int | None = None) -> bool:
    """Re-verify a witness payload against the instance it was produced for."""
    kind = w.get("kind")
    if kind == "paths":
        ps = PathSet.of(w.get("paths", []))
        try:
            return verify_solution(inst.with_k(len(ps) if k is None else k), ps)
        except InvalidInput:
            return False
    if kind == "hitting_set":
        vs = w.get("vertices", [])
        if any(not isinstance(v, int) or not 0 <= v < inst.n for v in vs):
            return False
        return verify_hitting_set(inst, vs)
    if kind == "pattern":
        if w.get("pattern") not in WITNESS_KINDS:
            return False
        return verify_witness(inst.demand_graph(), PatternWitness(w["pattern"], tuple(w.get("vertices", []))))
    return False


# --- reports ----------------------------------------------------------------------

def report(command: str, outcome: str, witness: dict | None, stats: dict, config: dict) -> dict:
    return {"command": command, "outcome": outcome, "witness": witness, "stats": stats, "config": config}


def _emit(doc: dict, args) -> None:
    text = dumps(doc)
    if getattr(args, "out", None):
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def to_dot(inst: Instance, paths=()) -> str:
    on_path = {tuple(sorted(e)) for p in paths for e in zip(p, p[1:])}
    lines = ["graph instance {"]
    for v in range(inst.n):
        shape = "doublecircle" if v in inst.terminal_set else "circle"
        lines.append(f"  {v} [shape={shape}];")
    for u, v in inst.edges:
        style = " [color=red, penwidth=2]" if (u, v) in on_path else ""
        lines.append(f"  {u} -- {v}{style};")
    for s, t in inst.demand:
        lines.append(f"  {s} -- {t} [style=dashed, color=gray, constraint=false];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def parse_overrides(text: str | None) -> Thresholds:
    if not text:
        return Thresholds()
    vals = {}
    for item in text.split(","):
        key, _, raw = item.partition("=")
        key = key.strip().replace("-", "_")
        if key not in Thresholds.__dataclass_fields__:
            raise ParseError(f"unknown threshold {key!r}")
        try:
            vals[key] = int(raw)
        except ValueError:
            raise ParseError(f"threshold {key!r} needs an integer value") from None
    return Thresholds(**vals)


def _budget(args) -> int:
    return args.budget if args.budget is not None else default_budget()


# --- commands ------------------------------------------------------------------------

def cmd_solve(args) -> int:
    inst, _ = load_instance(args.file, args.demand)
    k = inst.k if args.k is None else args.k
    thresholds = parse_overrides(args.cap_overrides)
    budget = _budget(args)
    config = {"k": k, "r": args.r, "budget": budget, "thresholds": thresholds.__dict__}
    stats = SolveStats()
    t0 = time.perf_counter()
    try:
        out = solve_fpt(inst, k, args.r, thresholds, budget=budget, stats=stats)
    except SolveBudgetExhausted as e:
        _emit(report("solve", "BudgetExhausted", None,
                     {"stage": e.stage, "removed": e.removed, "wall_time": time.perf_counter() - t0}, config), args)
        return EXIT_BUDGET
    st = {"ep_outcome": stats.ep_outcome, "irrelevant_removals": len(stats.events),
          "pair_sequences": stats.sequences, "wall_time": time.perf_counter() - t0}
    doc = report("solve", type(out).__name__, witness_doc(out), st, config)
    if args.show_constants:
        doc["constants"] = show_constants(k, args.r, args.z)
    _emit(doc, args)
    if args.dot:
        paths = out.paths if isinstance(out, Paths) else ()
        Path(args.dot).write_text(to_dot(inst, paths), encoding="utf-8")
    if isinstance(out, Paths):
        return EXIT_PATHS
    if isinstance(out, No):
        return EXIT_NO
    return EXIT_WITNESS


def cmd_cover(args) -> int:
    inst, _ = load_instance(args.file, args.demand)
    k = inst.k if args.k is None else args.k
    stats = EpStats()
    t0 = time.perf_counter()
    out = ep_cover_top(inst, k, args.r, args.cap, stats)
    ok = verify_outcome(inst, out, k, args.r)
    st = {"grow_calls": stats.grow_calls, "splits": stats.splits, "verified": ok,
          "wall_time": time.perf_counter() - t0}
    doc = report("cover", type(out).__name__, witness_doc(out), st, {"k": k, "r": args.r, "cap": args.cap})
    if args.show_constants:
        doc["constants"] = show_constants(k, args.r, args.z)
    _emit(doc, args)
    if isinstance(out, Paths):
        return EXIT_PATHS
    if isinstance(out, HittingSet):
        return EXIT_NO
    return EXIT_WITNESS


def cmd_approx(args) -> int:
    inst, _ = load_instance(args.file, args.demand)
    t0 = time.perf_counter()
    run = fpt_approx_run(inst, args.r, args.cap)
    st = {"schedule": list(run.schedule), "stop": type(run.stop).__name__ if run.stop else None,
          "wall_time": time.perf_counter() - t0}
    doc = report("approx", "Paths", witness_doc(Paths(run.paths)), st, {"r": args.r, "cap": args.cap})
    _emit(doc, args)
    return EXIT_PATHS


def random_instance(n: int, k: int, seed: int, p: float = 0.3) -> Instance:
    rng = random.Random(seed)
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    terms = sorted(rng.sample(range(n), min(n, max(2, n // 2))))
    demand = [(a, b) for i, a in enumerate(terms) for b in terms[i + 1:] if rng.random() < 0.4]
    return Instance.make(n, edges, terms, demand, k)


def cmd_gen(args) -> int:
    files: dict[str, dict] = {}
    if args.kind == "grid-tiling":
        files["grid_tiling"] = grid_tiling_to_doc(gen_grid_tiling(args.k, args.n, args.seed, args.planted))
    elif args.kind == "matching-hard":
        gt = gen_grid_tiling(args.k, args.n, args.seed, args.planted)
        red = reduce_matching(gt)
        files["instance"] = instance_to_doc(red.instance.with_k(red.k_prime))
        files["grid_tiling"] = grid_tiling_to_doc(gt)
        if red.witness is not None:
            files["witness"] = witness_doc(Paths(red.witness))
    elif args.kind == "skew-hard":
        gt = gen_grid_tiling(args.k, args.n, args.seed, args.planted)
        red = reduce_skew(gt)
        sli = red.instance
        files["instance"] = instance_to_doc(sli.to_instance(red.k_prime), sli.labels)
        files["grid_tiling"] = grid_tiling_to_doc(gt)
        if red.witness is not None:
            files["witness"] = witness_doc(Paths(red.witness))
    else:
        files["instance"] = instance_to_doc(random_instance(args.n, args.k, args.seed))
    if args.out:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        for name, doc in files.items():
            (outdir / f"{args.kind}.{name}.json").write_text(dumps(doc), encoding="utf-8")
    else:
        main_name = "grid_tiling" if args.kind == "grid-tiling" else "instance"
        sys.stdout.write(dumps(files[main_name]))
    return 0


def cmd_verify(args) -> int:
    inst, _ = load_instance(args.file, args.demand)
    doc = _load_json(args.witness)
    if isinstance(doc, dict) and "witness" in doc and "command" in doc:
        k = doc.get("config", {}).get("k")
        w = doc["witness"]
    else:
        k, w = None, doc
    if not isinstance(w, dict):
        print("no witness payload", file=sys.stderr)
        return 1
    ok = check_witness(inst, w, k)
    print("ok" if ok else "invalid")
    return 0 if ok else 1


def cmd_analyze(args) -> int:
    inst, _ = load_instance(args.file, args.demand)
    H = inst.demand_graph()
    t0 = time.perf_counter()
    found = {}
    for kind in (INDUCED_MATCHING, SKEW_BICLIQUE):
        w = brute_find_pattern(H, kind, args.r)
        found[kind] = None if w is None else list(w.vertices)
    if found[INDUCED_MATCHING] is not None:
        outcome, w = "matching", PatternWitness(INDUCED_MATCHING, tuple(found[INDUCED_MATCHING]))
    elif found[SKEW_BICLIQUE] is not None:
        outcome, w = "skew", PatternWitness(SKEW_BICLIQUE, tuple(found[SKEW_BICLIQUE]))
    else:
        outcome, w = "neither", None
    wit = None if w is None else {"kind": "pattern", "pattern": w.kind, "vertices": list(w.vertices)}
    st = {"found": found, "wall_time": time.perf_counter() - t0}
    _emit(report("analyze", outcome, wit, st, {"r": args.r}), args)
    if args.dot:
        Path(args.dot).write_text(to_dot(inst), encoding="utf-8")
    return EXIT_WITNESS if w is not None else EXIT_PATHS


# --- argument parsing ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dpath", description="Disjoint valid paths: solve, cover, generate, verify.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, with_out=True):
        sp.add_argument("file", help="instance JSON, or a DIMACS edge file together with --demand")
        sp.add_argument("--demand", help="JSON with terminals, demand_edges and k for a DIMACS supply graph")
        if with_out:
            sp.add_argument("-o", "--out", help="write the report here instead of stdout")

    sp = sub.add_parser("solve", help="k disjoint valid paths, No, or a pattern witness")
    common(sp)
    sp.add_argument("--k", type=int)
    sp.add_argument("--r", type=int, default=3)
    sp.add_argument("--budget", type=int, help="search node budget (default: DPATH_BUDGET or 10^7)")
    sp.add_argument("--cap-overrides", help="e.g. smsep=1,sm=2,components=0,max_order=4")
    sp.add_argument("--show-constants", action="store_true")
    sp.add_argument("--z", type=int, default=2, help="separator order used by --show-constants")
    sp.add_argument("--dot", help="write a Graphviz description with the solution paths")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("cover", help="k paths, a hitting set, or an induced matching")
    common(sp)
    sp.add_argument("--k", type=int)
    sp.add_argument("--r", type=int, default=2)
    sp.add_argument("--cap", type=int)
    sp.add_argument("--show-constants", action="store_true")
    sp.add_argument("--z", type=int, default=2)
    sp.set_defaults(func=cmd_cover)

    sp = sub.add_parser("approx", help="doubling approximation of the maximum packing")
    common(sp)
    sp.add_argument("--r", type=int, default=2)
    sp.add_argument("--cap", type=int)
    sp.set_defaults(func=cmd_approx)

    sp = sub.add_parser("gen", help="generate instances")
    sp.add_argument("kind", choices=["matching-hard", "skew-hard", "grid-tiling", "random"])
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--planted", action=argparse.BooleanOptionalAction, default=True)
    sp.add_argument("-o", "--out", help="directory for the generated files (default: instance to stdout)")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("verify", help="re-check a witness or report against an instance")
    common(sp, with_out=False)
    sp.add_argument("witness")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("analyze", help="look for an induced matching or skew biclique of size r in the demand graph")
    common(sp)
    sp.add_argument("--r", type=int, default=3)
    sp.add_argument("--dot", help="write a Graphviz description of the instance")
    sp.set_defaults(func=cmd_analyze)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InvalidInput as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetExhausted as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
