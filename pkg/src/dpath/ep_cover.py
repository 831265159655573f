"""Cover-or-pack for valid paths when the demand graph has no large induced matching.

Everything below ``ep_cover_or_pack`` assumes the terminals are an
independent set of degree-one vertices; ``ep_cover_top`` does that
preprocessing and maps results back.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .graph_core import (
    BICLIQUE,
    CLIQUE,
    INDUCED_MATCHING,
    Instance,
    InvalidInput,
    PathSet,
    PatternWitness,
    Separation,
    attach_degree_one_terminals,
    degree_one_ok,
    disjoint_set_paths,
    induced_subinstance,
    min_vertex_cut,
    verify_hitting_set,
    verify_solution,
)
from .pattern_ramsey import (
    EdgeColoring,
    RamseyFailure,
    find_monochromatic_clique,
    matching_color,
    matching_to_induced_or_biclique,
    verify_witness,
)
from .separators import (
    Certificate,
    POracle,
    as_adj,
    component_of,
    find_p_tight,
    subgraph,
    test_p_free,
    truncated_valid_path_oracle,
)


class InternalError(AssertionError):
    """A branch the correctness argument rules out was reached."""


@dataclass(frozen=True)
class Paths:
    paths: PathSet


@dataclass(frozen=True)
class HittingSet:
    vertices: frozenset


@dataclass(frozen=True)
class MatchingWitness:
    witness: PatternWitness


EpOutcome = Paths | HittingSet | MatchingWitness


@dataclass(frozen=True)
class FreeMatchedSet:
    terminals: frozenset
    matching: tuple[tuple[int, int], ...] = ()

    @classmethod
    def empty(cls) -> "FreeMatchedSet":
        return cls(frozenset(), ())


@dataclass(frozen=True)
class Hitting:
    vertices: frozenset


@dataclass(frozen=True)
class Split:
    separation: Separation


@dataclass(frozen=True)
class Grown:
    free_set: FreeMatchedSet


@dataclass
class EpStats:
    grow_calls: int = 0
    splits: int = 0
    links: int = 0
    ramsey_attempts: int = 0
    depth: int = 0
    events: list = field(default_factory=list)


def growth_cap(k: int, r: int) -> int:
    return 5 ** (10 * (k + r))


def hitting_bound(k: int, r: int) -> int:
    return 4 * 5 ** (20 * (k + r))


def _check_free_set(inst: Instance, tp: FreeMatchedSet, oracle: POracle) -> None:
    covered = [v for e in tp.matching for v in e]
    if len(set(covered)) != len(covered) or set(covered) != set(tp.terminals):
        raise InvalidInput("recorded matching is not a perfect matching of T'")
    for s, t in tp.matching:
        if t not in inst.hadj.get(s, ()):
            raise InvalidInput(f"({s},{t}) is not a demand edge")
    if isinstance(test_p_free(as_adj(inst), tp.terminals, oracle), Certificate):
        raise InvalidInput("T' is not free")


def find_valid_path(inst: Instance, allowed, drop=frozenset()) -> list[int] | None:
    """A valid path whose non-terminal part lies in ``allowed`` (edges inside ``drop`` unusable).

    Deterministic: first demand edge in sorted order, BFS shortest path.
    """
    allowed = set(allowed) - inst.terminal_set
    adj = inst.adj
    for s, t in inst.demand:
        a, b = adj[s][0], adj[t][0]
        if a not in allowed or b not in allowed:
            continue
        parent = {a: None}
        q = deque([a])
        while q:
            v = q.popleft()
            if v == b:
                break
            for w in adj[v]:
                if w in allowed and w not in parent and not (v in drop and w in drop):
                    parent[w] = v
                    q.append(w)
        if b in parent:
            mid = []
            v = b
            while v is not None:
                mid.append(v)
                v = parent[v]
            return [s] + mid[::-1] + [t]
    return None


def grow_free_set(inst: Instance, tp: FreeMatchedSet, oracle: POracle | None = None,
                  check_input: bool = True) -> Hitting | Split | Grown:
    """One growth step: hitting set, splitting separation, or a free set two larger."""
    if not degree_one_ok(inst):
        raise InvalidInput("terminals must be independent and of degree one")
    oracle = oracle or truncated_valid_path_oracle(inst)
    if check_input:
        _check_free_set(inst, tp, oracle)
    adj = as_adj(inst)
    V = frozenset(adj)
    t = len(tp.terminals)
    bound = t * (t + 3)

    def hitting(z):
        z = frozenset(z)
        if len(z) > bound or not verify_hitting_set(inst, z):
            raise InternalError(f"hitting set of size {len(z)} fails (bound {bound})")
        return Hitting(z)

    def split(sep):
        if not (oracle(sep.side_a) and oracle(sep.side_b, sep.separator)) or sep.order > t + 2:
            raise InternalError("split separation does not hold members on both sides")
        return Split(sep)

    if not oracle(V - tp.terminals):
        return hitting(tp.terminals)
    tight = find_p_tight(adj, tp.terminals, oracle)
    X, Y = tight.side_a, tight.side_b
    sep = tight.separator
    if oracle(X):
        return split(tight)
    inner = Y - X
    ysub = subgraph(adj, Y, sep)
    Z = set(sep) | set(tp.terminals)
    for x in sorted(sep):
        nbrs = sorted(adj[x] & inner)
        if not nbrs:
            continue
        xp = nbrs[0]
        restricted = oracle.restrict(X | {xp})
        if not restricted(Y):
            # every member in Y - X runs through x'; x' alone covers them
            Z.add(xp)
            continue
        ui = find_p_tight(ysub, sep | {xp}, restricted)
        Z |= ui.separator
    if verify_hitting_set(inst, Z):
        return hitting(Z)
    pbar = find_valid_path(inst, V - Z)
    if pbar is None:
        raise InternalError("no valid path avoiding Z although Z does not hit all")
    s, e = pbar[0], pbar[-1]
    grown = FreeMatchedSet(tp.terminals | {s, e}, tp.matching + (tuple(sorted((s, e))),))
    if not isinstance(test_p_free(adj, grown.terminals, oracle), Certificate):
        return Grown(grown)
    cd = find_p_tight(adj, grown.terminals, oracle)
    if oracle(cd.side_a):
        return split(cd)
    z2 = set(cd.separator) | set(sep)
    if not oracle(V - z2):
        if verify_hitting_set(inst, z2) and len(z2) <= bound:
            return Hitting(frozenset(z2))
    raise InternalError("grown set is not free yet no outcome applies")


# --- main recursion ---------------------------------------------------------

def _pick_bicliques(w: PatternWitness, k: int):
    vs = w.vertices
    if w.kind == CLIQUE:
        half = len(vs) // 2
        return list(vs[:half])[:k], list(vs[half:2 * half])[:k]
    if w.kind == BICLIQUE:
        half = len(vs) // 2
        return list(vs[:half])[:k], list(vs[half:])[:k]
    return None


def _pattern_step(inst: Instance, tp: FreeMatchedSet, k: int, r: int, stats: EpStats):
    """Try the Ramsey step on the grown set: witness, biclique pair, or None."""
    m = list(tp.matching)
    if k == 1 and m:
        return "bicl", ([m[0][0]], [m[0][1]])
    h = inst.demand_graph()
    if r >= 1 and len(m) >= r:
        # cheap early look for colour 1 (an induced matching) among the recorded edges
        xs, ys = [e[0] for e in m], [e[1] for e in m]
        col = EdgeColoring(len(m), 5, lambda i, j: matching_color(h, xs, ys, i, j))
        try:
            idx = find_monochromatic_clique(col, r)
        except RamseyFailure:
            idx = None
        if idx is not None and (r == 1 or col(idx[0], idx[1]) == 1):
            w = PatternWitness(INDUCED_MATCHING, tuple(v for i in idx for v in (xs[i], ys[i])))
            if verify_witness(h, w):
                return "witness", w
    q = max(2 * k, r)
    if len(m) < q:
        return None
    stats.ramsey_attempts += 1
    try:
        w = matching_to_induced_or_biclique(h, m, (q + 1) // 2)
    except RamseyFailure:
        return None
    if w.kind == INDUCED_MATCHING:
        return ("witness", w) if w.size >= r else None
    b = _pick_bicliques(w, k)
    if b is None or len(b[0]) < k or len(b[1]) < k:
        return None
    return "bicl", b


def _link(inst: Instance, tp: FreeMatchedSet, b1, b2, k: int, oracle: POracle, stats: EpStats):
    stats.links += 1
    paths = disjoint_set_paths(inst.adj, set(b1), set(b2))
    if len(paths) >= k:
        ps = PathSet.of(paths[:k])
        if not verify_solution(inst.with_k(k), ps):
            raise InternalError("linkage paths are not valid")
        return Paths(ps)
    rest = set(tp.terminals) - set(b1) - set(b2)
    adj = inst.adj
    allowed = set(range(inst.n)) - rest
    cut = min_vertex_cut(adj, set(b1), set(b2), allowed)
    S = cut | rest
    side_x = set()
    for v in b1:
        if v not in S and v not in side_x:
            side_x |= component_of(as_adj(inst), v, S)
    a_side = frozenset(side_x | S)
    b_side = frozenset(set(range(inst.n)) - side_x)
    sep = Separation(a_side, b_side)
    xs = a_side - set(b1) - sep.separator
    ys = b_side - set(b2) - sep.separator
    if not oracle(xs) and not oracle(ys):
        z = frozenset(sep.separator | set(b1) | set(b2))
        if not verify_hitting_set(inst, z):
            raise InternalError("linkage separator is not a hitting set")
        return HittingSet(z)
    raise InternalError("linkage separator leaves a member while T' is free")


def ep_cover_or_pack(inst: Instance, k: int, r: int, cap: int | None = None,
                     stats: EpStats | None = None) -> EpOutcome:
    """k disjoint valid paths, a hitting set, or an induced matching of size r.

    ``inst`` must have independent degree-one terminals.  ``cap`` bounds the
    number of growth steps (default the worst-case 5^(10(k+r))).
    """
    if not degree_one_ok(inst):
        raise InvalidInput("terminals must be independent and of degree one")
    stats = stats if stats is not None else EpStats()
    cap = growth_cap(k, r) if cap is None else cap
    if k <= 0:
        return Paths(PathSet())
    oracle = truncated_valid_path_oracle(inst)
    V = frozenset(range(inst.n))
    if not oracle(V):
        return HittingSet(frozenset())
    tp = FreeMatchedSet.empty()
    for _ in range(cap):
        step = _pattern_step(inst, tp, k, r, stats)
        if step is not None:
            kind, payload = step
            if kind == "witness":
                return MatchingWitness(payload)
            out = _link(inst, tp, payload[0], payload[1], k, oracle, stats)
            return out
        stats.grow_calls += 1
        res = grow_free_set(inst, tp, oracle, check_input=False)
        if isinstance(res, Hitting):
            return HittingSet(res.vertices)
        if isinstance(res, Split):
            stats.splits += 1
            return _recurse_split(inst, res.separation, k, r, cap, oracle, stats)
        tp = res.free_set
    raise InternalError(f"growth cap {cap} exhausted without an outcome")


def _side_instance(inst: Instance, strict: frozenset, k: int):
    ts = [t for t in inst.terminals if t in strict and inst.adj[t][0] in strict]
    return induced_subinstance(inst, strict, terminals=ts, k=k)


def _recurse_split(inst, sep: Separation, k, r, cap, oracle, stats) -> EpOutcome:
    px = find_valid_path(inst, sep.side_a)
    py = find_valid_path(inst, sep.side_b, sep.separator)
    if px is None or py is None:
        raise InternalError("split sides do not both hold a valid path")
    results = []
    for strict, other in ((sep.a_only, py), (sep.b_only, px)):
        sub, old = _side_instance(inst, strict, k - 1)
        stats.depth += 1
        out = ep_cover_or_pack(sub, k - 1, r, cap, stats)
        stats.depth -= 1
        if isinstance(out, Paths):
            lifted = out.paths.map(lambda v: old[v])
            ps = PathSet(lifted.paths + (tuple(other),))
            if not verify_solution(inst.with_k(k), ps):
                raise InternalError("recursion paths collide with the side path")
            return Paths(ps)
        if isinstance(out, MatchingWitness):
            w = out.witness
            return MatchingWitness(PatternWitness(w.kind, tuple(old[v] for v in w.vertices)))
        results.append(frozenset(old[v] for v in out.vertices))
    z = results[0] | results[1] | sep.separator
    if not verify_hitting_set(inst, z):
        raise InternalError("merged hitting set fails")
    return HittingSet(z)


def verify_outcome(inst: Instance, out: EpOutcome, k: int, r: int) -> bool:
    if isinstance(out, Paths):
        return verify_solution(inst.with_k(k), out.paths)
    if isinstance(out, HittingSet):
        return verify_hitting_set(inst, out.vertices) and len(out.vertices) <= hitting_bound(k, r)
    w = out.witness
    return w.kind == INDUCED_MATCHING and w.size >= r and verify_witness(inst.demand_graph(), w)


def _dedupe(path):
    out = []
    for v in path:
        if not out or out[-1] != v:
            out.append(v)
    return out


def ep_cover_top(inst: Instance, k: int, r: int, cap: int | None = None,
                 stats: EpStats | None = None) -> EpOutcome:
    """Cover-or-pack on an arbitrary instance, answered in its own vertex ids."""
    pre = attach_degree_one_terminals(Instance(inst.n, inst.edges, inst.terminals, inst.demand, k))
    out = ep_cover_or_pack(pre, k, r, cap, stats)
    lift = pre.lift
    if isinstance(out, Paths):
        return Paths(PathSet.of(_dedupe([lift(v) for v in p]) for p in out.paths))
    if isinstance(out, HittingSet):
        return HittingSet(frozenset(lift(v) for v in out.vertices))
    w = out.witness
    return MatchingWitness(PatternWitness(w.kind, tuple(lift(v) for v in w.vertices)))


@dataclass(frozen=True)
class ApproxRun:
    paths: PathSet
    stop: EpOutcome | None
    schedule: tuple[int, ...]


def fpt_approx_run(inst: Instance, r: int, cap: int | None = None) -> ApproxRun:
    """Double k = 1, 2, 4, ... until the first outcome that is not Paths."""
    best = PathSet()
    k = 1
    tried = []
    stop = None
    while True:
        tried.append(k)
        out = ep_cover_top(inst, k, r, cap)
        if not isinstance(out, Paths):
            stop = out
            break
        best = out.paths
        k *= 2
    return ApproxRun(best, stop, tuple(tried))


def fpt_approx(inst: Instance, r: int, cap: int | None = None) -> PathSet:
    return fpt_approx_run(inst, r, cap).paths
