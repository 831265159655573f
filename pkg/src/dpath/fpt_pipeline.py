"""Exact FPT pipeline: Gallai A-paths, irrelevant-terminal reductions and the main loop."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import networkx as nx

from .ep_cover import HittingSet, MatchingWitness, Paths, ep_cover_or_pack
from .graph_core import (
    CLIQUE,
    INDUCED_MATCHING,
    SKEW_BICLIQUE,
    BudgetExhausted,
    Instance,
    InvalidInput,
    PathSet,
    PatternWitness,
    Separation,
    attach_degree_one_terminals,
    components,
    solve_disjoint_pairs,
    verify_hitting_set,
    verify_solution,
)
from .rep_sets import RepSet, enumerate_types, representative_partial_solutions, trigger_height


class NotApplicable(Exception):
    """A reduction's precondition does not hold on this input."""


@dataclass(frozen=True)
class No:
    pass


@dataclass(frozen=True)
class SkewWitness:
    witness: PatternWitness


@dataclass(frozen=True)
class IrrelevantTerminal:
    terminal: int


@dataclass(frozen=True)
class Cover:
    vertices: frozenset


SolveOutcome = Paths | No | MatchingWitness | SkewWitness


class SolveBudgetExhausted(RuntimeError):
    def __init__(self, stage: str, removed: int, cause: BudgetExhausted):
        super().__init__(f"budget exhausted during {stage} after {removed} terminal removals ({cause})")
        self.stage = stage
        self.removed = removed
        self.cause = cause


# --- constants ----------------------------------------------------------------

@dataclass(frozen=True)
class Bound:
    """A threshold kept as log10 when it is too large to materialise."""
    log10: float
    exact: int | None = None

    @classmethod
    def of(cls, x: int) -> "Bound":
        return cls(math.log10(x) if x > 0 else -math.inf, x)

    def exceeded_by(self, count: int) -> bool:
        if self.exact is not None:
            return count > self.exact
        return count > 0 and math.log10(count) > self.log10

    def __str__(self) -> str:
        if self.exact is not None:
            return str(self.exact)
        return f"10^{self.log10:.4g}"


def _type_count(z: int, k: int) -> int:
    return len(enumerate_types(range(z), max_join=k)) if z <= 8 else 4 ** z * z ** z


def smsep_bound(k: int, r: int, z: int) -> Bound:
    """k times the representative-set bound over all types at a separator of order z."""
    rstar = max(r, 10 * k * k)
    d = min(z, k)
    types = _type_count(z, k)
    if d == 0:
        return Bound.of(k * types)
    lg = math.log10(k * types) + d * trigger_height(rstar) * math.log10(d + 1)
    return Bound(lg)


def sm_bound(k: int, r: int, z: int) -> Bound:
    s = smsep_bound(k, r, z)
    if s.exact is not None:
        return Bound.of(100 * z ** 4 * s.exact ** 2)
    return Bound(2 + 4 * math.log10(max(z, 1)) + 2 * s.log10)


def components_bound(z: int, q: int) -> int:
    return 100 * z ** 4 * q * q


def ep_hitting_bound_log10(k: int, r: int) -> float:
    return math.log10(4) + 20 * (k + r) * math.log10(5)


@dataclass(frozen=True)
class Thresholds:
    """Overrides for the reduction thresholds (None keeps the proof's value)."""
    smsep: int | None = None
    sm: int | None = None
    components: int | None = None
    rep_trigger: int | None = None
    # skip the separation reduction above this separator order (None: no limit)
    max_order: int | None = None

    @property
    def overridden(self) -> bool:
        return any(x is not None for x in (self.smsep, self.sm, self.components, self.rep_trigger, self.max_order))


def show_constants(k: int, r: int, z: int, q: int | None = None) -> dict:
    q = q if q is not None else 1
    return {
        "k": k, "r": r, "z": z,
        "ep_growth_cap_log10": 10 * (k + r) * math.log10(5),
        "ep_hitting_bound_log10": ep_hitting_bound_log10(k, r),
        "rstar": max(r, 10 * k * k),
        "smsep": str(smsep_bound(k, r, z)),
        "sm": str(sm_bound(k, r, z)),
        "components_threshold": components_bound(z, q),
        "gallai_cover_max": 2 * k - 2,
        "clique_size": 10 * k * k,
    }


# --- Gallai A-paths -----------------------------------------------------------

def _split_graph(g: nx.Graph, A: set) -> nx.Graph:
    h = nx.Graph()

    def copies(v):
        return [(v, 0)] if v in A else [(v, 1), (v, 2)]

    for v in g.nodes:
        h.add_nodes_from(copies(v))
        if v not in A:
            h.add_edge((v, 1), (v, 2))
    for u, v in g.edges:
        if u != v:
            h.add_edges_from((x, y) for x in copies(u) for y in copies(v))
    return h


def _max_matching(h: nx.Graph) -> set:
    return {tuple(sorted(e, key=repr)) for e in nx.max_weight_matching(h, maxcardinality=True)}


def _extract_a_paths(h: nx.Graph, matching: set, A: set) -> list[tuple]:
    base = {tuple(sorted(((v, 1), (v, 2)), key=repr)) for v, c in h.nodes if c == 1}
    diff = nx.Graph()
    diff.add_edges_from(matching ^ base)
    out = []
    for a in sorted(A, key=repr):
        x = (a, 0)
        if x not in diff or diff.degree(x) != 1:
            continue
        walk = [x]
        prev, cur = None, x
        while True:
            nxt = [y for y in diff[cur] if y != prev]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
            walk.append(cur)
        if cur != x and cur[1] == 0 and repr(a) < repr(cur[0]):
            path = []
            for v, _ in walk:
                if not path or path[-1] != v:
                    path.append(v)
            out.append(tuple(path))
    return out


def _cover_ok(g: nx.Graph, A: set, S: set) -> bool:
    rest = g.subgraph(set(g.nodes) - S)
    return all(len((c & A) - S) <= 1 for c in nx.connected_components(rest))


def gallai_a_paths(g: nx.Graph, A: Iterable, k: int) -> Paths | Cover:
    """k disjoint A-paths, or at most 2k-2 vertices leaving one A-vertex per component.

    Packing via the split-vertex matching reduction; the cover comes from the
    Gallai-Edmonds barrier of the split graph plus all but one A-vertex of
    each remaining component.
    """
    A = set(A) & set(g.nodes)
    h = _split_graph(g, A)
    mat = _max_matching(h)
    paths = _extract_a_paths(h, mat, A)
    if len(paths) >= k:
        return Paths(PathSet.of(paths[:k]))
    nu = len(mat)
    D = set()
    for x in h.nodes:
        hh = h.copy()
        hh.remove_node(x)
        if len(_max_matching(hh)) == nu:
            D.add(x)
    barrier = {y for x in D for y in h[x]} - D
    S = {v for v, _ in barrier}
    rest = g.subgraph(set(g.nodes) - S)
    for comp in nx.connected_components(rest):
        a = sorted(comp & A, key=repr)
        S |= set(a[1:])
    if len(S) > 2 * len(paths) or not _cover_ok(g, A, S):
        raise AssertionError(f"Gallai cover of size {len(S)} fails for packing {len(paths)}")
    return Cover(frozenset(S))


# --- clique reduction ---------------------------------------------------------

def _valid_path_in(inst: Instance, comp: set) -> tuple | None:
    g = inst.graph().subgraph(comp)
    for s, t in inst.demand:
        if s in comp and t in comp:
            return tuple(nx.shortest_path(g, s, t))
    return None


def reduce_clique(inst: Instance, K: Iterable[int], k: int) -> Paths | IrrelevantTerminal:
    """k valid paths among the clique terminals, or an irrelevant terminal of K."""
    K = sorted(set(K))
    for i, u in enumerate(K):
        for v in K[i + 1:]:
            if v not in inst.hadj.get(u, ()):
                raise InvalidInput(f"K is not a demand clique: ({u},{v}) missing")
    g = inst.graph()
    res = gallai_a_paths(g, K, k)
    if isinstance(res, Paths):
        return Paths(res.paths)
    S = set(res.vertices)
    Kset = set(K)
    comps = [set(c) for c in components(inst.adj, S)]
    kcomps = [c for c in comps if len(c & Kset) == 1]
    touching = {v: 0 for v in S}
    nbrs = []
    for c in kcomps:
        nc = {w for v in c for w in inst.adj[v]} - c
        nbrs.append(nc)
        for v in nc:
            touching[v] += 1
    Sp = {v for v in S if touching[v] >= 5 * k + 1}
    cands = sorted((min(c & Kset), c) for c, nc in zip(kcomps, nbrs) if nc <= Sp)
    if len(K) >= 10 * k * k:
        assert len(K) - len(S) > 10 * (k * k - k) + k - 1, "clique margin arithmetic"
    if len(cands) < k:
        if len(K) >= 10 * k * k:
            raise AssertionError("fewer than k isolated clique components above the size threshold")
        raise NotApplicable(f"only {len(cands)} clique components with neighbourhood in S'")
    picked = cands[:k]
    sol = []
    for t, c in picked:
        p = _valid_path_in(inst, c)
        if p is None:
            return IrrelevantTerminal(t)
        sol.append(p)
    ps = PathSet.of(sol)
    if not verify_solution(inst.with_k(k), ps):
        raise AssertionError("component paths are not a solution")
    return Paths(ps)


# --- separation reduction -----------------------------------------------------

def _witness_outcome(w: PatternWitness):
    if w.kind == INDUCED_MATCHING:
        return MatchingWitness(w)
    if w.kind == SKEW_BICLIQUE:
        return SkewWitness(w)
    return None


def irrelevant_from_separation(inst: Instance, sep: Separation, k: int, r: int,
                               thresholds: Thresholds = Thresholds(),
                               budget: int | None = None):
    """An unused terminal of side A, or paths / witness from the clique and pattern branches."""
    if thresholds.max_order is not None and sep.order > thresholds.max_order:
        raise NotApplicable(f"separator of order {sep.order} above max_order {thresholds.max_order}")
    TA = sorted(inst.terminal_set & sep.side_a)
    bound = Bound.of(thresholds.smsep) if thresholds.smsep is not None else smsep_bound(k, r, sep.order)
    if not bound.exceeded_by(len(TA)):
        raise NotApplicable(f"{len(TA)} terminals in A, need more than {bound}")
    rep = representative_partial_solutions(inst, sep, k, r, trigger=thresholds.rep_trigger, budget=budget)
    if isinstance(rep, PatternWitness):
        out = _witness_outcome(rep)
        if out is not None:
            return out
        return reduce_clique(inst, rep.vertices, k)
    used = set()
    for m in rep:
        for p in m.paths:
            used.update(v for v in (p[0], p[-1]) if v in inst.terminal_set)
    for t in TA:
        if t not in used:
            return IrrelevantTerminal(t)
    raise NotApplicable("every terminal of A is used by the representative set")


# --- component reduction ------------------------------------------------------

def _component_index(inst: Instance, Z: set):
    comps = components(inst.adj, Z)
    where = {}
    for i, c in enumerate(comps):
        for v in c:
            where[v] = i
    return comps, where


def reduce_components(inst: Instance, Z: Iterable[int], q: int,
                      threshold: int | None = None) -> IrrelevantTerminal:
    """Mark terminals per ordered pair of hitting-set vertices; return an unmarked one."""
    Z = set(Z)
    T = inst.terminal_set
    if Z & T:
        raise NotApplicable("Z meets the terminals")
    comps, where = _component_index(inst, Z)
    for c in comps:
        ts = [t for t in c if t in T]
        if len(ts) > q:
            raise NotApplicable(f"a component of G-Z holds {len(ts)} > q terminals")
        for t in ts:
            if inst.hadj[t] & set(ts):
                raise NotApplicable("terminals of one component are adjacent in H")
    thr = components_bound(len(Z), q) if threshold is None else threshold
    if len(T) <= thr:
        raise NotApplicable(f"|T| = {len(T)} is at most {thr}")
    reach = {}
    for z in Z:
        near = {where[w] for w in inst.adj[z] if w not in Z}
        reach[z] = {t for t in T if where[t] in near}
    b = 2 * len(Z) * q + 1
    marked = set()
    for z1 in sorted(Z):
        for z2 in sorted(Z):
            pairs = sorted((t1, t2) for t1 in reach[z1] for t2 in inst.hadj[t1] if t2 in reach[z2])
            chosen, used = [], set()
            for t1, t2 in pairs:
                if t1 not in used and t2 not in used:
                    chosen.append((t1, t2))
                    used |= {t1, t2}
            if len(chosen) >= b:
                for t1, t2 in chosen[:b]:
                    marked |= {t1, t2}
                continue
            X = used
            marked |= X
            for u in sorted(X):
                partners = [t1 for t1, t2 in pairs if t2 == u]
                marked.update(partners[:b])
    for t in sorted(T):
        if t not in marked:
            return IrrelevantTerminal(t)
    raise NotApplicable("every terminal is marked")


# --- hitting-set dispatch -----------------------------------------------------

def irrelevant_from_hitting_set(inst: Instance, Z: Iterable[int], k: int, r: int,
                                thresholds: Thresholds = Thresholds(),
                                budget: int | None = None):
    """Route to the separation reduction (big component) or the component marking."""
    Z = set(Z)
    T = inst.terminal_set
    if Z & T:
        raise InvalidInput("Z must avoid the terminals")
    if not verify_hitting_set(inst, Z):
        raise InvalidInput("G - Z still contains a valid path")
    z = len(Z)
    sm = Bound.of(thresholds.sm) if thresholds.sm is not None else sm_bound(k, r, z)
    if not sm.exceeded_by(len(T)):
        raise NotApplicable(f"|T| = {len(T)} is at most {sm}")
    comps, _ = _component_index(inst, Z)
    counts = [(sum(1 for v in c if v in T), i) for i, c in enumerate(comps)]
    big, i = max(counts, key=lambda x: (x[0], -x[1]))
    sep_bound = Bound.of(thresholds.smsep) if thresholds.smsep is not None else smsep_bound(k, r, z)
    if sep_bound.exceeded_by(big):
        C = set(comps[i])
        nc = {w for v in C for w in inst.adj[v]} - C
        sep = Separation(frozenset(C | nc), frozenset(set(range(inst.n)) - C))
        return irrelevant_from_separation(inst, sep, k, r, thresholds, budget)
    return reduce_components(inst, Z, max(big, 1), thresholds.components)


# --- main loop ----------------------------------------------------------------

@dataclass
class IrrelevanceEvent:
    stage: str
    terminal: int
    before: Instance


@dataclass
class SolveStats:
    events: list = field(default_factory=list)
    ep_outcome: str = ""
    sequences: int = 0
    overridden: bool = False


def _stage_name(inst, Z, k, r, thresholds) -> str:
    comps, _ = _component_index(inst, set(Z))
    big = max((sum(1 for v in c if v in inst.terminal_set) for c in comps), default=0)
    sb = Bound.of(thresholds.smsep) if thresholds.smsep is not None else smsep_bound(k, r, len(Z))
    return "separation" if sb.exceeded_by(big) else "components"


def enumerate_pair_sequences(inst: Instance, k: int, budget: int | None = None,
                             stats: SolveStats | None = None) -> PathSet | None:
    """Try sets of k terminal-disjoint demand pairs; linkable subsets prune supersets."""
    edges = sorted(inst.demand)
    g = inst.graph()
    comp = {}
    for i, c in enumerate(nx.connected_components(g)):
        for v in c:
            comp[v] = i
    edges = [(s, t) for s, t in edges if comp[s] == comp[t]]

    def rec(start, chosen, used):
        if len(chosen) == k:
            return solve_disjoint_pairs(g, chosen, budget)
        for i in range(start, len(edges)):
            s, t = edges[i]
            if s in used or t in used:
                continue
            trial = chosen + [(s, t)]
            if stats is not None:
                stats.sequences += 1
            if len(trial) < k and solve_disjoint_pairs(g, trial, budget) is None:
                continue
            sol = rec(i + 1, trial, used | {s, t})
            if sol is not None:
                return sol
        return None

    if k <= 0:
        return PathSet()
    return rec(0, [], frozenset())


def solve_fpt(inst: Instance, k: int, r: int, thresholds: Thresholds = Thresholds(),
              cap: int | None = None, budget: int | None = None,
              recorder: Callable[[IrrelevanceEvent], None] | None = None,
              stats: SolveStats | None = None) -> SolveOutcome:
    """k disjoint valid paths, No, or an induced matching / skew biclique of H."""
    stats = stats if stats is not None else SolveStats()
    stats.overridden = thresholds.overridden
    inst = Instance(inst.n, inst.edges, inst.terminals, inst.demand, k)
    if k <= 0:
        return Paths(PathSet())
    pre = attach_degree_one_terminals(inst)
    stage = "ep_cover"
    try:
        out = ep_cover_or_pack(pre, k, r, cap)
        stats.ep_outcome = type(out).__name__
        if isinstance(out, Paths):
            ps = PathSet.of(_collapse([pre.lift(v) for v in p]) for p in out.paths)
            return Paths(ps)
        if isinstance(out, MatchingWitness):
            w = out.witness
            return MatchingWitness(PatternWitness(w.kind, tuple(pre.lift(v) for v in w.vertices)))
        # pendant terminals in Z are swapped for their unique neighbour
        Z = {pre.adj[v][0] if v in pre.terminal_set else v for v in out.vertices}
        stage = "irrelevant"
        cur = pre
        while True:
            try:
                res = irrelevant_from_hitting_set(cur, Z, k, r, thresholds, budget)
            except NotApplicable:
                break
            if isinstance(res, IrrelevantTerminal):
                name = _stage_name(cur, Z, k, r, thresholds)
                orig = cur.lift(res.terminal)
                if recorder is not None:
                    recorder(IrrelevanceEvent(name, orig, inst))
                stats.events.append((name, orig))
                inst = inst.drop_terminal(orig)
                cur = cur.drop_terminal(res.terminal)
                continue
            if isinstance(res, Paths):
                ps = PathSet.of(_collapse([pre.lift(v) for v in p]) for p in res.paths)
                if not verify_solution(inst, ps):
                    raise AssertionError("reduction paths are not a solution")
                return Paths(ps)
            w = res.witness
            lifted = PatternWitness(w.kind, tuple(pre.lift(v) for v in w.vertices))
            return type(res)(lifted)
        stage = "enumeration"
        sol = enumerate_pair_sequences(inst, k, budget, stats)
    except BudgetExhausted as e:
        raise SolveBudgetExhausted(stage, len(stats.events), e) from e
    if sol is None:
        return No()
    if not verify_solution(inst, sol):
        raise AssertionError("enumerated linkage is not a solution")
    return Paths(sol)


def _collapse(path):
    out = []
    for v in path:
        if not out or out[-1] != v:
            out.append(v)
    return tuple(out)
