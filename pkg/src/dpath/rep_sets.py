"""Representative sets of compatible vectors and of partial solutions at a separation."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import networkx as nx

from .graph_core import Instance, InvalidInput, PathSet, PatternWitness, Separation, link_indexed
from .pattern_ramsey import RamseyFailure, staircase_to_witness

Vector = tuple
VectorQuery = Callable[[Sequence[frozenset]], "Vector | None"]


@dataclass(frozen=True)
class RepSet:
    items: tuple

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)


def trigger_height(r: int) -> int:
    return 4 ** (4 * r)


def within_vector_bound(size: int, d: int, r: int) -> bool:
    """size <= (d+1)^(d*4^(4r)), compared in log space."""
    if size <= 1:
        return True
    if d == 0:
        return False
    return math.log(size) <= d * trigger_height(r) * math.log(d + 1)


def explicit_query(R: Iterable[Vector]) -> VectorQuery:
    vecs = sorted(set(tuple(a) for a in R))

    def query(boxes):
        for a in vecs:
            if all(x in box for x, box in zip(a, boxes)):
                return a
        return None

    return query


class _Node:
    __slots__ = ("boxes", "pair", "children", "path")

    def __init__(self, boxes, path):
        self.boxes = boxes
        self.pair = None
        self.children = ()
        # (child index taken, a, b) for each nonempty ancestor
        self.path = path


def representative_vectors(H: nx.Graph, d: int, query: VectorQuery, r: int,
                           trigger: int | None = None) -> RepSet | PatternWitness:
    """Representative subset of the vectors reachable through ``query``, or a pattern witness.

    ``trigger`` is the number of same-index nodes on a root-leaf path that
    starts the staircase extraction (default 4^(4r)).
    """
    trigger = trigger_height(r) if trigger is None else trigger
    verts = frozenset(H.nodes)
    nbr = {v: frozenset(H[v]) - {v} for v in verts}

    def neighbourhood(box):
        out = set()
        for v in box:
            out |= nbr[v]
        return frozenset(out)

    root = _Node(tuple(verts for _ in range(d)), ())
    found: list[Vector] = []
    q = deque([root])
    while q:
        u = q.popleft()
        boxes_a = tuple(neighbourhood(b) for b in u.boxes)
        a = query(boxes_a)
        if a is None:
            continue
        a = tuple(a)
        if len(a) != d or any(x not in box for x, box in zip(a, boxes_a)):
            raise InvalidInput(f"query returned {a} outside the requested box")
        b = tuple(min(nbr[x] & box) for x, box in zip(a, u.boxes))
        u.pair = (a, b)
        found.append(a)
        kids = []
        for j in range(d):
            boxes = list(u.boxes)
            for jj in range(j):
                boxes[jj] = boxes[jj] & nbr[a[jj]]
            boxes[j] = boxes[j] - nbr[a[j]]
            path = u.path + ((j, a[j], b[j]),)
            same = [(x, y) for idx, x, y in path if idx == j]
            if len(same) >= trigger:
                w = _staircase(H, same, r)
                if w is not None:
                    return w
            kids.append(_Node(tuple(boxes), path))
        u.children = tuple(kids)
        q.extend(kids)
    return RepSet(tuple(found))


def _staircase(H, pairs, r):
    a = [x for x, _ in pairs]
    b = [y for _, y in pairs]
    try:
        return staircase_to_witness(H, a, b, r)
    except (RamseyFailure, InvalidInput):
        # coordinates repeating across levels or too short a staircase: keep growing
        return None


# --- partial solutions --------------------------------------------------------

@dataclass(frozen=True)
class PartialSolutionType:
    s0: frozenset
    join: tuple
    matching: frozenset

    @property
    def d(self) -> int:
        return len(self.join)


@dataclass(frozen=True)
class PartialSolution:
    ptype: PartialSolutionType
    inner: tuple
    paths: PathSet


def partial_solution_at(sol: PathSet, sep: Separation) -> PathSet:
    """Maximal pieces of the solution paths inside side A."""
    pieces = []
    for p in sol:
        cur: list[int] = []
        for v in p:
            if v in sep.side_a:
                cur.append(v)
            else:
                if cur:
                    pieces.append(tuple(cur))
                cur = []
        if cur:
            pieces.append(tuple(cur))
    return PathSet(tuple(pieces))


def classify_partial_solution(ps: PathSet, sep: Separation, T: Iterable[int]) -> tuple[PartialSolutionType, tuple]:
    """Type (S0, J, M) of a partial solution and its inner vector ordered by J."""
    T = frozenset(T)
    S = sep.separator
    s0, joins, match = set(), {}, set()
    for p in ps:
        if any(v not in sep.side_a for v in p):
            raise InvalidInput(f"path {p} leaves side A")
        if len(p) == 1:
            if p[0] not in S:
                raise InvalidInput(f"single-vertex path {p} not on the separator")
            s0.add(p[0])
            continue
        x, y = p[0], p[-1]
        if x in S and y in S:
            match.add((min(x, y), max(x, y)))
        elif x in T and y in S:
            joins[y] = x
        elif y in T and x in S:
            joins[x] = y
        else:
            raise InvalidInput(f"path {p} needs one end on the separator and the other in T or S")
    order = tuple(sorted(joins))
    return PartialSolutionType(frozenset(s0), order, frozenset(match)), tuple(joins[v] for v in order)


def enumerate_types(S: Iterable[int], max_join: int | None = None) -> list[PartialSolutionType]:
    """All disjoint (S0, J, M) on S, J sorted ascending; deterministic order."""
    S = sorted(S)
    out = []

    def rec(i, s0, js, m, used):
        if i == len(S):
            if max_join is None or len(js) <= max_join:
                out.append(PartialSolutionType(frozenset(s0), tuple(sorted(js)), frozenset(m)))
            return
        v = S[i]
        if v in used:
            rec(i + 1, s0, js, m, used)
            return
        rec(i + 1, s0, js, m, used)
        rec(i + 1, s0 + [v], js, m, used)
        rec(i + 1, s0, js + [v], m, used)
        for w in S[i + 1:]:
            if w not in used:
                rec(i + 1, s0, js, m + [(v, w)], used | {w})

    rec(0, [], [], [], frozenset())
    return out


def _check_separation(inst: Instance, sep: Separation) -> None:
    if sep.separator & inst.terminal_set:
        raise InvalidInput("separator meets the terminals")
    for s, t in inst.demand:
        if s in sep.side_a and t in sep.side_a:
            raise InvalidInput(f"demand edge ({s},{t}) lies inside side A")
    if not sep.is_valid(inst.adj, range(inst.n)):
        raise InvalidInput("not a separation of the supply graph")


def type_query(inst: Instance, sep: Separation, ptype: PartialSolutionType,
               store: dict, budget: int | None = None) -> VectorQuery:
    """Query for inner vectors of type-``ptype`` partial solutions, via disjoint paths."""
    keep = sorted(sep.side_a - ptype.s0)
    idx = {v: i for i, v in enumerate(keep)}
    n = len(keep)
    base = [[idx[w] for w in inst.adj[v] if w in idx] for v in keep]
    T_a = inst.terminal_set & set(keep)
    fixed = [(idx[u], idx[v]) for u, v in sorted(ptype.matching)]

    def query(boxes):
        adj = list(base)
        pairs = []
        for j, (v, box) in enumerate(zip(ptype.join, boxes)):
            hub = n + j
            hits = sorted(idx[x] for x in box & T_a)
            adj.append(hits)
            for x in hits:
                adj[x] = adj[x] + [hub]
            pairs.append((hub, idx[v]))
        sol = link_indexed(adj, pairs + fixed, budget)
        if sol is None:
            return None
        paths = [tuple(keep[x] for x in p[1:]) for p in sol[:ptype.d]]
        paths += [tuple(keep[x] for x in p) for p in sol[ptype.d:]]
        paths += [(v,) for v in sorted(ptype.s0)]
        inner = tuple(p[0] for p in paths[:ptype.d])
        store.setdefault(inner, PathSet(tuple(paths)))
        return inner

    return query


def representative_partial_solutions(inst: Instance, sep: Separation, k: int, r: int,
                                     trigger: int | None = None,
                                     budget: int | None = None) -> RepSet | PatternWitness:
    """A representative set of partial solutions at ``sep`` (type by type), or a witness.

    The staircase trigger uses r* = max(r, 10k^2) unless ``trigger`` is given.
    """
    _check_separation(inst, sep)
    rstar = max(r, 10 * k * k)
    H = inst.demand_graph()
    members = []
    for ptype in enumerate_types(sep.separator, max_join=k):
        store: dict = {}
        out = representative_vectors(H, ptype.d, type_query(inst, sep, ptype, store, budget), rstar, trigger)
        if isinstance(out, PatternWitness):
            return out
        for inner in out:
            members.append(PartialSolution(ptype, inner, store[inner]))
    return RepSet(tuple(members))


def outer_vector(sol: PathSet, sep: Separation, ptype: PartialSolutionType, T: Iterable[int]) -> tuple:
    """For each join vertex, the far terminal of the solution path through it."""
    T = frozenset(T)
    far = {}
    for p in sol:
        for end, other in ((p[0], p[-1]), (p[-1], p[0])):
            if end in sep.side_a and end in T:
                far[end] = other
    out = []
    for v in ptype.join:
        for p in sol:
            if v in p:
                end = p[0] if p[0] in sep.side_a and p[0] in T else p[-1]
                out.append(far[end])
                break
    return tuple(out)


def replace_partial(inst: Instance, sol: PathSet, sep: Separation, new: PathSet) -> PathSet | None:
    """(P - E(G[V(A)])) + new, decomposed into paths; None if it is not a path system."""
    A = sep.side_a
    edges = set()
    for p in sol:
        for u, v in zip(p, p[1:]):
            if not (u in A and v in A):
                edges.add((min(u, v), max(u, v)))
    for p in new:
        for u, v in zip(p, p[1:]):
            edges.add((min(u, v), max(u, v)))
    g = nx.Graph(edges)
    if any(deg > 2 for _, deg in g.degree):
        return None
    paths = []
    for comp in nx.connected_components(g):
        sub = g.subgraph(comp)
        ends = sorted(v for v in comp if sub.degree(v) == 1)
        if len(ends) != 2:
            return None
        paths.append(tuple(nx.shortest_path(sub, ends[0], ends[1])))
    return PathSet.of(sorted(paths))


def replacement_for(inst: Instance, rep: RepSet, sol: PathSet, sep: Separation) -> PathSet | None:
    """Swap the solution's A-part for a member of ``rep`` of the same type matching its outer vector."""
    T = inst.terminal_set
    ptype, _ = classify_partial_solution(partial_solution_at(sol, sep), sep, T)
    outer = outer_vector(sol, sep, ptype, T)
    for m in rep:
        if m.ptype != ptype:
            continue
        if all(y in inst.hadj.get(x, ()) for x, y in zip(m.inner, outer)):
            return replace_partial(inst, sol, sep, m.paths)
    return None
