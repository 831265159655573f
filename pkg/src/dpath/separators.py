"""Important separators and the P-free / P-tight separation machinery.

Graphs are handled as adjacency dicts ``{v: set(neighbours)}``; networkx
graphs and Instances are converted on entry.  The family P is never listed;
it is probed through a monotone membership oracle on vertex sets.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterable

import networkx as nx

from .graph_core import Instance, InvalidInput, Separation, degree_one_ok

Adj = dict


def as_adj(g) -> Adj:
    if isinstance(g, Instance):
        return {v: set(g.adj[v]) for v in range(g.n)}
    if isinstance(g, nx.Graph):
        return {v: set(w for w in g[v] if w != v) for v in g.nodes}
    return {v: set(ws) for v, ws in g.items()}


def subgraph(adj: Adj, keep: Iterable, drop_inside: Iterable = ()) -> Adj:
    """Induced subgraph on ``keep`` minus the edges with both ends in ``drop_inside``."""
    keep = set(keep)
    drop = set(drop_inside)
    out = {}
    for v in keep:
        nb = adj[v] & keep
        if v in drop:
            nb = nb - drop
        out[v] = nb
    return out


def component_of(adj: Adj, start, removed=frozenset()) -> set:
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in removed and w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def components_of(adj: Adj, vertices: Iterable) -> list[set]:
    vs = set(vertices)
    out = []
    left = set(vs)
    for s in sorted(vs, key=_key):
        if s not in left:
            continue
        comp = {s}
        stack = [s]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w in left and w not in comp:
                    comp.add(w)
                    stack.append(w)
        left -= comp
        out.append(comp)
    return out


def _key(v):
    return (0, v) if isinstance(v, int) else (1, repr(v))


def _sorted(vs) -> list:
    return sorted(vs, key=_key)


# --- oracle -----------------------------------------------------------------

class POracle:
    """Membership oracle for a monotone family of connected subgraphs.

    ``query(X, drop)`` answers whether the graph induced on X, minus the
    edges inside ``drop``, contains a member.  Answers are memoised.
    """

    def __init__(self, fn: Callable[[frozenset, frozenset], bool], avoid: frozenset = frozenset()):
        self._fn = fn
        self._memo: dict = {}
        self.avoid = frozenset(avoid)
        self.calls = 0

    def __call__(self, X: Iterable, drop: Iterable = ()) -> bool:
        xs = frozenset(X) - self.avoid
        dr = frozenset(drop) & xs
        key = (xs, dr)
        if key not in self._memo:
            self.calls += 1
            self._memo[key] = bool(self._fn(xs, dr))
        return self._memo[key]

    def restrict(self, avoid: Iterable) -> "POracle":
        """Oracle for the members avoiding ``avoid`` (shares the memo)."""
        sub = POracle(self._fn, self.avoid | frozenset(avoid))
        sub._memo = self._memo
        return sub


def truncated_valid_path_oracle(inst: Instance) -> POracle:
    """Oracle for {P - T : P valid}; needs terminals independent and of degree one."""
    if not degree_one_ok(inst):
        raise InvalidInput("truncated-path oracle needs independent degree-one terminals")
    T = inst.terminal_set
    nb = {t: inst.adj[t][0] for t in inst.terminals}
    pairs = [(nb[s], nb[t]) for s, t in inst.demand]
    adj = inst.adj

    def fn(xs: frozenset, drop: frozenset) -> bool:
        inner = xs - T
        comp: dict[int, int] = {}
        for s in inner:
            if s in comp:
                continue
            comp[s] = s
            stack = [s]
            while stack:
                v = stack.pop()
                for w in adj[v]:
                    if w in inner and w not in comp and not (v in drop and w in drop):
                        comp[w] = s
                        stack.append(w)
        return any(a in comp and b in comp and comp[a] == comp[b] for a, b in pairs)

    return POracle(fn)


# --- important separators ---------------------------------------------------

@dataclass(frozen=True)
class ImportantSeparator:
    vertices: frozenset
    reach: frozenset


_INF = 1 << 30


def _min_cut(adj: Adj, X: set, Y: set, limit: int):
    """Augmenting-path vertex min cut between X and Y.

    Returns None when X touches Y or the cut exceeds ``limit``; otherwise
    (size, S, R) where S is the min cut furthest from X and R its X-side reach.
    """
    for x in X:
        if adj[x] & Y:
            return None
    verts = list(adj)
    idx = {v: i for i, v in enumerate(verts)}
    n = len(verts)
    src, snk = 2 * n, 2 * n + 1
    head = [[] for _ in range(2 * n + 2)]
    to: list[int] = []
    cap: list[int] = []

    def add(u, v, c):
        head[u].append(len(to))
        to.append(v)
        cap.append(c)
        head[v].append(len(to))
        to.append(u)
        cap.append(0)

    # vertex v: in-node 2i, out-node 2i+1
    for v in verts:
        i = idx[v]
        add(2 * i, 2 * i + 1, _INF if v in X or v in Y else 1)
        for w in adj[v]:
            add(2 * i + 1, 2 * idx[w], _INF)
    for x in X:
        add(src, 2 * idx[x], _INF)
    for y in Y:
        add(2 * idx[y] + 1, snk, _INF)
    flow = 0
    while flow <= limit:
        parent = [-1] * (2 * n + 2)
        parent[src] = -2
        q = deque([src])
        while q and parent[snk] == -1:
            u = q.popleft()
            for e in head[u]:
                w = to[e]
                if cap[e] > 0 and parent[w] == -1:
                    parent[w] = e
                    q.append(w)
        if parent[snk] == -1:
            break
        w = snk
        while w != src:
            e = parent[w]
            cap[e] -= 1
            cap[e ^ 1] += 1
            w = to[e ^ 1]
        flow += 1
    if flow > limit:
        return None
    # nodes that can still reach the sink in the residual graph
    back = [False] * (2 * n + 2)
    back[snk] = True
    q = deque([snk])
    while q:
        w = q.popleft()
        for e in head[w]:
            u = to[e]
            if not back[u] and cap[e ^ 1] > 0:
                back[u] = True
                q.append(u)
    S = {v for v in verts if not back[2 * idx[v]] and back[2 * idx[v] + 1]}
    R = set()
    for x in X:
        if x not in R:
            R |= component_of(adj, x, S)
    return flow, S, R


def _is_separator(adj: Adj, X, Y, S) -> bool:
    seen = set()
    for x in X:
        if x in seen:
            continue
        comp = component_of(adj, x, S)
        if comp & Y:
            return False
        seen |= comp
    return True


def _reach(adj: Adj, X, S) -> frozenset:
    out: set = set()
    for x in X:
        if x not in out:
            out |= component_of(adj, x, S)
    return frozenset(out)


def enumerate_important_separators(g, X: Iterable, Y: Iterable, p: int) -> list[ImportantSeparator]:
    """All important X-Y separators of size at most p."""
    adj = as_adj(g)
    X, Y = set(X), set(Y)
    if X & Y:
        raise InvalidInput("X and Y must be disjoint")
    if p < 0:
        return []
    cands: set[frozenset] = set()

    def branch(sub: Adj, xs: set, budget: int, chosen: frozenset):
        res = _min_cut(sub, xs, Y, budget)
        if res is None:
            return
        size, S, R = res
        if size == 0:
            cands.add(chosen)
            return
        v = min(S, key=_key)
        without = {u: ws - {v} for u, ws in sub.items() if u != v}
        branch(without, xs, budget - 1, chosen | {v})
        branch(sub, R | {v}, budget, chosen)

    branch(adj, X, p, frozenset())
    valid = []
    for S in cands:
        if not _is_separator(adj, X, Y, S):
            continue
        if any(_is_separator(adj, X, Y, S - {s}) for s in S):
            continue
        valid.append((S, _reach(adj, X, S)))
    out = []
    for S, K in valid:
        if any(len(S2) <= len(S) and K2 > K for S2, K2 in valid):
            continue
        out.append(ImportantSeparator(S, K))
    out.sort(key=lambda s: (len(s.vertices), _sorted(s.vertices)))
    if len(out) > 4 ** p:
        raise AssertionError("important separator count exceeds 4^p")
    return out


# --- P-free / P-tight -------------------------------------------------------

@dataclass(frozen=True)
class Free:
    pass


@dataclass(frozen=True)
class Certificate:
    separation: Separation


_APEX = ("apex",)


def _sep_key(sep: Separation):
    return (sep.order, _sorted(sep.side_a))


def test_p_free(g, T: Iterable, oracle: POracle) -> Free | Certificate:
    """Free, or a minimum-order separation trapping a P-element away from T."""
    adj = as_adj(g)
    T = set(T)
    if len(T) == 0:
        return Free()
    V = set(adj)
    aux = {v: set(ws) for v, ws in adj.items()}
    aux[_APEX] = set(T)
    for t in T:
        aux[t].add(_APEX)
    best = None
    seen_outside: dict = {}
    for y in _sorted(V - T):
        # K_S never meets T, so it lies in y's component of G - T
        outer = seen_outside.get(y)
        if outer is None:
            outer = frozenset(component_of(adj, y, T))
            for v in outer:
                seen_outside[v] = outer
        if not oracle(outer):
            continue
        for imp in enumerate_important_separators(aux, {y}, {_APEX}, len(T) - 1):
            K = imp.reach
            if not oracle(K):
                continue
            sep = Separation(frozenset(V - K), frozenset(K | imp.vertices))
            if best is None or _sep_key(sep) < _sep_key(best):
                best = sep
    return Free() if best is None else Certificate(best)


def find_p_tight(g, T: Iterable, oracle: POracle) -> Separation:
    """A P-tight separation for T of minimum order (at most |T|)."""
    adj = as_adj(g)
    T = set(T)
    V = set(adj)
    if not oracle(V - T):
        raise InvalidInput("no P-element in G - T")
    res = test_p_free(adj, T, oracle)
    if isinstance(res, Certificate):
        X, Y = set(res.separation.side_a), set(res.separation.side_b)
    else:
        X, Y = set(T), set(V)
    while True:
        sep = X & Y
        inner = Y - X
        comps = components_of(adj, inner)
        if len(comps) > 1:
            C = next(c for c in comps if oracle(c))
            X, Y = V - C, C | sep
            continue
        moved = False
        ysub = subgraph(adj, Y, sep)
        for x in _sorted(sep):
            nbrs = _sorted(adj[x] & inner)
            if not nbrs:
                continue
            xp = nbrs[0]
            T2 = sep | {xp}
            sub_oracle = oracle.restrict(T2)
            if not sub_oracle(Y - T2):
                continue
            cert = test_p_free(ysub, T2, sub_oracle)
            if isinstance(cert, Certificate):
                X2, Y2 = cert.separation.side_a, cert.separation.side_b
                X, Y = X | X2, set(Y2)
                moved = True
                break
        if not moved:
            return Separation(frozenset(X), frozenset(Y))


def traps(sep: Separation, oracle: POracle) -> bool:
    """Some P-element lies inside the strict B side."""
    return oracle(sep.b_only)


def side_a_has(sep: Separation, oracle: POracle) -> bool:
    return oracle(sep.side_a)


def side_b_has(sep: Separation, oracle: POracle) -> bool:
    return oracle(sep.side_b, sep.separator)
