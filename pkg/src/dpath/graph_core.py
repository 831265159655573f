"""Instance model, verification predicates and exact desk-scale oracles."""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import networkx as nx

from . import kernel

DEFAULT_BUDGET = 10**7

INDUCED_MATCHING = "InducedMatching"
SKEW_BICLIQUE = "SkewBiclique"
CLIQUE = "Clique"
BICLIQUE = "Biclique"
WITNESS_KINDS = (INDUCED_MATCHING, SKEW_BICLIQUE, CLIQUE, BICLIQUE)


class InvalidInput(ValueError):
    pass


class BudgetExhausted(RuntimeError):
    """The exact search ran out of its node budget.

    Never conflated with a negative answer.
    """

    def __init__(self, nodes: int, budget: int):
        super().__init__(f"search budget of {budget} nodes exhausted")
        self.nodes = nodes
        self.budget = budget


def default_budget() -> int:
    raw = os.environ.get("DPATH_BUDGET")
    if raw:
        try:
            return int(raw)
        except ValueError:
            raise InvalidInput(f"DPATH_BUDGET must be an integer, got {raw!r}") from None
    return DEFAULT_BUDGET


def _pair(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Instance:
    """Supply graph on 0..n-1, terminals, demand graph on the terminals, target k.

    ``origin`` maps each vertex to a vertex of the instance it was derived
    from (used by preprocessing); it does not take part in equality.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    terminals: tuple[int, ...]
    demand: tuple[tuple[int, int], ...]
    k: int = 0
    origin: tuple[int, ...] | None = field(default=None, compare=False, repr=False)

    @classmethod
    def make(cls, n: int, edges: Iterable, terminals: Iterable[int], demand: Iterable,
             k: int = 0, origin=None) -> "Instance":
        es = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidInput(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise InvalidInput(f"self-loop at {u}")
            es.add(_pair(u, v))
        ts = sorted({int(t) for t in terminals})
        for t in ts:
            if not 0 <= t < n:
                raise InvalidInput(f"terminal {t} out of range for n={n}")
        tset = set(ts)
        ds = set()
        for s, t in demand:
            s, t = int(s), int(t)
            if s == t:
                raise InvalidInput(f"demand self-loop at {s}")
            if s not in tset or t not in tset:
                raise InvalidInput(f"demand edge ({s},{t}) has a non-terminal endpoint")
            ds.add(_pair(s, t))
        if k < 0:
            raise InvalidInput("k must be non-negative")
        return cls(n, tuple(sorted(es)), tuple(ts), tuple(sorted(ds)), int(k),
                   tuple(origin) if origin is not None else None)

    @cached_property
    def adj(self) -> tuple[tuple[int, ...], ...]:
        nb: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            nb[u].append(v)
            nb[v].append(u)
        return tuple(tuple(sorted(x)) for x in nb)

    @cached_property
    def hadj(self) -> dict[int, frozenset[int]]:
        nb: dict[int, set[int]] = {t: set() for t in self.terminals}
        for s, t in self.demand:
            nb[s].add(t)
            nb[t].add(s)
        return {t: frozenset(x) for t, x in nb.items()}

    @cached_property
    def terminal_set(self) -> frozenset[int]:
        return frozenset(self.terminals)

    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges)
        return g

    def demand_graph(self) -> nx.Graph:
        h = nx.Graph()
        h.add_nodes_from(self.terminals)
        h.add_edges_from(self.demand)
        return h

    def with_k(self, k: int) -> "Instance":
        return Instance(self.n, self.edges, self.terminals, self.demand, k, self.origin)

    def drop_terminal(self, t: int) -> "Instance":
        """The same supply graph with t no longer a terminal."""
        ts = tuple(x for x in self.terminals if x != t)
        ds = tuple(e for e in self.demand if t not in e)
        return Instance(self.n, self.edges, ts, ds, self.k, self.origin)

    def lift(self, v: int) -> int:
        return self.origin[v] if self.origin is not None else v


@dataclass(frozen=True)
class Separation:
    """A pair of vertex sides covering the graph; edges inside the overlap belong to A."""

    side_a: frozenset[int]
    side_b: frozenset[int]

    @property
    def separator(self) -> frozenset[int]:
        return self.side_a & self.side_b

    @property
    def order(self) -> int:
        return len(self.side_a & self.side_b)

    @property
    def a_only(self) -> frozenset[int]:
        return self.side_a - self.side_b

    @property
    def b_only(self) -> frozenset[int]:
        return self.side_b - self.side_a

    def is_valid(self, adj: Sequence[Sequence[int]], vertices: Iterable[int] | None = None) -> bool:
        vs = set(range(len(adj))) if vertices is None else set(vertices)
        if self.side_a | self.side_b != vs:
            return False
        a_only, b_only = self.a_only, self.b_only
        return not any(w in b_only for v in a_only for w in adj[v])


@dataclass(frozen=True)
class PathSet:
    paths: tuple[tuple[int, ...], ...] = ()

    @classmethod
    def of(cls, paths: Iterable[Iterable[int]]) -> "PathSet":
        return cls(tuple(tuple(int(v) for v in p) for p in paths))

    def __len__(self) -> int:
        return len(self.paths)

    def __iter__(self):
        return iter(self.paths)

    def vertices(self) -> set[int]:
        return {v for p in self.paths for v in p}

    def map(self, f) -> "PathSet":
        return PathSet(tuple(tuple(f(v) for v in p) for p in self.paths))


@dataclass(frozen=True)
class PatternWitness:
    """An induced matching, skew biclique, clique or (subgraph-level) biclique.

    InducedMatching lists pairs consecutively (x1, y1, x2, y2, ...); the two
    biclique kinds list the a-side then the b-side.
    """

    kind: str
    vertices: tuple[int, ...]

    def __post_init__(self):
        if self.kind not in WITNESS_KINDS:
            raise InvalidInput(f"unknown witness kind {self.kind!r}")

    @property
    def size(self) -> int:
        if self.kind == CLIQUE:
            return len(self.vertices)
        return len(self.vertices) // 2


def is_path(adj: Sequence[Sequence[int]], path: Sequence[int]) -> bool:
    if not path or len(set(path)) != len(path):
        return False
    n = len(adj)
    if any(not 0 <= v < n for v in path):
        return False
    return all(path[i + 1] in adj[path[i]] for i in range(len(path) - 1))


def is_valid_path(inst: Instance, path: Sequence[int]) -> bool:
    if not is_path(inst.adj, path):
        raise InvalidInput(f"not a path of the supply graph: {list(path)}")
    s, t = path[0], path[-1]
    return s in inst.terminal_set and t in inst.hadj[s]


def verify_solution(inst: Instance, sol: PathSet) -> bool:
    if len(sol) < inst.k:
        return False
    seen: set[int] = set()
    for p in sol:
        if not is_path(inst.adj, p):
            return False
        if not is_valid_path(inst, p):
            return False
        if seen.intersection(p):
            return False
        seen.update(p)
    return True


def components(adj: Sequence[Sequence[int]], removed: Iterable[int] = (),
               within: Iterable[int] | None = None) -> list[list[int]]:
    """Connected components of the graph minus ``removed`` (restricted to ``within``)."""
    n = len(adj)
    alive = bytearray(n) if within is not None else bytearray(b"\x01") * n
    if within is not None:
        for v in within:
            alive[v] = 1
    for v in removed:
        alive[v] = 0
    comp = [-1] * n
    out = []
    for s in range(n):
        if not alive[s] or comp[s] >= 0:
            continue
        comp[s] = len(out)
        cur = [s]
        stack = [s]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if alive[w] and comp[w] < 0:
                    comp[w] = comp[s]
                    cur.append(w)
                    stack.append(w)
        out.append(sorted(cur))
    return out


def verify_hitting_set(inst: Instance, z: Iterable[int]) -> bool:
    zs = set(z)
    for comp in components(inst.adj, zs):
        cs = set(comp)
        for t in comp:
            if t in inst.terminal_set and inst.hadj[t] & cs:
                return False
    return True


def _csr(adj: Sequence[Sequence[int]]) -> tuple[list[int], list[int]]:
    indptr = [0]
    indices: list[int] = []
    for nb in adj:
        indices.extend(sorted(nb))
        indptr.append(len(indices))
    return indptr, indices


def _ensure_recursion(n: int) -> None:
    need = 4 * n + 1000
    if sys.getrecursionlimit() < need:
        sys.setrecursionlimit(need)


def exact_max_disjoint(inst: Instance, budget: int | None = None) -> PathSet | None:
    """k pairwise disjoint valid paths of ``inst`` or None.

    Exponential branch search; raises BudgetExhausted rather than guessing.
    """
    if inst.k == 0:
        return PathSet()
    budget = default_budget() if budget is None else budget
    n = inst.n
    indptr, indices = _csr(inst.adj)
    is_term = bytearray(n)
    for t in inst.terminals:
        is_term[t] = 1
    dem = bytearray(n * n)
    for s, t in inst.demand:
        dem[s * n + t] = 1
        dem[t * n + s] = 1
    _ensure_recursion(n)
    status, paths, nodes = kernel.pack_valid(n, indptr, indices, bytes(is_term), bytes(dem),
                                             inst.k, budget)
    if status == kernel.BUDGET:
        raise BudgetExhausted(nodes, budget)
    if status == kernel.NONE:
        return None
    return PathSet.of(paths)


def max_disjoint_value(inst: Instance, limit: int, budget: int | None = None) -> int:
    """Largest j <= limit such that j disjoint valid paths exist."""
    best = 0
    for j in range(1, limit + 1):
        if exact_max_disjoint(inst.with_k(j), budget) is None:
            break
        best = j
    return best


def _index_graph(g) -> tuple[list, dict, list[list[int]]]:
    if isinstance(g, Instance):
        nodes = list(range(g.n))
        return nodes, {v: v for v in nodes}, [list(x) for x in g.adj]
    nodes = sorted(g.nodes, key=lambda v: (0, v, "") if isinstance(v, int) else (1, 0, repr(v)))
    idx = {v: i for i, v in enumerate(nodes)}
    adj = [sorted(idx[w] for w in g[v] if w != v) for v in nodes]
    return nodes, idx, adj


def solve_disjoint_pairs(g, pairs: Sequence[tuple], budget: int | None = None) -> PathSet | None:
    """Vertex-disjoint paths, the i-th joining pairs[i][0] to pairs[i][1], or None.

    ``g`` is a networkx graph or an Instance; returned paths use g's node ids.
    """
    nodes, idx, adj = _index_graph(g)
    for s, t in pairs:
        if s not in idx or t not in idx:
            raise InvalidInput(f"pair ({s},{t}) not in graph")
    res = link_indexed(adj, [(idx[s], idx[t]) for s, t in pairs], budget)
    if res is None:
        return None
    return PathSet(tuple(tuple(nodes[v] for v in p) for p in res))


def link_indexed(adj: Sequence[Sequence[int]], pairs: Sequence[tuple[int, int]],
                 budget: int | None = None) -> list[list[int]] | None:
    """solve_disjoint_pairs on a 0..n-1 adjacency list."""
    budget = default_budget() if budget is None else budget
    if not pairs:
        return []
    indptr, indices = _csr(adj)
    _ensure_recursion(len(adj))
    status, paths, nodes_used = kernel.link_pairs(len(adj), indptr, indices,
                                                  [s for s, _ in pairs], [t for _, t in pairs], budget)
    if status == kernel.BUDGET:
        raise BudgetExhausted(nodes_used, budget)
    if status == kernel.NONE:
        return None
    return [list(p) for p in paths]


def max_flow_biclique(inst: Instance, S: Iterable[int], T2: Iterable[int]) -> int:
    """Maximum number of vertex-disjoint S-T2 paths (Menger)."""
    S, T2 = set(S), set(T2)
    for s in S:
        for t in T2:
            if t not in inst.hadj.get(s, ()):
                raise InvalidInput(f"demand is not a biclique on S x T2: missing ({s},{t})")
    if not S or not T2:
        return 0
    return len(disjoint_set_paths(inst.adj, S, T2))


def disjoint_set_paths(adj: Sequence[Sequence[int]], S: set[int], T2: set[int],
                       allowed: Iterable[int] | None = None) -> list[list[int]]:
    """A maximum family of vertex-disjoint S-T2 paths inside ``allowed``."""
    vs = set(range(len(adj))) if allowed is None else set(allowed)
    d = nx.DiGraph()
    src, snk = ("src",), ("snk",)
    for v in vs:
        d.add_edge((v, 0), (v, 1), capacity=1)
        for w in adj[v]:
            if w in vs:
                d.add_edge((v, 1), (w, 0), capacity=1)
    for s in S & vs:
        d.add_edge(src, (s, 0), capacity=1)
    for t in T2 & vs:
        d.add_edge((t, 1), snk, capacity=1)
    if src not in d or snk not in d:
        return []
    _, flow = nx.maximum_flow(d, src, snk)
    paths = []
    for (s, _), f in sorted(flow[src].items()):
        if f <= 0:
            continue
        path = [s]
        node = (s, 1)
        while True:
            nxt = next(w for w, x in sorted(flow[node].items(), key=lambda kv: str(kv[0])) if x > 0)
            flow[node][nxt] -= 1
            if nxt == snk:
                break
            path.append(nxt[0])
            node = (nxt[0], 1)
        paths.append(path)
    # paths may wander through other S/T2 vertices; trim to S..T2 segments
    out = []
    for p in paths:
        last_s = max(i for i, v in enumerate(p) if v in S)
        first_t = min(i for i, v in enumerate(p) if v in T2 and i >= last_s)
        out.append(p[last_s:first_t + 1])
    return out


def min_vertex_cut(adj: Sequence[Sequence[int]], S: set[int], T2: set[int],
                   allowed: Iterable[int] | None = None) -> set[int]:
    """A minimum vertex set (possibly meeting S or T2) hitting every S-T2 path."""
    vs = set(range(len(adj))) if allowed is None else set(allowed)
    d = nx.DiGraph()
    src, snk = ("src",), ("snk",)
    d.add_node(src)
    d.add_node(snk)
    for v in vs:
        d.add_edge((v, 0), (v, 1), capacity=1)
        for w in adj[v]:
            if w in vs:
                d.add_edge((v, 1), (w, 0), capacity=len(vs) + 1)
    for s in S & vs:
        d.add_edge(src, (s, 0), capacity=len(vs) + 1)
    for t in T2 & vs:
        d.add_edge((t, 1), snk, capacity=len(vs) + 1)
    _, (reach, _) = nx.minimum_cut(d, src, snk)
    return {v for v in vs if (v, 0) in reach and (v, 1) not in reach}


def induced_subinstance(inst: Instance, keep: Iterable[int], terminals: Iterable[int] | None = None,
                        demand: Iterable | None = None, k: int | None = None):
    """Relabel G[keep] onto 0..m-1; returns (sub-instance, old ids list)."""
    old = sorted(set(keep))
    new = {v: i for i, v in enumerate(old)}
    edges = [(new[u], new[v]) for u, v in inst.edges if u in new and v in new]
    ts = [t for t in (inst.terminals if terminals is None else terminals) if t in new]
    tset = set(ts)
    dem = inst.demand if demand is None else demand
    ds = [(new[s], new[t]) for s, t in dem if s in tset and t in tset]
    sub = Instance.make(len(old), edges, [new[t] for t in ts], ds, inst.k if k is None else k)
    return sub, old


def attach_degree_one_terminals(inst: Instance) -> Instance:
    """Give every terminal x a fresh pendant x'; the pendants become the terminals.

    ``origin`` of the result maps each pendant back to its terminal.
    """
    n = inst.n
    pend = {t: n + i for i, t in enumerate(inst.terminals)}
    edges = list(inst.edges) + [(t, p) for t, p in pend.items()]
    demand = [(pend[s], pend[t]) for s, t in inst.demand]
    origin = [inst.lift(v) for v in range(n)] + [inst.lift(t) for t in inst.terminals]
    return Instance.make(n + len(pend), edges, pend.values(), demand, inst.k, origin)


def degree_one_ok(inst: Instance) -> bool:
    """Terminals are pairwise non-adjacent and each has exactly one neighbour."""
    return all(len(inst.adj[t]) == 1 and inst.adj[t][0] not in inst.terminal_set
               for t in inst.terminals)
