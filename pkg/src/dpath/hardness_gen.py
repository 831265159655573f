"""Generators for the two hardness reductions: grid tiling, matching demand, skew labels.

Gadgets carry a name for every vertex (``Gadget.names``) so audits can address
labelled vertices, and one witness partial solution per representable state.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import networkx as nx
import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse import coo_matrix

from .graph_core import Instance, InvalidInput, PathSet, exact_max_disjoint, verify_solution


# --- grid tiling --------------------------------------------------------------

@dataclass(frozen=True)
class GridTilingInstance:
    k: int
    n: int
    sets: tuple  # k rows of k frozensets of (x, y), 1-based coordinates
    solution: tuple | None = None  # k rows of k pairs, when planted

    def S(self, i: int, j: int) -> frozenset:
        """S_{i,j} with 1-based indices."""
        return self.sets[i - 1][j - 1]

    def __post_init__(self):
        if len(self.sets) != self.k or any(len(row) != self.k for row in self.sets):
            raise InvalidInput("sets must be a k x k array")
        for row in self.sets:
            for s in row:
                for x, y in s:
                    if not (1 <= x <= self.n and 1 <= y <= self.n):
                        raise InvalidInput(f"pair ({x},{y}) outside [n]x[n]")


def gen_grid_tiling(k: int, n: int, seed: int = 0, planted: bool = True,
                    density: float = 0.3) -> GridTilingInstance:
    """Random grid tiling; when planted, row values x_i and column values y_j are chosen first."""
    if k < 1 or n < 1:
        raise InvalidInput("k and n must be positive")
    rng = random.Random(seed)
    universe = [(x, y) for x in range(1, n + 1) for y in range(1, n + 1)]
    sets = [[{p for p in universe if rng.random() < density} for _ in range(k)] for _ in range(k)]
    sol = None
    if planted:
        xs = [rng.randint(1, n) for _ in range(k)]
        ys = [rng.randint(1, n) for _ in range(k)]
        sol = tuple(tuple((xs[i], ys[j]) for j in range(k)) for i in range(k))
        for i in range(k):
            for j in range(k):
                sets[i][j].add(sol[i][j])
    frozen = tuple(tuple(frozenset(s) for s in row) for row in sets)
    return GridTilingInstance(k, n, frozen, sol)


def is_grid_tiling_solution(gt: GridTilingInstance, sol: Sequence[Sequence[tuple]]) -> bool:
    k = gt.k
    for i in range(k):
        for j in range(k):
            if tuple(sol[i][j]) not in gt.sets[i][j]:
                return False
            if j + 1 < k and sol[i][j][0] != sol[i][j + 1][0]:
                return False
            if i + 1 < k and sol[i][j][1] != sol[i + 1][j][1]:
                return False
    return True


def solve_grid_tiling(gt: GridTilingInstance) -> tuple | None:
    """Brute force: x is constant along rows and y along columns."""
    rng = range(1, gt.n + 1)
    for xs in itertools.product(rng, repeat=gt.k):
        for ys in itertools.product(rng, repeat=gt.k):
            sol = tuple(tuple((xs[i], ys[j]) for j in range(gt.k)) for i in range(gt.k))
            if is_grid_tiling_solution(gt, sol):
                return sol
    return None


def iota(x: int, y: int, n: int) -> int:
    return (x - 1) * n + y


# --- shared construction helper -------------------------------------------------

class _Builder:
    def __init__(self):
        self.ids: dict = {}
        self.names: list = []
        self.edges: set = set()
        self.labels: dict = {}

    def v(self, name) -> int:
        if name not in self.ids:
            self.ids[name] = len(self.names)
            self.names.append(name)
        return self.ids[name]

    def e(self, a, b) -> None:
        u, w = self.v(a), self.v(b)
        if u != w:
            self.edges.add((min(u, w), max(u, w)))

    def path(self, names) -> None:
        for a, b in zip(names, names[1:]):
            self.e(a, b)

    def label(self, name, value: int) -> None:
        if value == 0:
            raise InvalidInput("labels must be nonzero")
        self.labels[self.v(name)] = value

    def embed(self, g: "Gadget", prefix, fixed: dict | None = None) -> list[int]:
        """Copy ``g`` in; local ids in ``fixed`` are identified with existing vertices."""
        fixed = fixed or {}
        out = []
        for i, name in enumerate(g.names):
            if i in fixed:
                self.ids[(prefix, name)] = fixed[i]
                out.append(fixed[i])
            else:
                out.append(self.v((prefix, name)))
        for a, b in g.edges:
            u, w = out[a], out[b]
            self.edges.add((min(u, w), max(u, w)))
        for v, lab in g.labels.items():
            self.labels[out[v]] = lab
        return out


# --- matching reduction -----------------------------------------------------------

@dataclass(frozen=True)
class MatchingReduction:
    instance: Instance
    k_prime: int
    cycle_length: int
    names: tuple
    hitting: frozenset  # the c-vertices and connectors, |hitting| == k'
    witness: PathSet | None = None


def reduce_matching(gt: GridTilingInstance) -> MatchingReduction:
    """Planar instance whose demand graph is a perfect matching; k' paths iff gt is solvable.

    Every demand pair gets its own pair of degree-one terminals, so a cycle
    vertex shared by two pairs never makes the demand graph a non-matching.
    """
    k, n = gt.k, gt.n
    N = n * n
    bld = _Builder()
    cycles = {}
    for i in range(1, k + 1):
        for j in range(1, k + 1):
            order = []
            for s in range(1, 5):
                order.append(("a", i, j, s, 0))
                for t in range(1, N + 1):
                    order += [("b", i, j, s, t), ("a", i, j, s, t)]
                order.append(("c", i, j, s))
            bld.path(order + [order[0]])
            cycles[i, j] = order
    for i in range(1, k + 1):
        for j in range(1, k):
            for t in range(1, N + 1):
                bld.e(("h", i, j), ("b", i, j, 1, t))
                bld.e(("h", i, j), ("b", i, j + 1, 3, t))
    for i in range(1, k):
        for j in range(1, k + 1):
            for t in range(1, N + 1):
                bld.e(("v", i, j), ("b", i, j, 2, t))
                bld.e(("v", i, j), ("b", i + 1, j, 4, t))

    pairs = []
    for i in range(1, k + 1):
        for j in range(1, k + 1):
            for x, y in sorted(gt.S(i, j)):
                t = iota(x, y, n)
                for s in range(1, 5):
                    pairs.append((("a", i, j, s, t), ("a", i, j, s % 4 + 1, t - 1)))
    for i in range(1, k + 1):
        for j in range(1, k):
            for x, y in sorted(gt.S(i, j)):
                for x2, y2 in sorted(gt.S(i, j + 1)):
                    if x == x2:
                        pairs.append((("b", i, j, 1, iota(x, y, n)), ("b", i, j + 1, 3, iota(x2, y2, n))))
    # the vertical pairs compare S_{i,j} with the set below it, S_{i+1,j}
    for i in range(1, k):
        for j in range(1, k + 1):
            for x, y in sorted(gt.S(i, j)):
                for x2, y2 in sorted(gt.S(i + 1, j)):
                    if y == y2:
                        pairs.append((("b", i, j, 2, iota(x, y, n)), ("b", i + 1, j, 4, iota(x2, y2, n))))

    pendant = {}
    for idx, (u, w) in enumerate(pairs):
        pu, pw = ("p", idx, 0), ("p", idx, 1)
        bld.e(pu, u)
        bld.e(pw, w)
        pendant[u, w] = (pu, pw)

    hit = [("c", i, j, s) for i in range(1, k + 1) for j in range(1, k + 1) for s in range(1, 5)]
    hit += [("h", i, j) for i in range(1, k + 1) for j in range(1, k)]
    hit += [("v", i, j) for i in range(1, k) for j in range(1, k + 1)]
    k_prime = 4 * k * k + 2 * k * (k - 1)
    assert len(hit) == k_prime, "hitting set size differs from k'"

    ids = bld.ids
    terminals = [ids[p] for pp in pendant.values() for p in pp]
    demand = [(ids[a], ids[b]) for a, b in pendant.values()]
    inst = Instance.make(len(bld.names), bld.edges, terminals, demand, k_prime)

    witness = None
    if gt.solution is not None:
        sol = gt.solution
        paths = []

        def wrap(u, w, middle):
            pu, pw = pendant[u, w]
            return tuple(ids[x] for x in (pu, *middle, pw))

        for i in range(1, k + 1):
            for j in range(1, k + 1):
                t = iota(*sol[i - 1][j - 1], n)
                order = cycles[i, j]
                L = len(order)
                for s in range(1, 5):
                    u, w = ("a", i, j, s, t), ("a", i, j, s % 4 + 1, t - 1)
                    a = order.index(u)
                    steps = (order.index(w) - a) % L
                    paths.append(wrap(u, w, [order[(a + d) % L] for d in range(steps + 1)]))
        for i in range(1, k + 1):
            for j in range(1, k):
                u = ("b", i, j, 1, iota(*sol[i - 1][j - 1], n))
                w = ("b", i, j + 1, 3, iota(*sol[i - 1][j], n))
                paths.append(wrap(u, w, [u, ("h", i, j), w]))
        for i in range(1, k):
            for j in range(1, k + 1):
                u = ("b", i, j, 2, iota(*sol[i - 1][j - 1], n))
                w = ("b", i + 1, j, 4, iota(*sol[i][j - 1], n))
                paths.append(wrap(u, w, [u, ("v", i, j), w]))
        witness = PathSet.of(paths)
        if not verify_solution(inst, witness):
            raise AssertionError("planted matching-reduction witness is not a solution")

    return MatchingReduction(inst, k_prime, 4 * (2 * N + 2), tuple(bld.names),
                             frozenset(ids[h] for h in hit), witness)


# --- skew-labelled instances --------------------------------------------------------

def skew_valid(a: int, b: int) -> bool:
    return a * b < 0 and a + b <= 0


def valid_label_pairs(labels: dict) -> list[tuple[int, int]]:
    ts = sorted(labels)
    return [(u, w) for i, u in enumerate(ts) for w in ts[i + 1:] if skew_valid(labels[u], labels[w])]


@dataclass
class SkewLabeledInstance:
    n: int
    edges: tuple
    labels: dict  # vertex -> nonzero integer

    def __post_init__(self):
        for v, lab in self.labels.items():
            if lab == 0:
                raise InvalidInput(f"label of {v} is zero")
            if not 0 <= v < self.n:
                raise InvalidInput(f"labelled vertex {v} out of range")

    @property
    def terminals(self) -> list[int]:
        return sorted(self.labels)

    def is_valid_path(self, path: Sequence[int]) -> bool:
        a, b = path[0], path[-1]
        return a in self.labels and b in self.labels and skew_valid(self.labels[a], self.labels[b])

    def to_instance(self, k: int = 0) -> Instance:
        """Same graph; the demand graph joins every validly labelled pair."""
        return Instance.make(self.n, self.edges, self.terminals, valid_label_pairs(self.labels), k)


@dataclass(frozen=True)
class IndexedSkew:
    """Graph with terminals s_1..s_m, t_1..t_m; a path s_i .. t_j is valid iff i <= j."""
    n: int
    edges: tuple
    s: tuple
    t: tuple
    added: tuple = ()  # isolated vertices created to fill label gaps


def skew_labeled_to_indexed(sli: SkewLabeledInstance) -> IndexedSkew:
    """Injectivise, compact the label range, fill gaps with isolated vertices, then read off s_i / t_i."""
    T = sorted(sli.labels, key=lambda v: (sli.labels[v], v))
    size = len(T)
    lab = dict(sli.labels)
    if len(set(lab.values())) != size:
        lab = {v: 2 * sli.labels[v] * size - i for i, v in enumerate(T)}
    while lab and max(abs(x) for x in lab.values()) > 2 * size:
        used = {abs(x) for x in lab.values()}
        gap = next(x for x in range(1, 2 * size + 1) if x not in used)
        lab = {v: x - 1 if x > gap else x + 1 if x < -gap else x for v, x in lab.items()}
    m = max((abs(x) for x in lab.values()), default=0)
    n = sli.n
    present = set(lab.values())
    added = []
    for x in [*range(-m, 0), *range(1, m + 1)]:
        if x not in present:
            lab[n] = x
            added.append(n)
            n += 1
    by_label = {x: v for v, x in lab.items()}
    return IndexedSkew(n, tuple(sli.edges), tuple(by_label[i] for i in range(1, m + 1)),
                       tuple(by_label[-i] for i in range(1, m + 1)), tuple(added))


def indexed_to_skew_labeled(idx: IndexedSkew) -> SkewLabeledInstance:
    """Each s_i / t_i gets a fresh degree-one copy carrying label i / -i."""
    n = idx.n
    edges = list(idx.edges)
    labels = {}
    for sign, seq in ((1, idx.s), (-1, idx.t)):
        for i, v in enumerate(seq, start=1):
            edges.append((v, n))
            labels[n] = sign * i
            n += 1
    return SkewLabeledInstance(n, tuple(edges), labels)


def skew_to_demand_instance(idx: IndexedSkew, k: int = 0) -> Instance:
    """Demand graph is the skew biclique: s_i ~ t_j iff i <= j."""
    if len(set(idx.s) | set(idx.t)) != 2 * len(idx.s):
        raise InvalidInput("s and t vertices must be pairwise distinct")
    m = len(idx.s)
    demand = [(idx.s[i], idx.t[j]) for i in range(m) for j in range(i, m)]
    return Instance.make(idx.n, idx.edges, [*idx.s, *idx.t], demand, k)


# --- gadgets ------------------------------------------------------------------------

@dataclass
class Gadget:
    n: int
    edges: tuple
    boundary: tuple
    labels: dict
    names: tuple
    witnesses: dict = field(default_factory=dict)  # state -> tuple of paths
    info: dict = field(default_factory=dict)

    @classmethod
    def from_builder(cls, bld: _Builder, boundary, witnesses=None, info=None) -> "Gadget":
        g = cls(len(bld.names), tuple(sorted(bld.edges)), tuple(bld.v(b) for b in boundary),
                dict(bld.labels), tuple(bld.names), {}, dict(info or {}))
        if set(g.boundary) & set(g.labels):
            raise AssertionError("boundary vertices must be unlabelled")
        for key, paths in (witnesses or {}).items():
            g.witnesses[key] = tuple(tuple(bld.v(x) for x in p) for p in paths)
        return g

    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges)
        return g

    def vertex(self, name) -> int:
        return self.names.index(name)

    def skew(self) -> SkewLabeledInstance:
        return SkewLabeledInstance(self.n, self.edges, dict(self.labels))


def check_partial_solution(g: Gadget, paths: Iterable[Sequence[int]]) -> tuple[int, tuple | None]:
    """(complete path count, represented tuple or None); InvalidInput if not a partial solution."""
    adj = {v: set() for v in range(g.n)}
    for a, b in g.edges:
        adj[a].add(b)
        adj[b].add(a)
    bset = set(g.boundary)
    seen: set = set()
    complete = 0
    ends = {}
    for p in paths:
        p = tuple(p)
        if len(p) < 2 or len(set(p)) != len(p) or any(b not in adj[a] for a, b in zip(p, p[1:])):
            raise InvalidInput(f"not a path: {p}")
        if seen & set(p):
            raise InvalidInput(f"path {p} is not disjoint from the others")
        seen |= set(p)
        a, b = p[0], p[-1]
        if a in g.labels and b in g.labels and skew_valid(g.labels[a], g.labels[b]):
            complete += 1
        elif a in g.labels and b in bset:
            ends[b] = g.labels[a]
        elif b in g.labels and a in bset:
            ends[a] = g.labels[b]
        else:
            raise InvalidInput(f"path {p} is neither complete nor partial")
    rep = tuple(ends[b] for b in g.boundary) if all(b in ends for b in g.boundary) else None
    return complete, rep


def build_selector_gadget(m: int) -> Gadget:
    """Two-state-range selector with boundary (b+, b-).

    Layout: a top row u_0..u_m and a bottom row l_0..l_m joined by the rungs
    u_{j-1} l_j. b+ hangs off u_m and reaches 6m+i through u_i; b- hangs off
    l_0 and reaches -m-i through l_{i-1}. The complete path between -3m (on
    u_0) and 3m (on l_m) must cross on a free rung, which exists exactly when
    the b- choice is at most the b+ choice. Three separate labelled edges
    bring the number of complete paths to four.
    """
    if m < 1:
        raise InvalidInput("m must be positive")
    bld = _Builder()
    bld.path([("u", j) for j in range(m + 1)])
    bld.path([("l", j) for j in range(m + 1)])
    for j in range(1, m + 1):
        bld.e(("u", j - 1), ("l", j))
    for i in range(1, m + 1):
        bld.e(("p", i), ("u", i))
        bld.label(("p", i), 6 * m + i)
        bld.e(("q", i), ("l", i - 1))
        bld.label(("q", i), -m - i)
    bld.e("alpha", ("u", 0))
    bld.label("alpha", -3 * m)
    bld.e("beta", ("l", m))
    bld.label("beta", 3 * m)
    bld.e("b+", ("u", m))
    bld.e("b-", ("l", 0))
    fillers = [(m, -m), (4 * m, -4 * m), (5 * m, -5 * m)]
    for r, (a, b) in enumerate(fillers):
        bld.e(("f", r, 0), ("f", r, 1))
        bld.label(("f", r, 0), a)
        bld.label(("f", r, 1), b)
    witnesses = {}
    for i in range(1, m + 1):
        witnesses[i] = [
            ["alpha", *[("u", j) for j in range(i)], *[("l", j) for j in range(i, m + 1)], "beta"],
            [("p", i), *[("u", j) for j in range(i, m + 1)], "b+"],
            [("q", i), *[("l", j) for j in range(i - 1, -1, -1)], "b-"],
            *[[("f", r, 0), ("f", r, 1)] for r in range(len(fillers))],
        ]
    return Gadget.from_builder(bld, ["b+", "b-"], witnesses, {"m": m})


ROWS = 10


def build_general_gadget(tuples: Sequence[Sequence[int]]) -> Gadget:
    """Gadget whose 8 boundary vertices can represent exactly the given 8-tuples.

    A 10 x 10m grid whose top row carries, per block i, the labels -6m-i,
    t_i1..t_i8, m+i; a selector hangs off the top-left and bottom-left corners
    and the other 8 vertices of the left column are the boundary.
    """
    m = len(tuples)
    for t in tuples:
        if len(t) != 8:
            raise InvalidInput("tuples must have 8 coordinates")
        if any(c <= 7 * m for c in t):
            raise InvalidInput(f"tuple {tuple(t)} has a coordinate <= 7m = {7 * m}")
    bld = _Builder()
    cols = max(10 * m, 1)
    for r in range(1, ROWS + 1):
        for c in range(1, cols + 1):
            bld.v(("g", r, c))
            if c < cols:
                bld.e(("g", r, c), ("g", r, c + 1))
            if r < ROWS:
                bld.e(("g", r, c), ("g", r + 1, c))
    boundary = [("g", r, 1) for r in range(2, ROWS)]
    if m == 0:
        return Gadget.from_builder(bld, boundary, {}, {"m": 0, "tuples": ()})
    for i, t in enumerate(tuples, start=1):
        c0 = 10 * (i - 1) + 1
        bld.label(("g", 1, c0), -6 * m - i)
        for r, val in enumerate(t, start=1):
            bld.label(("g", 1, c0 + r), val)
        bld.label(("g", 1, c0 + 9), m + i)
    sel = build_selector_gadget(m)
    ids = bld.embed(sel, "sel")
    bp, bm = (ids[b] for b in sel.boundary)
    top_left, bottom_left = bld.v(("g", 1, 1)), bld.v(("g", ROWS, 1))
    bld.edges.add((min(bp, top_left), max(bp, top_left)))
    bld.edges.add((min(bm, bottom_left), max(bm, bottom_left)))
    inv = {v: k for k, v in bld.ids.items()}
    witnesses = {}
    for i in range(1, m + 1):
        c0 = 10 * (i - 1) + 1
        sw = [[inv[ids[v]] for v in p] for p in sel.witnesses[i]]
        plus = next(p for p in sw if p[-1] == ("sel", "b+"))
        minus = next(p for p in sw if p[-1] == ("sel", "b-"))
        rest = [p for p in sw if p is not plus and p is not minus]
        paths = rest
        paths.append(plus + [("g", 1, c) for c in range(1, c0 + 1)])
        paths.append(minus + [("g", ROWS, c) for c in range(1, c0 + 10)]
                     + [("g", r, c0 + 9) for r in range(ROWS - 1, 0, -1)])
        for r in range(1, 9):
            row = r + 1
            seg = [("g", row, c) for c in range(1, c0 + r + 1)] + [("g", rr, c0 + r) for rr in range(row - 1, 0, -1)]
            paths.append(list(reversed(seg)))
        witnesses[i] = paths
    return Gadget.from_builder(bld, boundary, witnesses, {"m": m, "tuples": tuple(map(tuple, tuples))})


def main_tuple(B: int, x: int, y: int) -> tuple:
    return (B + x, B - x, B + y, B - y, B + x, B - x, B + y, B - y)


def build_main_gadget(n: int, B: int, S: Iterable[tuple], sign: int = 1) -> Gadget:
    """Positive (B > 8n^2) or negative (B < -n) gadget representing t_(x,y) for (x,y) in S.

    The negative gadget is the positive one built at B+ = 8n^2+1 with every
    label moved by Delta = -B + 8n^2 + 1 towards the other sign.
    """
    S = sorted(set(map(tuple, S)))
    for x, y in S:
        if not (1 <= x <= n and 1 <= y <= n):
            raise InvalidInput(f"pair ({x},{y}) outside [n]x[n]")
    if sign > 0:
        if B <= 8 * n * n:
            raise InvalidInput(f"positive gadget needs B > 8n^2 = {8 * n * n}")
        g = build_general_gadget([main_tuple(B, x, y) for x, y in S])
        g.witnesses = {S[i - 1]: w for i, w in g.witnesses.items()}
        g.info.update(n=n, B=B, sign=1, pairs=tuple(S))
        return g
    if B >= -n:
        raise InvalidInput(f"negative gadget needs B < -n = {-n}")
    delta = -B + 8 * n * n + 1
    g = build_main_gadget(n, 8 * n * n + 1, S, 1)
    before = valid_label_pairs(g.labels)
    g.labels = {v: x + delta if x < 0 else x - delta for v, x in g.labels.items()}
    if valid_label_pairs(g.labels) != before:
        raise AssertionError("relabelling changed the valid pairs")
    g.info.update(B=B, sign=-1, delta=delta)
    return g


# --- skew reduction -------------------------------------------------------------------

@dataclass
class SkewReduction:
    instance: SkewLabeledInstance
    k_prime: int
    names: tuple
    boundary_once: frozenset  # X1: boundary vertices of a single gadget
    boundary_shared: frozenset  # X2
    witness: PathSet | None = None


def skew_k_prime(k: int) -> int:
    return 4 * k * (k + 1) + 6 * k * k


def reduce_skew(gt: GridTilingInstance) -> SkewReduction:
    """Grid of main gadgets, positive where i+j is even, glued along boundary pairs."""
    k, n = gt.k, gt.n
    Z = 10 * n * n
    bld = _Builder()
    local = {}
    bnd = {}
    gadgets = {}
    for i in range(1, k + 1):
        for j in range(1, k + 1):
            pos = (i + j) % 2 == 0
            g = build_main_gadget(n, Z if pos else -Z, gt.S(i, j), 1 if pos else -1)
            fixed = {}
            if j > 1:
                left = bnd[i, j - 1]
                fixed[g.boundary[5]] = left[0]  # b6 := b1 of the left neighbour
                fixed[g.boundary[4]] = left[1]  # b5 := b2
            if i > 1:
                up = bnd[i - 1, j]
                fixed[g.boundary[7]] = up[2]  # b8 := b3 of the gadget above
                fixed[g.boundary[6]] = up[3]  # b7 := b4
            ids = bld.embed(g, (i, j), fixed)
            local[i, j] = ids
            bnd[i, j] = [ids[b] for b in g.boundary]
            gadgets[i, j] = g
    owners: dict = {}
    for key, vs in bnd.items():
        for v in vs:
            owners.setdefault(v, []).append(key)
    X = set(owners)
    assert len(X) == 4 * k * (k + 1), "boundary identification count"
    X1 = {v for v in X if len(owners[v]) == 1}
    for v in X1:
        i, j = owners[v][0]
        bld.labels[v] = -Z - n if (i + j) % 2 == 0 else Z - n
    sli = SkewLabeledInstance(len(bld.names), tuple(sorted(bld.edges)), dict(bld.labels))
    k_prime = skew_k_prime(k)

    witness = None
    if gt.solution is not None:
        paths = []
        halves: dict = {}
        for (i, j), g in gadgets.items():
            ids = local[i, j]
            for p in g.witnesses[tuple(gt.solution[i - 1][j - 1])]:
                q = [ids[v] for v in p]
                if q[-1] in X:
                    halves.setdefault(q[-1], []).append(q)
                else:
                    paths.append(tuple(q))
        for v, parts in halves.items():
            if len(parts) == 1:
                paths.append(tuple(parts[0]))
            else:
                a, b = parts
                paths.append(tuple(a + b[::-1][1:]))
        witness = PathSet.of(paths)
        if len(witness) != k_prime or not verify_solution(sli.to_instance(k_prime), witness):
            raise AssertionError("planted skew witness is not a solution")
    return SkewReduction(sli, k_prime, tuple(bld.names), frozenset(X1), frozenset(X - X1), witness)


# --- audits --------------------------------------------------------------------------

def max_complete_paths(g: Gadget, limit: int, budget: int | None = None) -> int:
    """Largest number (<= limit) of disjoint complete paths in the gadget."""
    inst = g.skew().to_instance()
    best = 0
    for j in range(1, limit + 1):
        if exact_max_disjoint(inst.with_k(j), budget) is None:
            break
        best = j
    return best


def complete_path_bound(g: Gadget) -> int:
    """Upper bound on complete paths: per component, min(#negative, #positive) terminals."""
    total = 0
    for comp in nx.connected_components(g.graph()):
        labs = [g.labels[v] for v in comp if v in g.labels]
        total += min(sum(1 for x in labs if x < 0), sum(1 for x in labs if x > 0))
    return total


def milp_linkable(adj: Sequence[Sequence[int]], pairs: Sequence[tuple[int, int]]) -> bool:
    """Exact linkage test as an integral multicommodity flow with unit vertex capacities.

    A unit flow per pair decomposes into a path plus cycles, and the shared
    vertex capacity keeps the paths disjoint, so feasibility is equivalent to
    the existence of the linkage.
    """
    ends = [v for p in pairs for v in p]
    if len(set(ends)) != len(ends):
        return False
    return milp_group_linkable(adj, [([s], [t]) for s, t in pairs])


def milp_group_linkable(adj: Sequence[Sequence[int]],
                        groups: Sequence[tuple[Sequence[int], Sequence[int]]],
                        time_limit: float | None = None) -> bool | None:
    """Disjoint paths from every source of each group to distinct sinks of the same group.

    None when ``time_limit`` seconds pass without a decision.
    """
    groups = [(list(a), list(b)) for a, b in groups if a]
    if not groups:
        return True
    srcs = [v for a, _ in groups for v in a]
    if len(set(srcs)) != len(srcs):
        return False
    n = len(adj)
    arcs = [(u, w) for u in range(n) for w in adj[u]]
    A, K = len(arcs), len(groups)
    rows, cols, vals = [], [], []
    lo, hi = [], []
    r = 0
    for c, (a, b) in enumerate(groups):
        base = c * A
        for idx, (u, w) in enumerate(arcs):
            rows += [r + u, r + w]
            cols += [base + idx, base + idx]
            vals += [1.0, -1.0]
        sa, sb = set(a), set(b)
        for v in range(n):
            if v in sa:
                lo.append(1.0)
                hi.append(1.0)
            elif v in sb:
                lo.append(-1.0)
                hi.append(0.0)
            else:
                lo.append(0.0)
                hi.append(0.0)
        r += n
    sources = set(srcs)
    for c in range(K):
        for idx, (_, w) in enumerate(arcs):
            rows.append(r + w)
            cols.append(c * A + idx)
            vals.append(1.0)
    for v in range(n):
        lo.append(0.0)
        hi.append(0.0 if v in sources else 1.0)
    r += n
    mat = coo_matrix((vals, (rows, cols)), shape=(r, K * A)).tocsr()
    opts = {} if time_limit is None else {"time_limit": time_limit}
    res = milp(np.zeros(K * A), constraints=LinearConstraint(mat, lo, hi),
               integrality=np.ones(K * A), bounds=Bounds(0, 1), options=opts)
    if res.status == 0:
        return True
    if res.status == 2:
        return False
    if res.status == 1 and time_limit is not None:
        return None
    raise RuntimeError(f"milp failed: {res.message}")


@dataclass(frozen=True)
class SelectorAudit:
    m: int
    max_complete: int
    represented: frozenset  # label pairs (x, y) with 4 complete paths alongside


def selector_audit(m: int, budget: int | None = None) -> SelectorAudit:
    """Exhaustive check of the selector over every (b+, b-) endpoint choice."""
    g = build_selector_gadget(m)
    cap = max_complete_paths(g, 5, budget)
    bp, bm = g.boundary
    T = sorted(g.labels)
    base = valid_label_pairs(g.labels)
    reps = set()
    for x in T:
        for y in T:
            if x == y:
                continue
            inst = Instance.make(g.n, g.edges, [*T, bp, bm], [*base, (bp, x), (bm, y)], 6)
            if exact_max_disjoint(inst, budget) is not None:
                reps.add((g.labels[x], g.labels[y]))
    return SelectorAudit(m, cap, frozenset(reps))


def represented_tuples(g: Gadget, complete: int, time_limit: float | None = None) -> set[tuple]:
    """All tuples represented by a partial solution with ``complete`` complete paths.

    Complete pair sets are enumerated combinatorially and kept when linkable.
    Boundary vertices then pick labels one at a time; a prefix survives when
    each boundary vertex so far can reach its own terminal carrying the chosen
    label, disjointly from everything already fixed.

    With ``time_limit`` an undecided query counts as linkable, so the result
    can only grow; it is exact when it meets a lower bound such as the witnesses.
    """
    adj = [[] for _ in range(g.n)]
    for a, b in g.edges:
        adj[a].append(b)
        adj[b].append(a)
    comp = {}
    for c, vs in enumerate(nx.connected_components(g.graph())):
        for v in vs:
            comp[v] = c
    pairs = [(u, w) for u, w in valid_label_pairs(g.labels) if comp[u] == comp[w]]
    out: set = set()

    def assign(fixed, free, r, acc):
        if r == len(g.boundary):
            out.add(tuple(acc))
            return
        b = g.boundary[r]
        for lab in sorted({g.labels[t] for t in free if comp[t] == comp[b]}):
            picks = [x for x in acc] + [lab]
            groups = [([u], [w]) for u, w in fixed]
            for L in set(picks):
                srcs = [g.boundary[i] for i, x in enumerate(picks) if x == L]
                sinks = [t for t in free if g.labels[t] == L]
                if len(sinks) < len(srcs):
                    break
                groups.append((srcs, sinks))
            else:
                if milp_group_linkable(adj, groups, time_limit) is not False:
                    assign(fixed, free, r + 1, picks)

    def choose(start, chosen, used):
        if len(chosen) == complete:
            if milp_linkable(adj, chosen):
                free = sorted(t for t in g.labels if t not in used)
                assign(chosen, free, 0, [])
            return
        for idx in range(start, len(pairs)):
            u, w = pairs[idx]
            if u not in used and w not in used:
                choose(idx + 1, chosen + [(u, w)], used | {u, w})

    choose(0, [], frozenset())
    return out


def boundary_on_one_face(g: nx.Graph, boundary: Sequence) -> bool:
    """Planar with the boundary in this cyclic order around one face (apex + cycle test)."""
    h = g.copy()
    apex = ("apex",)
    b = list(boundary)
    for u, w in zip(b, b[1:] + b[:1]):
        if u != w:
            h.add_edge(u, w)
    h.add_edges_from((apex, v) for v in b)
    return nx.check_planarity(h)[0]
