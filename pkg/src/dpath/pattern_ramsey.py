"""Constructive Ramsey extractors and pattern-witness verification."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import networkx as nx

from .graph_core import (
    BICLIQUE,
    CLIQUE,
    INDUCED_MATCHING,
    SKEW_BICLIQUE,
    InvalidInput,
    PatternWitness,
)

BRUTE_LIMIT = 16


class RamseyFailure(RuntimeError):
    """No monochromatic clique of the requested size was found."""


@dataclass(frozen=True)
class EdgeColoring:
    n: int
    c: int
    color_of: Callable[[int, int], int]

    @classmethod
    def from_mapping(cls, n: int, c: int, colors: Mapping) -> "EdgeColoring":
        table = {}
        for (u, v), col in colors.items():
            table[(u, v)] = table[(v, u)] = col
        return cls(n, c, lambda u, v: table[(u, v)])

    def __call__(self, u: int, v: int) -> int:
        col = self.color_of(u, v) if u < v else self.color_of(v, u)
        if not 1 <= col <= self.c:
            raise InvalidInput(f"colour {col} of pair ({u},{v}) outside 1..{self.c}")
        return col


def ramsey_threshold(c: int, r: int) -> int:
    return c ** (r * c)


def find_monochromatic_clique(col: EdgeColoring, r: int) -> list[int]:
    """r vertices whose pairs all share one colour.

    Pigeonhole sweep: take the smallest remaining vertex, keep its largest
    same-colour neighbourhood, and remember the colour it was kept under.
    Vertices recorded with the same colour form a monochromatic clique.
    """
    if r <= 1:
        if col.n >= r:
            return list(range(r))
        raise RamseyFailure("empty colouring")
    rest = list(range(col.n))
    picked: list[tuple[int, int]] = []
    while rest:
        v = rest[0]
        classes: dict[int, list[int]] = {}
        for w in rest[1:]:
            classes.setdefault(col(v, w), []).append(w)
        if not classes:
            # the last vertex can join any colour class
            picked.append((v, 0))
            break
        best = max(sorted(classes), key=lambda c: len(classes[c]))
        picked.append((v, best))
        rest = classes[best]
        # anything left sits in the chosen class of every pick so far
        same = [u for u, c in picked if c == best]
        if len(same) + 1 >= r:
            return same[:r - 1] + [rest[0]]
    counts: dict[int, list[int]] = {}
    tail = [v for v, c in picked if c == 0]
    for v, c in picked:
        if c:
            counts.setdefault(c, []).append(v)
    for c in sorted(counts, key=lambda c: (-len(counts[c]), c)):
        group = counts[c] + tail
        if len(group) >= r:
            return group[:r]
    if col.n >= ramsey_threshold(col.c, r):
        raise AssertionError("pigeonhole sweep failed above the Ramsey threshold")
    raise RamseyFailure(f"no monochromatic {r}-clique found; n={col.n} is below "
                        f"the guarantee c^(rc)={ramsey_threshold(col.c, r)}")


def _adj(H) -> Callable[[object, object], bool]:
    return lambda u, v: H.has_edge(u, v)


def matching_color(H, xs: Sequence, ys: Sequence, i: int, j: int) -> int:
    """Five-colouring of pairs of matching edges (i < j)."""
    a = _adj(H)
    xi, yi, xj, yj = xs[i], ys[i], xs[j], ys[j]
    if a(xi, xj):
        return 2
    if a(yi, yj):
        return 3
    if a(xi, yj):
        return 4
    if a(yi, xj):
        return 5
    return 1


def matching_to_induced_or_biclique(H: nx.Graph, matching: Sequence[tuple], r: int) -> PatternWitness:
    """Induced matching of size 2r, clique of size 2r, or K_{r,r} subgraph."""
    xs = [e[0] for e in matching]
    ys = [e[1] for e in matching]
    flat = xs + ys
    if len(set(flat)) != len(flat):
        raise InvalidInput("matching edges are not pairwise disjoint")
    for x, y in matching:
        if not H.has_edge(x, y):
            raise InvalidInput(f"({x},{y}) is not an edge of H")
    col = EdgeColoring(len(matching), 5, lambda i, j: matching_color(H, xs, ys, i, j))
    idx = find_monochromatic_clique(col, 2 * r)
    c = col(idx[0], idx[1]) if len(idx) > 1 else 1
    if c == 1:
        w = PatternWitness(INDUCED_MATCHING, tuple(v for i in idx for v in (xs[i], ys[i])))
    elif c == 2:
        w = PatternWitness(CLIQUE, tuple(xs[i] for i in idx))
    elif c == 3:
        w = PatternWitness(CLIQUE, tuple(ys[i] for i in idx))
    elif c == 4:
        w = PatternWitness(BICLIQUE, tuple(xs[i] for i in idx[:r]) + tuple(ys[i] for i in idx[r:]))
    else:
        w = PatternWitness(BICLIQUE, tuple(ys[i] for i in idx[:r]) + tuple(xs[i] for i in idx[r:]))
    if not verify_witness(H, w):
        raise AssertionError(f"extracted witness failed verification: {w}")
    return w


def staircase_color(H, a: Sequence, b: Sequence, i: int, j: int) -> int:
    """Four-colouring of index pairs of a staircase (i < j)."""
    if H.has_edge(a[i], a[j]):
        return 2
    if H.has_edge(b[i], b[j]):
        return 3
    if H.has_edge(b[i], a[j]):
        return 4
    return 1


def check_staircase(H: nx.Graph, a: Sequence, b: Sequence) -> None:
    if len(a) != len(b):
        raise InvalidInput("a and b differ in length")
    if len(set(a) | set(b)) != 2 * len(a):
        raise InvalidInput("staircase vertices are not distinct")
    for i in range(len(a)):
        if not H.has_edge(a[i], b[i]):
            raise InvalidInput(f"a_{i + 1}={a[i]} and b_{i + 1}={b[i]} are not adjacent")
    for i in range(len(a)):
        for j in range(i + 1, len(a)):
            if H.has_edge(a[i], b[j]):
                raise InvalidInput(f"a_{i + 1}={a[i]} and b_{j + 1}={b[j]} are adjacent")


def staircase_to_witness(H: nx.Graph, a: Sequence, b: Sequence, r: int) -> PatternWitness:
    """Induced matching (r), induced skew biclique (r+r) or clique (r)."""
    check_staircase(H, a, b)
    col = EdgeColoring(len(a), 4, lambda i, j: staircase_color(H, a, b, i, j))
    idx = find_monochromatic_clique(col, r)
    c = col(idx[0], idx[1]) if len(idx) > 1 else 1
    if c == 1:
        w = PatternWitness(INDUCED_MATCHING, tuple(v for i in idx for v in (a[i], b[i])))
    elif c == 2:
        w = PatternWitness(CLIQUE, tuple(a[i] for i in idx))
    elif c == 3:
        w = PatternWitness(CLIQUE, tuple(b[i] for i in idx))
    else:
        # b_i ~ a_j exactly for i <= j inside the selected indices
        w = PatternWitness(SKEW_BICLIQUE, tuple(b[i] for i in idx) + tuple(a[i] for i in idx))
    if not verify_witness(H, w):
        raise AssertionError(f"extracted witness failed verification: {w}")
    return w


def verify_witness(H: nx.Graph, w: PatternWitness) -> bool:
    vs = w.vertices
    if len(set(vs)) != len(vs) or any(v not in H for v in vs):
        return False
    adj = _adj(H)
    if w.kind == CLIQUE:
        return all(adj(u, v) for u, v in itertools.combinations(vs, 2))
    if len(vs) % 2:
        return False
    m = len(vs) // 2
    if w.kind == INDUCED_MATCHING:
        pairs = {frozenset(vs[2 * i:2 * i + 2]) for i in range(m)}
        return all(adj(u, v) == (frozenset((u, v)) in pairs) for u, v in itertools.combinations(vs, 2))
    side_a, side_b = vs[:m], vs[m:]
    if w.kind == BICLIQUE:
        return all(adj(u, v) for u in side_a for v in side_b)
    # SkewBiclique, strictly induced
    if any(adj(u, v) for u, v in itertools.combinations(side_a, 2)):
        return False
    if any(adj(u, v) for u, v in itertools.combinations(side_b, 2)):
        return False
    return all(adj(side_a[i], side_b[j]) == (i <= j) for i in range(m) for j in range(m))


def brute_find_pattern(H: nx.Graph, kind: str, size: int) -> PatternWitness | None:
    """Exhaustive search for a pattern of the given kind and size (|V(H)| <= 16)."""
    if H.number_of_nodes() > BRUTE_LIMIT:
        raise InvalidInput(f"brute-force pattern search limited to {BRUTE_LIMIT} vertices")
    nodes = sorted(H.nodes)
    if kind == CLIQUE:
        for combo in itertools.combinations(nodes, size):
            if all(H.has_edge(u, v) for u, v in itertools.combinations(combo, 2)):
                return PatternWitness(CLIQUE, combo)
        return None
    arcs = sorted((u, v) for u in nodes for v in H[u] if u != v)
    if kind == INDUCED_MATCHING:
        edges = [(u, v) for u, v in arcs if u < v]
        return _brute_matching(H, edges, size)
    if kind == SKEW_BICLIQUE:
        return _brute_skew(H, arcs, size)
    if kind == BICLIQUE:
        for left in itertools.combinations(nodes, size):
            common = set(nodes)
            for u in left:
                common &= set(H[u])
            common -= set(left)
            if len(common) >= size:
                return PatternWitness(BICLIQUE, left + tuple(sorted(common)[:size]))
        return None
    raise InvalidInput(f"unknown pattern kind {kind!r}")


def _brute_matching(H, edges, size):
    chosen: list[tuple] = []

    def ok(e):
        for f in chosen:
            if any(H.has_edge(u, v) or u == v for u in e for v in f):
                return False
        return True

    def rec(start):
        if len(chosen) == size:
            return True
        for i in range(start, len(edges)):
            if ok(edges[i]):
                chosen.append(edges[i])
                if rec(i + 1):
                    return True
                chosen.pop()
        return False

    if rec(0):
        return PatternWitness(INDUCED_MATCHING, tuple(v for e in chosen for v in e))
    return None


def _brute_skew(H, arcs, size):
    seq: list[tuple] = []

    def ok(ai, bi):
        used = {v for p in seq for v in p}
        if ai in used or bi in used:
            return False
        for aj, bj in seq:
            # earlier j: a_j ~ b_i, a_i !~ b_j, no same-side edges
            if not H.has_edge(aj, bi) or H.has_edge(ai, bj):
                return False
            if H.has_edge(ai, aj) or H.has_edge(bi, bj):
                return False
        return True

    def rec():
        if len(seq) == size:
            return True
        for ai, bi in arcs:
            if ok(ai, bi):
                seq.append((ai, bi))
                if rec():
                    return True
                seq.pop()
        return False

    if size == 0 or rec():
        return PatternWitness(SKEW_BICLIQUE, tuple(p[0] for p in seq) + tuple(p[1] for p in seq))
    return None


def find_pattern(H: nx.Graph, r: int) -> PatternWitness | None:
    """Induced M_r or induced S_r in H by brute force, matching first."""
    for kind in (INDUCED_MATCHING, SKEW_BICLIQUE):
        w = brute_find_pattern(H, kind, r)
        if w is not None:
            return w
    return None
