"""Independent brute-force oracles used only by the tests.

Everything here is deliberately naive: plain enumeration with no pruning
shared with the library code.
"""

from __future__ import annotations

import itertools
import random

import networkx as nx

from dpath.graph_core import Instance


def simple_paths_from(adj, s):
    out = []
    stack = [(s, [s])]
    while stack:
        v, p = stack.pop()
        out.append(p)
        for w in adj[v]:
            if w not in p:
                stack.append((w, p + [w]))
    return out


def all_valid_paths(inst: Instance):
    """Every valid path as a vertex frozenset (orientation dropped)."""
    res = set()
    for s in inst.terminals:
        for p in simple_paths_from(inst.adj, s):
            if len(p) > 1 and p[-1] in inst.hadj[s]:
                res.add(frozenset(p))
    return sorted(res, key=lambda x: (len(x), sorted(x)))


def brute_max_packing(inst: Instance, cap: int) -> int:
    """Largest number (<= cap) of pairwise disjoint valid paths."""
    paths = [p for p in all_valid_paths(inst)]
    # only minimal vertex sets matter
    minimal = [p for p in paths if not any(q < p for q in paths)]
    best = 0

    def rec(start, used, cnt):
        nonlocal best
        best = max(best, cnt)
        if best >= cap:
            return
        for i in range(start, len(minimal)):
            if not (minimal[i] & used):
                rec(i + 1, used | minimal[i], cnt + 1)
                if best >= cap:
                    return

    rec(0, frozenset(), 0)
    return best


def brute_pairs_linkable(g: nx.Graph, pairs) -> bool:
    ends = [v for p in pairs for v in p]
    if len(set(ends)) != len(ends):
        # a vertex shared by two pairs only works when it is one trivial pair
        return False
    options = []
    for s, t in pairs:
        if s == t:
            options.append([frozenset([s])])
            continue
        others = set(ends) - {s, t}
        opts = [frozenset(p) for p in nx.all_simple_paths(g, s, t) if not others & set(p)]
        options.append(opts)

    def rec(i, used):
        if i == len(options):
            return True
        return any(not (o & used) and rec(i + 1, used | o) for o in options[i])

    return rec(0, frozenset())


def random_instance(rng: random.Random, n: int, p: float, nterm: int, pdem: float, k: int) -> Instance:
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    terms = rng.sample(range(n), min(nterm, n))
    dem = [(a, b) for a, b in itertools.combinations(sorted(terms), 2) if rng.random() < pdem]
    return Instance.make(n, edges, terms, dem, k)


def is_separator(adj, X, Y, S):
    """S (disjoint from X, Y) hits every X-Y path."""
    seen = set(x for x in X if x not in S)
    stack = list(seen)
    while stack:
        v = stack.pop()
        if v in Y:
            return False
        for w in adj[v]:
            if w not in S and w not in seen:
                seen.add(w)
                stack.append(w)
    return True


def reach_set(adj, X, S):
    seen = set(X) - set(S)
    stack = list(seen)
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in S and w not in seen:
                seen.add(w)
                stack.append(w)
    return frozenset(seen)


def brute_important_separators(adj, X, Y, p):
    """All important X-Y separators of size <= p by the definition."""
    n = len(adj)
    cand = [v for v in range(n) if v not in X and v not in Y]
    seps = []
    for size in range(p + 1):
        for S in itertools.combinations(cand, size):
            if is_separator(adj, X, Y, set(S)):
                seps.append((frozenset(S), reach_set(adj, X, S)))
    # minimal separators
    sepsets = {S for S, _ in seps}
    minimal = [(S, K) for S, K in seps if not any(T < S for T in sepsets)]
    out = []
    for S, K in minimal:
        dominated = any(len(S2) <= len(S) and K2 > K for S2, K2 in seps)
        if not dominated:
            out.append(S)
    return sorted(out, key=sorted)


def all_separations(n, adj, vertices=None):
    """Every separation (A, B) of the graph as vertex sets, brute force."""
    vs = list(range(n)) if vertices is None else sorted(vertices)
    # choose for each vertex: A-only, B-only or both
    for code in itertools.product((0, 1, 2), repeat=len(vs)):
        a = frozenset(v for v, c in zip(vs, code) if c in (0, 2))
        b = frozenset(v for v, c in zip(vs, code) if c in (1, 2))
        a_only, b_only = a - b, b - a
        if any(w in b_only for v in a_only for w in adj[v]):
            continue
        yield a, b


def brute_a_path_packing(g: nx.Graph, A, cap):
    A = set(A)
    paths = set()
    for s in A:
        for t in A:
            if s < t:
                for p in nx.all_simple_paths(g, s, t):
                    if not (set(p[1:-1]) & A):
                        paths.add(frozenset(p))
    paths = sorted(paths, key=lambda x: (len(x), sorted(x)))
    best = 0

    def rec(start, used, cnt):
        nonlocal best
        best = max(best, cnt)
        if best >= cap:
            return
        for i in range(start, len(paths)):
            if not (paths[i] & used):
                rec(i + 1, used | paths[i], cnt + 1)

    rec(0, frozenset(), 0)
    return best


def brute_representative(H: nx.Graph, R, sub, d: int) -> bool:
    """Every b compatible with some a in R is compatible with some a' in sub."""
    R, sub = list(R), list(sub)

    def compat(a, b):
        return all(H.has_edge(x, y) for x, y in zip(a, b))

    for b in itertools.product(sorted(H.nodes), repeat=d):
        if any(compat(a, b) for a in R) and not any(compat(a, b) for a in sub):
            return False
    return True


def all_solutions(inst: Instance, k: int, cap: int = 60):
    """Up to ``cap`` solutions: k disjoint valid paths as vertex sequences."""
    paths = []
    for s in inst.terminals:
        for p in simple_paths_from(inst.adj, s):
            if len(p) > 1 and p[-1] in inst.hadj[s] and s < p[-1]:
                paths.append(tuple(p))
    paths.sort(key=lambda p: (len(p), p))
    out = []

    def rec(start, used, chosen):
        if len(out) >= cap:
            return
        if len(chosen) == k:
            out.append(list(chosen))
            return
        for i in range(start, len(paths)):
            if not used & set(paths[i]):
                rec(i + 1, used | set(paths[i]), chosen + [paths[i]])

    rec(0, set(), [])
    return out
