import random

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from dpath import _pykernel
from dpath.graph_core import (
    BudgetExhausted,
    Instance,
    InvalidInput,
    PathSet,
    attach_degree_one_terminals,
    degree_one_ok,
    exact_max_disjoint,
    is_valid_path,
    max_disjoint_value,
    max_flow_biclique,
    solve_disjoint_pairs,
    verify_hitting_set,
    verify_solution,
)

from oracles import brute_max_packing, brute_pairs_linkable, random_instance


def star(k=2):
    # centre 0, a1=1, a2=2, b1=3, b2=4
    return Instance.make(5, [(0, i) for i in range(1, 5)], [1, 2, 3, 4], [(1, 3), (2, 4)], k)


@st.composite
def instances(draw, max_n=9, max_k=3):
    n = draw(st.integers(2, max_n))
    seed = draw(st.integers(0, 10**6))
    rng = random.Random(seed)
    return random_instance(rng, n, rng.uniform(0.15, 0.6), rng.randint(2, n), rng.uniform(0.2, 0.8),
                           draw(st.integers(0, max_k)))


def test_attach_single_edge():
    inst = Instance.make(2, [(0, 1)], [0, 1], [(0, 1)], 1)
    pre = attach_degree_one_terminals(inst)
    assert pre.n == 4
    assert pre.terminals == (2, 3)
    assert set(pre.edges) == {(0, 1), (0, 2), (1, 3)}
    assert pre.demand == ((2, 3),)
    assert pre.origin == (0, 1, 0, 1)
    assert degree_one_ok(pre)


def test_attach_is_idempotent_up_to_renaming():
    pre = attach_degree_one_terminals(Instance.make(2, [(0, 1)], [0, 1], [(0, 1)], 1))
    again = attach_degree_one_terminals(pre)
    assert again.n == pre.n + 2
    assert degree_one_ok(again)
    assert nx.is_isomorphic(nx.Graph(list(again.edges)), nx.path_graph(6))


def test_attach_star_preserves_value():
    inst = star()
    pre = attach_degree_one_terminals(inst)
    assert pre.n == 9
    for k in range(4):
        assert (exact_max_disjoint(inst.with_k(k)) is None) == (exact_max_disjoint(pre.with_k(k)) is None)


def test_is_valid_path():
    inst = Instance.make(3, [(0, 1), (1, 2)], [0, 2], [(0, 2)])
    assert is_valid_path(inst, [0, 1, 2])
    assert not is_valid_path(Instance.make(3, [(0, 1), (1, 2)], [0, 2], []), [0, 1, 2])
    assert not is_valid_path(inst, [0])
    with pytest.raises(InvalidInput):
        is_valid_path(inst, [0, 2])


def test_verify_solution():
    inst = star(0)
    assert verify_solution(inst, PathSet())
    assert not verify_solution(inst.with_k(2), PathSet.of([[1, 0, 3], [2, 0, 4]]))
    assert verify_solution(inst.with_k(1), PathSet.of([[1, 0, 3]]))


def test_verify_hitting_set():
    inst = star()
    assert verify_hitting_set(inst, range(inst.n))
    assert not verify_hitting_set(inst, [])
    assert verify_hitting_set(inst, [0])


def test_exact_examples():
    assert exact_max_disjoint(star(0)) == PathSet()
    assert exact_max_disjoint(star(2)) is None
    sol = exact_max_disjoint(star(1))
    assert sol.paths[0] in {(1, 0, 3), (2, 0, 4)}


def test_pairs_examples():
    assert solve_disjoint_pairs(nx.path_graph(4), [(0, 3)]) == PathSet.of([[0, 1, 2, 3]])
    assert solve_disjoint_pairs(nx.cycle_graph(4), [(0, 2), (1, 3)]) is None
    sol = solve_disjoint_pairs(nx.complete_graph(4), [(0, 2), (1, 3)])
    assert sol == PathSet.of([[0, 2], [1, 3]])


def test_max_flow_biclique_examples():
    path = Instance.make(3, [(0, 1), (1, 2)], [0, 2], [(0, 2)])
    assert max_flow_biclique(path, [0], [2]) == 1
    # s1,s2 -- c -- t1,t2
    cut = Instance.make(5, [(0, 2), (1, 2), (2, 3), (2, 4)], [0, 1, 3, 4],
                        [(0, 3), (0, 4), (1, 3), (1, 4)])
    assert max_flow_biclique(cut, [0, 1], [3, 4]) == 1
    k = 3
    par = Instance.make(2 * k, [(i, k + i) for i in range(k)], range(2 * k),
                        [(i, k + j) for i in range(k) for j in range(k)])
    assert max_flow_biclique(par, range(k), range(k, 2 * k)) == k
    with pytest.raises(InvalidInput):
        partial = Instance.make(5, cut.edges, [0, 1, 3, 4], [(0, 3), (1, 3), (1, 4)])
        max_flow_biclique(partial, [0, 1], [3, 4])


def test_budget_is_an_error():
    g = nx.complete_graph(9)
    inst = Instance.make(9, g.edges, range(9), [(0, 8)], 3)
    with pytest.raises(BudgetExhausted):
        exact_max_disjoint(inst, budget=5)


def test_budget_env(monkeypatch):
    monkeypatch.setenv("DPATH_BUDGET", "3")
    inst = Instance.make(9, nx.complete_graph(9).edges, range(9), [(0, 8)], 3)
    with pytest.raises(BudgetExhausted):
        exact_max_disjoint(inst)


@settings(max_examples=150, deadline=None)
@given(instances())
def test_exact_matches_brute_force(inst):
    sol = exact_max_disjoint(inst)
    found = brute_max_packing(inst, inst.k) >= inst.k
    assert (sol is not None) == found
    if sol is not None:
        assert verify_solution(inst, sol)


def _python_pack(inst):
    n = inst.n
    indptr, indices = [0], []
    for nb in inst.adj:
        indices.extend(nb)
        indptr.append(len(indices))
    term = bytes(1 if v in inst.terminal_set else 0 for v in range(n))
    dem = bytearray(n * n)
    for s, t in inst.demand:
        dem[s * n + t] = dem[t * n + s] = 1
    return _pykernel.pack_valid(n, indptr, indices, term, bytes(dem), inst.k, 10**7)


@settings(max_examples=80, deadline=None)
@given(instances())
def test_backends_agree(inst):
    status, paths, _ = _python_pack(inst)
    sol = exact_max_disjoint(inst)
    if sol is None:
        assert status == _pykernel.NONE
    else:
        assert status == _pykernel.FOUND
        assert PathSet.of(paths) == sol


@settings(max_examples=60, deadline=None)
@given(instances(max_n=8, max_k=3))
def test_attach_preserves_answer(inst):
    pre = attach_degree_one_terminals(inst)
    assert (exact_max_disjoint(inst) is None) == (exact_max_disjoint(pre.with_k(inst.k)) is None)


@settings(max_examples=60, deadline=None)
@given(instances(max_n=9, max_k=1))
def test_hitting_set_blocks_paths(inst):
    rng = random.Random(inst.n * 31 + len(inst.edges))
    z = {v for v in range(inst.n) if rng.random() < 0.4}
    if verify_hitting_set(inst, z):
        keep = [v for v in range(inst.n) if v not in z]
        from dpath.graph_core import induced_subinstance
        sub, _ = induced_subinstance(inst, keep, k=1)
        assert exact_max_disjoint(sub) is None


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_max_flow_is_menger(seed):
    rng = random.Random(seed)
    n = rng.randint(4, 10)
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.35]
    vs = rng.sample(range(n), rng.randint(2, min(6, n)))
    half = len(vs) // 2
    S, T2 = vs[:half] or vs[:1], vs[half:]
    inst = Instance.make(n, edges, vs, [(s, t) for s in S for t in T2])
    flow = max_flow_biclique(inst, S, T2)
    assert flow == max_disjoint_value(inst, len(vs))


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_pairs_match_brute_force(seed):
    rng = random.Random(seed)
    n = rng.randint(3, 9)
    g = nx.gnp_random_graph(n, rng.uniform(0.2, 0.6), seed=rng.randint(0, 10**6))
    k = rng.randint(1, 3)
    verts = rng.sample(range(n), min(n, 2 * k))
    pairs = [(verts[2 * i], verts[2 * i + 1]) for i in range(len(verts) // 2)]
    sol = solve_disjoint_pairs(g, pairs)
    assert (sol is not None) == brute_pairs_linkable(g, pairs)
    if sol is not None:
        for (s, t), p in zip(pairs, sol):
            assert p[0] == s and p[-1] == t
            assert all(g.has_edge(p[i], p[i + 1]) for i in range(len(p) - 1))
        assert len(sol.vertices()) == sum(len(p) for p in sol)
