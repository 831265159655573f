import random

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from dpath.graph_core import INDUCED_MATCHING, Instance, InvalidInput, attach_degree_one_terminals, max_disjoint_value
from dpath.ep_cover import (
    FreeMatchedSet,
    Grown,
    Hitting,
    HittingSet,
    MatchingWitness,
    Paths,
    Split,
    ep_cover_or_pack,
    ep_cover_top,
    fpt_approx,
    fpt_approx_run,
    grow_free_set,
    verify_outcome,
)
from dpath.pattern_ramsey import brute_find_pattern
from dpath.separators import truncated_valid_path_oracle

from oracles import random_instance


def grid_instance(n, k=2):
    g = nx.grid_2d_graph(n, n)
    idx = {v: i for i, v in enumerate(sorted(g))}
    edges = [(idx[a], idx[b]) for a, b in g.edges]
    N = n * n
    s = [N + i for i in range(n)]
    t = [N + n + i for i in range(n)]
    edges += [(s[i], idx[(0, i)]) for i in range(n)]
    edges += [(t[i], idx[(n - 1, n - 1 - i)]) for i in range(n)]
    return Instance.make(N + 2 * n, edges, s + t, [(s[i], t[i]) for i in range(n)], k)


def k33_instance(width=3):
    edges = []
    for i in range(width):
        edges += [(i, 2 * width + i), (2 * width + i, width + i)]
    demand = [(i, width + j) for i in range(width) for j in range(width)]
    return Instance.make(3 * width, edges, range(2 * width), demand, width)


def single_path():
    # s - a - b - t
    return Instance.make(4, [(0, 1), (1, 2), (2, 3)], [0, 3], [(0, 3)], 1)


def test_grow_single_path():
    pre = attach_degree_one_terminals(single_path())
    res = grow_free_set(pre, FreeMatchedSet.empty())
    assert isinstance(res, Grown)
    assert len(res.free_set.terminals) == 2


def test_grow_two_components_split():
    base = Instance.make(8, [(0, 1), (1, 2), (2, 3), (4, 5), (5, 6), (6, 7)], [0, 3, 4, 7], [(0, 3), (4, 7)])
    pre = attach_degree_one_terminals(base)
    res = grow_free_set(pre, FreeMatchedSet.empty())
    assert isinstance(res, Split)
    assert res.separation.order == 0


def test_grow_hitting_within_bound():
    pre = attach_degree_one_terminals(single_path())
    tp = grow_free_set(pre, FreeMatchedSet.empty()).free_set
    res = grow_free_set(pre, tp)
    assert isinstance(res, Hitting)
    assert len(res.vertices) <= 2 * 5


def test_grow_rejects_bad_matching():
    pre = attach_degree_one_terminals(single_path())
    with pytest.raises(InvalidInput):
        grow_free_set(pre, FreeMatchedSet(frozenset({4}), ()))
    with pytest.raises(InvalidInput):
        grow_free_set(Instance.make(3, [(0, 1), (1, 2)], [0, 1], [(0, 1)]), FreeMatchedSet.empty())


def test_k1_gives_one_path():
    out = ep_cover_top(single_path(), 1, 2)
    assert isinstance(out, Paths) and len(out.paths) == 1
    assert out.paths.paths[0] == (0, 1, 2, 3)


@pytest.mark.parametrize("n", [4, 5, 6])
def test_grid_gives_matching_witness(n):
    inst = grid_instance(n)
    out = ep_cover_top(inst, 2, 2)
    assert isinstance(out, MatchingWitness)
    assert out.witness.kind == INDUCED_MATCHING and out.witness.size >= 2
    assert verify_outcome(inst, out, 2, 2)


def test_biclique_demand_packs():
    inst = k33_instance()
    out = ep_cover_top(inst, 3, 2)
    assert isinstance(out, Paths) and len(out.paths) == 3
    assert max_disjoint_value(inst, 3) == 3


def test_no_path_empty_hitting_set():
    inst = Instance.make(4, [(0, 1), (2, 3)], [0, 3], [(0, 3)], 1)
    assert ep_cover_top(inst, 1, 1) == HittingSet(frozenset())


def test_cap_exhaustion_is_internal_error():
    pre = attach_degree_one_terminals(k33_instance())
    with pytest.raises(AssertionError):
        ep_cover_or_pack(pre, 3, 2, cap=0)


def test_approx_examples():
    assert len(fpt_approx(Instance.make(4, [(0, 1), (2, 3)], [0, 3], [(0, 3)]), 1)) == 0
    assert len(fpt_approx(single_path(), 1)) == 1
    run = fpt_approx_run(k33_instance(4), 2)
    assert len(run.paths) >= 2
    assert run.schedule[:2] == (1, 2)


def _case(seed, n_lo, n_hi):
    rng = random.Random(seed)
    inst = random_instance(rng, rng.randint(n_lo, n_hi), rng.uniform(0.15, 0.5),
                           rng.randint(2, 8), rng.uniform(0.2, 0.8), 0)
    return inst, rng.randint(1, 3), rng.randint(1, 2)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_trichotomy_sound(seed):
    inst, k, r = _case(seed, 4, 20)
    out = ep_cover_top(inst, k, r)
    assert verify_outcome(inst, out, k, r)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_split_paths_are_disjoint(seed):
    inst, k, r = _case(seed, 4, 14)
    out = ep_cover_top(inst, k, r)
    if isinstance(out, Paths):
        seen = set()
        for p in out.paths:
            assert not seen & set(p)
            seen |= set(p)


def test_oracle_memo_consistent():
    pre = attach_degree_one_terminals(k33_instance())
    orc = truncated_valid_path_oracle(pre)
    assert orc(range(pre.n)) and orc(range(pre.n))
    assert orc.calls == 1


@pytest.mark.xfail(reason="a verified hitting set inside the size bound is a legal outcome even when k paths exist",
                   strict=False)
def test_completeness_against_exact():
    misses = []
    for seed in range(400):
        inst, k, r = _case(seed, 4, 14)
        k = min(k, 2)
        if max_disjoint_value(inst, k) < k:
            continue
        if brute_find_pattern(inst.demand_graph(), INDUCED_MATCHING, r) is not None:
            continue
        if not isinstance(ep_cover_top(inst, k, r), Paths):
            misses.append(seed)
    assert not misses, f"hitting set returned on {len(misses)} packable instances"
