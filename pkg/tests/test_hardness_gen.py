import os
import itertools

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from dpath.graph_core import InvalidInput, Instance, exact_max_disjoint, max_disjoint_value, verify_solution
from dpath.hardness_gen import (
    GridTilingInstance,
    IndexedSkew,
    SkewLabeledInstance,
    boundary_on_one_face,
    build_general_gadget,
    build_main_gadget,
    build_selector_gadget,
    check_partial_solution,
    complete_path_bound,
    gen_grid_tiling,
    indexed_to_skew_labeled,
    iota,
    is_grid_tiling_solution,
    main_tuple,
    milp_linkable,
    reduce_matching,
    reduce_skew,
    represented_tuples,
    selector_audit,
    skew_k_prime,
    skew_labeled_to_indexed,
    skew_to_demand_instance,
    skew_valid,
    solve_grid_tiling,
    valid_label_pairs,
)


def empty_tiling(k, n):
    return GridTilingInstance(k, n, tuple(tuple(frozenset() for _ in range(k)) for _ in range(k)))


# --- grid tiling ---------------------------------------------------------------

def test_grid_tiling_trivial():
    gt = gen_grid_tiling(1, 1, seed=0, planted=True)
    assert (1, 1) in gt.S(1, 1)


@pytest.mark.parametrize("seed", range(10))
def test_planted_solution_is_consistent(seed):
    gt = gen_grid_tiling(2, 2, seed=seed, planted=True)
    assert is_grid_tiling_solution(gt, gt.solution)


def test_empty_sets_unsolvable():
    assert solve_grid_tiling(empty_tiling(2, 2)) is None


def test_pair_out_of_range():
    with pytest.raises(InvalidInput):
        GridTilingInstance(1, 1, ((frozenset({(2, 1)}),),))


def test_iota():
    assert iota(2, 3, 4) == 7
    assert sorted(iota(x, y, 3) for x in range(1, 4) for y in range(1, 4)) == list(range(1, 10))


# --- matching reduction -------------------------------------------------------------

@pytest.mark.parametrize("n", [1, 2])
def test_matching_planted_k1(n):
    r = reduce_matching(gen_grid_tiling(1, n, seed=1, planted=True))
    assert r.k_prime == 4
    assert r.cycle_length == 4 * (2 * n * n + 2)
    assert max_disjoint_value(r.instance, r.k_prime + 1) == 4
    assert verify_solution(r.instance.with_k(4), r.witness)


def test_matching_demand_is_perfect_matching():
    r = reduce_matching(gen_grid_tiling(2, 2, seed=4, planted=True))
    deg = {t: 0 for t in r.instance.terminals}
    for s, t in r.instance.demand:
        deg[s] += 1
        deg[t] += 1
    assert set(deg.values()) == {1}


def test_matching_empty_set_k1():
    r = reduce_matching(empty_tiling(1, 1))
    assert not r.instance.demand
    assert max_disjoint_value(r.instance, 4) < r.k_prime


@pytest.mark.parametrize("seed", range(3))
def test_matching_k2_witness_planar(seed):
    r = reduce_matching(gen_grid_tiling(2, 2, seed=seed, planted=True))
    assert r.k_prime == 4 * 4 + 2 * 2 * 1
    assert len(r.hitting) == r.k_prime
    assert len(r.witness) == r.k_prime
    assert verify_solution(r.instance.with_k(r.k_prime), r.witness)
    assert nx.check_planarity(r.instance.graph())[0]


@pytest.mark.parametrize("seed", range(6))
def test_matching_no_fidelity_k1_n1(seed):
    gt = gen_grid_tiling(1, 1, seed=seed, planted=False, density=0.5)
    r = reduce_matching(gt)
    solvable = solve_grid_tiling(gt) is not None
    assert (max_disjoint_value(r.instance, 5) >= r.k_prime) == solvable


# --- skew labels and index form ------------------------------------------------------

def test_skew_valid():
    assert skew_valid(-3, 3) and skew_valid(3, -3) and skew_valid(-5, 2)
    assert not skew_valid(2, -1) and not skew_valid(2, 2) and not skew_valid(-1, -1)


def test_zero_label_rejected():
    with pytest.raises(InvalidInput):
        SkewLabeledInstance(2, ((0, 1),), {0: 0})


def test_consecutive_labels_reindex():
    sli = SkewLabeledInstance(4, ((0, 1), (2, 3)), {0: 1, 1: -1, 2: 2, 3: -2})
    idx = skew_labeled_to_indexed(sli)
    assert idx.s == (0, 2) and idx.t == (1, 3) and idx.added == ()


def _validity_table(labels):
    ts = sorted(labels)
    return {(u, w): skew_valid(labels[u], labels[w]) for u in ts for w in ts if u != w}


def test_duplicate_labels_injectivised():
    sli = SkewLabeledInstance(3, (), {0: 3, 1: 3, 2: -3})
    idx = skew_labeled_to_indexed(sli)
    labels = {v: i for i, v in enumerate(idx.s, 1)} | {v: -i for i, v in enumerate(idx.t, 1)}
    orig = _validity_table(sli.labels)
    assert {p: v for p, v in _validity_table(labels).items() if p in orig} == orig


def test_empty_terminals():
    idx = skew_labeled_to_indexed(SkewLabeledInstance(2, ((0, 1),), {}))
    assert idx.s == () and idx.t == () and idx.n == 2


def test_skew_demand_small():
    one = skew_to_demand_instance(IndexedSkew(2, ((0, 1),), (0,), (1,)))
    assert set(one.demand) == {(0, 1)}
    two = skew_to_demand_instance(IndexedSkew(4, (), (0, 1), (2, 3)))
    assert set(two.demand) == {(0, 2), (0, 3), (1, 3)}


def test_skew_demand_rejects_shared_vertex():
    with pytest.raises(InvalidInput):
        skew_to_demand_instance(IndexedSkew(2, (), (0, 1), (1, 0)))


@st.composite
def skew_instances(draw):
    n = draw(st.integers(2, 7))
    edges = draw(st.sets(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda e: e[0] < e[1]),
                         max_size=12))
    labelled = draw(st.lists(st.integers(0, n - 1), unique=True, max_size=n))
    labels = {v: draw(st.integers(-4, 4).filter(bool)) for v in labelled}
    return SkewLabeledInstance(n, tuple(sorted(edges)), labels)


@settings(max_examples=60, deadline=None)
@given(skew_instances(), st.integers(1, 2))
def test_indexed_round_trip_solvability(sli, k):
    base = exact_max_disjoint(sli.to_instance(k)) is not None
    idx = skew_labeled_to_indexed(sli)
    assert (exact_max_disjoint(skew_to_demand_instance(idx, k)) is not None) == base
    back = indexed_to_skew_labeled(idx)
    assert (exact_max_disjoint(back.to_instance(k)) is not None) == base


@settings(max_examples=60, deadline=None)
@given(skew_instances())
def test_injectivisation_preserves_validity(sli):
    idx = skew_labeled_to_indexed(sli)
    labels = {v: i for i, v in enumerate(idx.s, 1)} | {v: -i for i, v in enumerate(idx.t, 1)}
    orig = _validity_table(sli.labels)
    assert {p: v for p, v in _validity_table(labels).items() if p in orig} == orig


# --- selector ------------------------------------------------------------------------

def test_selector_labels_in_range():
    for m in (1, 2, 3):
        g = build_selector_gadget(m)
        assert all(-5 * m <= x <= 7 * m for x in g.labels.values())


def test_selector_witnesses():
    for m in (1, 2, 3):
        g = build_selector_gadget(m)
        for i, paths in g.witnesses.items():
            assert check_partial_solution(g, paths) == (4, (6 * m + i, -m - i))


def test_selector_m2_i2_ends():
    g = build_selector_gadget(2)
    assert check_partial_solution(g, g.witnesses[2])[1] == (14, -4)


@pytest.mark.parametrize("m", [1, 2])
def test_selector_audit(m):
    a = selector_audit(m)
    assert a.max_complete == 4
    assert a.represented == {(6 * m + x, -m - y) for x in range(1, m + 1) for y in range(1, x + 1)}


def test_selector_audit_matches_flow_search():
    g = build_selector_gadget(2)
    assert represented_tuples(g, 4) == selector_audit(2).represented


def test_selector_boundary_on_face():
    g = build_selector_gadget(2)
    assert boundary_on_one_face(g.graph(), g.boundary)


def test_check_partial_rejects_overlap():
    g = build_selector_gadget(1)
    p = g.witnesses[1]
    with pytest.raises(InvalidInput):
        check_partial_solution(g, [p[0], p[0]])


# --- general and main gadgets -------------------------------------------------------------

def test_general_gadget_m1():
    g = build_general_gadget([(8, 9, 10, 11, 12, 13, 14, 15)])
    assert check_partial_solution(g, g.witnesses[1]) == (6, (8, 9, 10, 11, 12, 13, 14, 15))
    assert complete_path_bound(g) == 6
    assert boundary_on_one_face(g.graph(), g.boundary)
    assert nx.check_planarity(g.graph())[0]


def test_general_gadget_block_labels():
    g = build_general_gadget([(15,) * 8, (16,) * 8])
    assert g.labels[g.vertex(("g", 1, 1))] == -13
    assert g.labels[g.vertex(("g", 1, 10))] == 3


def test_general_gadget_small_coordinate():
    with pytest.raises(InvalidInput):
        build_general_gadget([(7, 9, 10, 11, 12, 13, 14, 15)])


def test_general_gadget_empty_is_bare_column():
    g = build_general_gadget([])
    assert g.n == 10 and not g.labels and len(g.boundary) == 8


def test_general_gadget_two_blocks_admits_seven_complete_paths():
    # the top-row pairs (-6m-i, m+i') are valid, so two blocks leave room for a 7th path
    g = build_general_gadget([(15,) * 8, (16,) * 8])
    v = g.vertex
    sel = lambda x: v(("sel", x))
    paths = [
        [sel(("f", r, 0)), sel(("f", r, 1))] for r in range(3)
    ] + [
        [sel("alpha"), sel(("u", 0)), sel(("l", 1)), sel(("l", 2)), sel("beta")],
        [v(("g", 1, 1)), sel("b+"), sel(("u", 2)), sel(("u", 1)), sel(("p", 1))],
        [sel(("q", 1)), sel(("l", 0)), sel("b-"), *[v(("g", 10, c)) for c in range(1, 11)],
         *[v(("g", r, 10)) for r in range(9, 0, -1)]],
        [v(("g", 1, c)) for c in range(11, 21)],
    ]
    assert check_partial_solution(g, paths)[0] == 7


def test_main_tuple():
    assert main_tuple(9, 1, 1) == (10, 8, 10, 8, 10, 8, 10, 8)


def test_main_gadget_positive_n1():
    g = build_main_gadget(1, 9, [(1, 1)])
    assert check_partial_solution(g, g.witnesses[1, 1]) == (6, main_tuple(9, 1, 1))
    assert complete_path_bound(g) == 6
    assert boundary_on_one_face(g.graph(), g.boundary)


def test_main_gadget_negative_relabel():
    pos = build_main_gadget(1, 9, [(1, 1)])
    neg = build_main_gadget(1, -2, [(1, 1)], sign=-1)
    assert neg.info["delta"] == 11
    assert valid_label_pairs(neg.labels) == valid_label_pairs(pos.labels)
    assert all((x < 0) != (pos.labels[v] < 0) for v, x in neg.labels.items())
    assert check_partial_solution(neg, neg.witnesses[1, 1]) == (6, main_tuple(-2, 1, 1))


def test_main_gadget_empty_set():
    g = build_main_gadget(1, 9, [])
    assert complete_path_bound(g) == 0 and not g.witnesses


@pytest.mark.parametrize("B,sign", [(8, 1), (-1, -1)])
def test_main_gadget_range(B, sign):
    with pytest.raises(InvalidInput):
        build_main_gadget(1, B, [(1, 1)], sign)


def test_milp_linkable_small():
    adj = [[1], [0, 2], [1, 3], [2]]
    assert milp_linkable(adj, [(0, 3)])
    assert not milp_linkable(adj, [(0, 2), (1, 3)])
    cyc = [[1, 3], [0, 2], [1, 3], [2, 0]]
    assert not milp_linkable(cyc, [(0, 2), (1, 3)])
    assert milp_linkable(cyc, [(0, 1), (2, 3)])


# --- skew reduction ---------------------------------------------------------------------

def test_skew_k_prime():
    assert skew_k_prime(1) == 14 and skew_k_prime(2) == 48


def test_skew_reduction_k1_witness():
    r = reduce_skew(gen_grid_tiling(1, 1, seed=0, planted=True))
    assert r.k_prime == 14 and len(r.witness) == 14
    assert all(r.instance.is_valid_path(p) for p in r.witness)
    assert len(set(itertools.chain.from_iterable(r.witness))) == sum(map(len, r.witness))
    assert nx.check_planarity(nx.Graph(r.instance.edges))[0]


def test_skew_reduction_k2_witness():
    r = reduce_skew(gen_grid_tiling(2, 2, seed=3, planted=True))
    assert r.k_prime == 48 and len(r.witness) == 48
    assert len(r.boundary_once) + len(r.boundary_shared) == 4 * 2 * 3
    assert all(r.instance.is_valid_path(p) for p in r.witness)
    assert verify_solution(r.instance.to_instance(48), r.witness)
    assert nx.check_planarity(nx.Graph(r.instance.edges))[0]


@pytest.mark.skipif(os.environ.get("DPATH_SLOW_AUDIT") != "1", reason="about 20 minutes; set DPATH_SLOW_AUDIT=1")
def test_main_gadget_n1_represents_only_its_tuple():
    g = build_main_gadget(1, 9, [(1, 1)])
    assert represented_tuples(g, 6, time_limit=60) == {main_tuple(9, 1, 1)}
