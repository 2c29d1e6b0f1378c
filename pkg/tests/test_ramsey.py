from fractions import Fraction

import pytest

from core.errors import MalformedInputError, PreconditionError
from core.ramsey import (
    ESTABLISHED,
    FAILS,
    HOLDS,
    INCONCLUSIVE,
    TRIVIALLY_HOLDS,
    Coloring,
    EmbeddingSet,
    arrow_check,
    bad_coloring_tree,
    degree_report,
    find_arrow_witness,
    precompose_set,
    structural_arrow_check,
    syndetic_at_horizon,
    thick_at_horizon,
    verify_bad_coloring,
)
from core.structures import Embedding, embedding_index, enumerate_embeddings, is_isomorphic
from utils.library import complete_graph, linear_order


@pytest.fixture
def lo2():
    return linear_order(2)


@pytest.fixture
def lo3():
    return linear_order(3)


def test_lo6_arrows_triangles(lo2, lo3):
    result = arrow_check(linear_order(6), lo3, lo2, 2, 1)
    assert result.verdict == HOLDS
    assert result.coloring is None
    assert result.nodes > 0
    assert result.verify()


def test_lo5_has_bad_coloring(lo2, lo3):
    result = arrow_check(linear_order(5), lo3, lo2, 2, 1)
    assert result.verdict == FAILS
    assert result.coloring.is_full
    assert len(result.coloring.assignment) == 10
    assert result.coloring.assignment[0] == 1
    assert verify_bad_coloring(result.coloring, lo3, 1)
    assert result.verify()


def test_arrow_is_independent_of_jobs(lo2, lo3):
    for n in (5, 6):
        assert arrow_check(linear_order(n), lo3, lo2, 2, 1, jobs=1) == \
            arrow_check(linear_order(n), lo3, lo2, 2, 1, jobs=2)


def test_r_at_most_k_trivially_holds(lo2, lo3):
    result = arrow_check(lo3, lo3, lo2, 1, 1)
    assert result.verdict == TRIVIALLY_HOLDS
    assert result.holds


def test_b_not_embedding_gives_trivial_bad_coloring(lo2, lo3):
    result = arrow_check(lo3, linear_order(4), lo2, 2, 1)
    assert result.verdict == FAILS
    assert set(result.coloring.assignment) == {1}
    assert result.verify()


def test_empty_embedding_set_is_a_precondition_error(lo2):
    with pytest.raises(PreconditionError):
        arrow_check(linear_order(1), linear_order(1), lo2, 2, 1)


def test_bad_parameters_rejected(lo2, lo3):
    with pytest.raises(MalformedInputError):
        arrow_check(lo3, lo3, lo2, 0, 1)


def test_tampered_bad_coloring_fails_verification(lo2, lo3):
    result = arrow_check(linear_order(5), lo3, lo2, 2, 1)
    constant = Coloring.constant(lo2, linear_order(5), 1, 2)
    assert not verify_bad_coloring(constant, lo3, 1)
    partial = Coloring(lo2, linear_order(5), 2, (0,) + result.coloring.assignment[1:])
    assert not verify_bad_coloring(partial, lo3, 1)


def test_structural_and_embedding_arrows_differ_for_edges():
    k2, k3, k6 = complete_graph(2), complete_graph(3), complete_graph(6)
    structural = structural_arrow_check(k6, k3, k2, 2, 1)
    assert structural.verdict == HOLDS
    assert structural.structural
    embedding = arrow_check(k6, k3, k2, 2, 1)
    assert embedding.verdict == FAILS
    assert embedding.verify()


def test_structural_bad_coloring_on_k5():
    k2, k3, k5 = complete_graph(2), complete_graph(3), complete_graph(5)
    result = structural_arrow_check(k5, k3, k2, 2, 1)
    assert result.verdict == FAILS
    assert len(result.copy_assignment) == 10
    assert verify_bad_coloring(result.coloring, k3, 1)


def test_witness_for_vertex_colorings(graphs):
    result = find_arrow_witness(graphs, complete_graph(2), complete_graph(1), 2, 1, 3)
    assert result.found
    assert is_isomorphic(result.witness, complete_graph(3))


def test_witness_for_linear_orders(linear_orders, lo2, lo3):
    result = find_arrow_witness(linear_orders, lo3, lo2, 2, 1, 6)
    assert is_isomorphic(result.witness, linear_order(6))
    assert result.checked == 4


def test_no_witness_below_bound(linear_orders, lo2, lo3):
    result = find_arrow_witness(linear_orders, lo3, lo2, 2, 1, 5)
    assert not result.found
    assert result.witness is None


def test_witness_requires_members(c3c5free):
    with pytest.raises(PreconditionError):
        find_arrow_witness(c3c5free, complete_graph(3), complete_graph(2), 2, 1, 4)


def test_degree_of_edge_is_inconclusive_at_small_bound(graphs):
    report = degree_report(graphs, complete_graph(2), witness_bound=3)
    assert report.status == INCONCLUSIVE
    assert report.upper is None
    assert report.lower == 1
    assert report.automorphisms == 2
    assert report.structural_figure == Fraction(1, 2)
    assert [e.k for e in report.upper_evidence] == [1, 2]
    assert not any(e.verified for e in report.upper_evidence)


def test_degree_of_ordered_pair_is_established(linear_orders, lo_chain, lo2):
    report = degree_report(linear_orders, lo2, witness_bound=6, horizon=lo_chain, s=3)
    assert report.status == ESTABLISHED
    assert report.upper == 1
    assert report.lower == 1
    assert report.upper_evidence[0].monotone
    assert report.lower_evidence.syndetic == (True,)
    assert report.structural_figure == Fraction(1)


def test_degree_requires_member(c3c5free):
    with pytest.raises(PreconditionError):
        degree_report(c3c5free, complete_graph(3), witness_bound=3)


def test_thick_full_and_empty(lo_chain, lo2):
    top = lo_chain.top
    full = EmbeddingSet.full(lo2, top)
    assert len(full) == 15
    assert thick_at_horizon(full, lo_chain, 3).thick
    empty = EmbeddingSet(lo2, top)
    result = thick_at_horizon(empty, lo_chain, 3)
    assert not result.thick
    assert is_isomorphic(result.blocking, lo2)


def test_thickness_depends_on_horizon(lo_chain, lo2):
    avoiding_last = EmbeddingSet.from_predicate(lo2, lo_chain.top, lambda e: 6 not in e.map)
    assert thick_at_horizon(avoiding_last, lo_chain, 3).thick
    result = thick_at_horizon(avoiding_last, lo_chain, 6)
    assert not result.thick
    assert is_isomorphic(result.blocking, linear_order(6))


def test_syndetic_full_set(lo_chain, lo2):
    full = EmbeddingSet.full(lo2, lo_chain.top)
    result = syndetic_at_horizon(full, lo_chain, 3)
    assert result.syndetic
    assert not result.complement.thick


def test_precompose_set(lo_chain, lo2, lo3):
    S = EmbeddingSet.full(lo3, lo_chain.top)
    f = Embedding.checked((1, 2), lo2, lo3)
    pulled = precompose_set(S, f)
    assert len(pulled) == 10
    assert all(6 not in e.map for e in pulled.embeddings())


def test_embedding_set_rejects_out_of_range(lo2, lo3):
    with pytest.raises(MalformedInputError):
        EmbeddingSet(lo2, lo3, frozenset({3}))


def test_konig_tree_counts(lo_chain, lo2, lo3):
    tree = bad_coloring_tree(lo2, lo3, lo_chain, 6, 2, 1)
    assert tree.counts == (1, 2, 6, 18, 12, 0)
    assert tree.arrow_level == 6
    assert [level.embeddings for level in tree.levels] == [0, 1, 3, 6, 10, 15]
    for t in range(1, 6):
        previous, level = tree.levels[t - 1], tree.levels[t]
        index = embedding_index(lo2, lo_chain.chain[t])
        old = [index[e.map] for e in enumerate_embeddings(lo2, lo_chain.chain[t - 1])]
        assert all(0 <= p < previous.count for p in level.parents)
        for coloring, p in zip(level.colorings, level.parents):
            assert tuple(coloring[i] for i in old) == previous.colorings[p]
    assert tree.levels[4].extendable == 0


def test_konig_tree_depth_checked(lo_chain, lo2, lo3):
    with pytest.raises(PreconditionError):
        bad_coloring_tree(lo2, lo3, lo_chain, 7, 2, 1)
