import random
from fractions import Fraction

import pytest

from core.classes import ClassSpec, chain_prefix, is_member
from core.errors import MalformedInputError, PreconditionError, SignatureMismatchError
from core.expansions import (
    CONSISTENT,
    REFUTED,
    WITNESS,
    ExpandedStructure,
    ExpansionSpec,
    check_expP,
    check_precompact,
    check_reasonable,
    degree_equals_expansion_count,
    expanded_prefix,
    expansion_type_coloring,
    expansions_of,
    finite_logic_action,
    pullback_expansion,
    reachable_points,
    reduct_prefix,
    verify_expansion_functor,
)
from core.ramsey import INCONCLUSIVE, EmbeddingSet, syndetic_at_horizon, thick_at_horizon
from core.structures import (
    Embedding,
    FinStructure,
    embedding_index,
    enumerate_embeddings,
    is_embedding,
    is_isomorphic,
    reduct_to,
)
from utils.library import EMPTY_SIG, independent_set, linear_order, pure_set


@pytest.fixture(scope="module")
def lo_prefix(sets_lo):
    return expanded_prefix(sets_lo, 5)


def _p_points(sig, n, marked):
    return FinStructure.build(sig, n, {"P": [(v,) for v in marked]})


def _reverse(S: ExpandedStructure) -> ExpandedStructure:
    lt = frozenset((b, a) for a, b in S.star.relations[0])
    return ExpandedStructure(FinStructure(S.star.sig, S.star.size, (lt,)), S.base_sig)


def test_expansions_of_ordered_graphs(ordered_graphs_expansion, k2, p3):
    assert len(expansions_of(ordered_graphs_expansion, k2)) == 2
    stars = expansions_of(ordered_graphs_expansion, p3)
    assert len(stars) == 6
    assert all(S.reduct == p3 for S in stars)
    assert len({S.star for S in stars}) == 6


def test_expansions_of_sets(sets_lo, sets_p):
    assert len(expansions_of(sets_lo, pure_set(3))) == 6
    assert len(expansions_of(sets_p, pure_set(3))) == 8
    assert len(expansions_of(sets_lo, pure_set(0))) == 1


def test_expansions_of_wrong_signature(ordered_graphs_expansion):
    with pytest.raises(SignatureMismatchError):
        expansions_of(ordered_graphs_expansion, linear_order(2))


def test_expansion_requires_prefix_signature(linear_orders, graphs):
    with pytest.raises(SignatureMismatchError):
        ExpansionSpec("bad", linear_orders, graphs)


def test_pullback_makes_f_an_expanded_embedding(ordered_graphs_expansion, k2, p3):
    B_star = expansions_of(ordered_graphs_expansion, p3)[0]
    f = Embedding.checked((1, 2), k2, p3)
    A_star = pullback_expansion(f, B_star)
    assert A_star.reduct == k2
    assert is_embedding(f.map, A_star.star, B_star.star)
    assert A_star.star in {S.star for S in expansions_of(ordered_graphs_expansion, k2)}


def test_pullback_rejects_non_embedding(ordered_graphs_expansion, p3):
    B_star = expansions_of(ordered_graphs_expansion, p3)[0]
    with pytest.raises(MalformedInputError):
        pullback_expansion(Embedding(independent_set(2), p3, (1, 2)), B_star)


def test_ordered_graphs_are_reasonable(ordered_graphs_expansion):
    report = check_reasonable(ordered_graphs_expansion, 3)
    assert report.reasonable
    assert report.blocking is None
    assert report.instances > 0


def test_unreasonable_expansion_reports_blocking_instance(sets, sets_p):
    sig = sets_p.extended.sig
    lonely = ClassSpec("lonely-p", sig, (_p_points(sig, 2, [1]), _p_points(sig, 2, [1, 2])))
    spec = ExpansionSpec("sets-lonely-p", sets, lonely)
    report = check_reasonable(spec, 2)
    assert not report.reasonable
    A_star, B, f = report.blocking
    assert A_star.star == _p_points(sig, 1, [1])
    assert B.size == 2
    assert f == (1,)


def test_reasonable_with_prefix_cross_check(sets_lo, lo_prefix):
    report = check_reasonable(sets_lo, 2, prefix_star=lo_prefix, s=1)
    assert report.reasonable
    assert report.prefix_coverage.complete


def test_precompact_counts(sets_lo):
    report = check_precompact(sets_lo, 3)
    assert report.precompact
    assert [(labeled, types) for _, labeled, types in report.counts] == [(1, 1), (2, 1), (6, 1)]


def test_expP_for_ordered_sets(sets_lo):
    report = check_expP(sets_lo, 3, a_size=3)
    assert report.holds_at_bound
    assert not report.refuted
    for entry in report.entries:
        assert entry.verdict == WITNESS
        assert entry.witness.size == entry.A_star.size


def test_expP_refuted_for_unary_predicate(sets_p):
    report = check_expP(sets_p, 3, a_size=1)
    assert report.refuted
    assert not report.holds_at_bound
    schemes = {entry.A_star.relations[0] != frozenset(): entry.scheme for entry in report.entries}
    assert all(entry.verdict == REFUTED for entry in report.entries)
    assert schemes == {True: (False,), False: (True,)}


def test_expP_is_independent_of_jobs(sets_lo):
    assert check_expP(sets_lo, 3, 2, jobs=1) == check_expP(sets_lo, 3, 2, jobs=2)


def test_expP_rejects_bad_bound(sets_lo):
    with pytest.raises(MalformedInputError):
        check_expP(sets_lo, 0)


def test_reduct_prefix(sets_lo, lo_prefix):
    reduced = reduct_prefix(lo_prefix, sets_lo)
    assert reduced.steps == lo_prefix.steps
    assert reduced.top == pure_set(lo_prefix.top.size)


def test_expansion_type_coloring_splits_by_orientation(sets_lo, lo_prefix):
    gamma = expansion_type_coloring(sets_lo, pure_set(2), lo_prefix)
    n = lo_prefix.top.size
    assert gamma.r == 2
    assert len(gamma.assignment) == n * (n - 1)
    assert [len(c) for c in gamma.classes()] == [n * (n - 1) // 2] * 2


def test_degree_matches_expansion_count(sets_lo, lo_prefix):
    report = degree_equals_expansion_count(sets_lo, pure_set(2), lo_prefix)
    assert report.count == 2
    assert report.all_syndetic
    assert report.status == CONSISTENT
    assert report.degree.lower == 2
    assert report.degree.status == INCONCLUSIVE
    assert report.degree.structural_figure == Fraction(1)


def test_finite_logic_action(sets_lo, lo_prefix):
    identity = finite_logic_action(lo_prefix, sets_lo, 2, {1: 1, 2: 2})
    assert identity.star == lo_prefix.chain[1]
    swapped = finite_logic_action(lo_prefix, sets_lo, 2, {1: 2, 2: 1})
    assert swapped.star == _reverse(identity).star


def test_finite_logic_action_needs_full_domain(sets_lo, lo_prefix):
    with pytest.raises(PreconditionError):
        finite_logic_action(lo_prefix, sets_lo, 2, {1: 1})
    with pytest.raises(PreconditionError):
        finite_logic_action(lo_prefix, sets_lo, lo_prefix.steps + 1, {})


def test_reachable_points_cover_orders(sets_lo, lo_prefix):
    report = reachable_points(lo_prefix, sets_lo, 2)
    assert len(report.points) == 2
    assert report.missed == ()
    n = lo_prefix.top.size
    assert report.partial_isomorphisms == n * (n - 1)


def test_reachable_points_miss_unused_colour(sets_p):
    sig = sets_p.extended.sig
    chain = [_p_points(sig, n, range(1, n + 1)) for n in (1, 2, 3)]
    prefix = chain_prefix(sets_p.extended, chain)
    report = reachable_points(prefix, sets_p, 1)
    assert report.points == (_p_points(sig, 1, [1]),)
    assert report.missed == (_p_points(sig, 1, []),)


def test_order_reversal_is_an_expansion_isomorphism(sets_lo):
    report = verify_expansion_functor(sets_lo, sets_lo, _reverse, 3)
    assert report.ok
    assert report.checked > 0


def test_collapsing_map_is_not_an_isomorphism(sets_lo):
    def first(S):
        return expansions_of(sets_lo, S.reduct)[0]

    report = verify_expansion_functor(sets_lo, sets_lo, first, 3)
    assert not report.ok
    assert report.failure


def test_empty_base_signature_is_prefix_of_everything(sets):
    assert sets.sig == EMPTY_SIG
    assert is_isomorphic(reduct_to(linear_order(3), EMPTY_SIG), pure_set(3))


@pytest.fixture(scope="module")
def ordered_prefix(ordered_graphs_expansion):
    return expanded_prefix(ordered_graphs_expansion, 7)


def test_expansion_types_partition_the_reduct_embeddings(sets_lo, lo_prefix, ordered_graphs_expansion,
                                                        ordered_prefix, k2):
    for spec, A, prefix_star in ((sets_lo, pure_set(2), lo_prefix),
                                 (ordered_graphs_expansion, k2, ordered_prefix)):
        stars = expansions_of(spec, A)
        gamma = expansion_type_coloring(spec, A, prefix_star)
        top_star = ExpandedStructure(prefix_star.top, spec.base.sig)
        embs = enumerate_embeddings(A, top_star.reduct)
        classes = [gamma.color_class(i + 1) for i in range(len(stars))]
        assert all(classes)
        assert sum(len(c) for c in classes) == len(embs)
        for cls, S in zip(classes, stars):
            pulled = {j for j, x in enumerate(embs) if pullback_expansion(x, top_star).star == S.star}
            assert cls.members == pulled
            assert is_member(spec.extended, S.star)


def test_degree_matches_expansion_count_for_ordered_graphs(ordered_graphs_expansion, ordered_prefix, k2):
    report = degree_equals_expansion_count(ordered_graphs_expansion, k2, ordered_prefix, witness_bound=3)
    assert report.count == 2
    assert report.classes_syndetic == (True, True)
    assert report.status == CONSISTENT
    assert report.degree.lower == 2
    assert report.degree.upper is None
    assert report.degree.structural_figure == Fraction(1)


def test_witnessed_expansion_types_are_syndetic(sets_lo, lo_prefix):
    report = check_expP(sets_lo, 3, a_size=2)
    witnessed = [entry.A_star for entry in report.entries if entry.verdict == WITNESS]
    A = pure_set(2)
    gamma = expansion_type_coloring(sets_lo, A, lo_prefix)
    horizon = reduct_prefix(lo_prefix, sets_lo)
    checked = 0
    for i, S in enumerate(expansions_of(sets_lo, A)):
        if any(is_isomorphic(S.star, W) for W in witnessed):
            checked += 1
            assert syndetic_at_horizon(gamma.color_class(i + 1), horizon, 2).syndetic
    assert checked == 2


@pytest.mark.parametrize("seed", range(6))
def test_thickness_passes_to_one_expansion_type(seed, sets_lo, lo_prefix):
    rng = random.Random(seed)
    A = pure_set(2)
    assert lo_prefix.top.size >= 3
    horizon = reduct_prefix(lo_prefix, sets_lo)
    top = horizon.top
    embs = enumerate_embeddings(A, top)
    gamma = expansion_type_coloring(sets_lo, A, lo_prefix)
    members = {i for i in range(len(embs)) if rng.random() < 0.7}
    if seed % 2:
        triple = set(rng.sample(top.vertices, 3))
        members |= {i for i, x in enumerate(embs) if set(x.map) <= triple}
    T = EmbeddingSet(A, top, frozenset(members))
    trace = T.members & gamma.color_class(1).members
    A_star = expansions_of(sets_lo, A)[0].star
    index = embedding_index(A_star, lo_prefix.top)
    trace_star = EmbeddingSet(A_star, lo_prefix.top, frozenset(index[embs[i].map] for i in trace))
    trace_thick = thick_at_horizon(trace_star, lo_prefix, 3).thick
    if thick_at_horizon(T, horizon, 3).thick:
        assert trace_thick
    widened = EmbeddingSet(A, top, trace | gamma.color_class(2).members)
    assert thick_at_horizon(widened, horizon, 3).thick == trace_thick
