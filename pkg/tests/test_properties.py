"""随机化的不变量检查；种子固定，结果可复现"""
import itertools
import random

import pytest

from core.classes import HOLDS_AT_BOUND, chain_prefix, check_AP, generate_structures
from core.ramsey import (
    FAILS,
    Coloring,
    EmbeddingSet,
    act_on_coloring,
    arrow_check,
    compose_partial,
    find_arrow_witness,
    precompose_set,
    product_coloring,
    pullback_coloring,
    refines,
    syndetic_at_horizon,
    thick_at_horizon,
)
from core.structures import (
    Embedding,
    FinStructure,
    automorphisms,
    canonical_form,
    compose,
    enumerate_embeddings,
    induced_substructure,
    is_embedding,
    relabel,
)
from utils.library import GRAPH_SIG, complete_graph, cycle, linear_order, path

SEEDS = range(6)


def _random_graph(rng: random.Random, n: int) -> FinStructure:
    edges = [(a, b) for a in range(1, n + 1) for b in range(a + 1, n + 1) if rng.random() < 0.5]
    return FinStructure.build(GRAPH_SIG, n, {"E": edges + [(b, a) for a, b in edges]})


def _random_perm(rng: random.Random, n: int):
    perm = list(range(1, n + 1))
    rng.shuffle(perm)
    return tuple(perm)


def _random_coloring(rng: random.Random, A, C, r: int) -> Coloring:
    n = len(enumerate_embeddings(A, C))
    return Coloring(A, C, r, tuple(rng.randint(1, r) for _ in range(n)))


@pytest.mark.parametrize("seed", SEEDS)
def test_invariants_survive_relabeling(seed):
    rng = random.Random(seed)
    G = _random_graph(rng, 6)
    H = relabel(G, _random_perm(rng, 6))
    assert canonical_form(G).code == canonical_form(H).code
    assert len(automorphisms(G)) == len(automorphisms(H))
    for A in (complete_graph(2), path(3)):
        assert len(enumerate_embeddings(A, G)) == len(enumerate_embeddings(A, H))


@pytest.mark.parametrize("seed", SEEDS[:3])
def test_arrow_verdict_survives_relabeling(seed):
    rng = random.Random(seed)
    A, B = linear_order(2), linear_order(3)
    for n in (5, 6):
        C = relabel(linear_order(n), _random_perm(rng, n))
        assert arrow_check(C, B, A, 2, 1).verdict == arrow_check(linear_order(n), B, A, 2, 1).verdict


@pytest.mark.parametrize("seed", SEEDS)
def test_composition_of_embeddings_is_an_embedding(seed):
    rng = random.Random(seed)
    inner = rng.choice(enumerate_embeddings(complete_graph(2), path(4)))
    outer = rng.choice(enumerate_embeddings(path(4), cycle(6)))
    composed = compose(outer, inner)
    assert is_embedding(composed.map, complete_graph(2), cycle(6))


@pytest.mark.parametrize("seed", SEEDS)
def test_product_refines_both_factors(seed, k2, k3):
    rng = random.Random(seed)
    gamma = _random_coloring(rng, k2, k3, 3)
    delta = _random_coloring(rng, k2, k3, 2)
    product = product_coloring(gamma, delta)
    assert refines(product, gamma)
    assert refines(product, delta)
    assert len(set(product.assignment)) <= len(set(gamma.assignment)) * len(set(delta.assignment))


@pytest.mark.parametrize("seed", SEEDS)
def test_pullback_is_functorial(seed):
    rng = random.Random(seed)
    k1, k2, p3, c5 = complete_graph(1), complete_graph(2), path(3), cycle(5)
    gamma = _random_coloring(rng, k1, c5, 3)
    f = rng.choice(enumerate_embeddings(k1, k2))
    g = rng.choice(enumerate_embeddings(k2, p3))
    assert pullback_coloring(pullback_coloring(gamma, f), g) == pullback_coloring(gamma, compose(g, f))


@pytest.mark.parametrize("seed", SEEDS)
def test_action_is_functorial(seed, c5):
    rng = random.Random(seed)
    auts = [dict(enumerate(e.map, start=1)) for e in automorphisms(c5)]
    g, h = rng.choice(auts), rng.choice(auts)
    gamma = _random_coloring(rng, complete_graph(2), c5, 2)
    assert act_on_coloring(h, act_on_coloring(g, gamma)) == act_on_coloring(compose_partial(h, g), gamma)


@pytest.mark.parametrize("seed", SEEDS)
def test_thickness_is_monotone(seed, lo_chain):
    rng = random.Random(seed)
    A = linear_order(2)
    top = lo_chain.top
    S = EmbeddingSet.from_predicate(A, top, lambda e: 6 not in e.map)
    extra = {i for i in range(len(enumerate_embeddings(A, top))) if rng.random() < 0.5}
    T = EmbeddingSet(A, top, S.members | extra)
    assert thick_at_horizon(S, lo_chain, 3).thick
    assert thick_at_horizon(T, lo_chain, 3).thick


def test_thick_sets_stay_thick_under_precomposition(lo_chain):
    top = lo_chain.top
    lo2, lo3 = linear_order(2), linear_order(3)
    S = EmbeddingSet.from_predicate(lo3, top, lambda e: 6 not in e.map)
    assert thick_at_horizon(S, lo_chain, 3).thick
    for f in enumerate_embeddings(lo2, lo3):
        assert thick_at_horizon(precompose_set(S, f), lo_chain, 3).thick


def test_identity_embedding_composes_neutrally(p3):
    identity = Embedding.checked((1, 2, 3), p3, p3)
    for e in enumerate_embeddings(complete_graph(2), p3):
        assert compose(identity, e) == e


@pytest.mark.parametrize("seed", SEEDS)
def test_arrow_is_monotone(seed):
    rng = random.Random(seed)
    k1, k2, k3 = complete_graph(1), complete_graph(2), complete_graph(3)
    C = _random_graph(rng, 6)
    D, _ = induced_substructure(C, sorted(rng.sample(range(1, 7), 5)))
    if arrow_check(D, k2, k1, 2, 1).holds:
        assert arrow_check(C, k2, k1, 2, 1).holds
    if arrow_check(C, k2, k1, 3, 1).holds:
        assert arrow_check(C, k2, k1, 2, 1).holds
    if arrow_check(C, k2, k1, 3, 1).holds:
        assert arrow_check(C, k2, k1, 3, 2).holds
    if arrow_check(C, k3, k1, 2, 1).holds:
        assert arrow_check(C, k2, k1, 2, 1).holds


def test_arrow_holds_for_every_smaller_base():
    k1, k2, k3, k5 = (complete_graph(n) for n in (1, 2, 3, 5))
    assert arrow_check(k5, k3, k1, 2, 1).holds
    assert arrow_check(k5, k2, k1, 2, 1).holds
    lo6, lo3 = linear_order(6), linear_order(3)
    for A in (linear_order(1), linear_order(2)):
        assert arrow_check(lo6, lo3, A, 2, 1).holds


@pytest.mark.parametrize("seed", SEEDS)
def test_two_colourings_below_an_arrow_have_a_thick_class(seed, lo_chain):
    rng = random.Random(seed)
    A, top = linear_order(2), lo_chain.top
    assert arrow_check(top, linear_order(3), A, 2, 1).holds
    for _ in range(20):
        gamma = _random_coloring(rng, A, top, 2)
        assert any(thick_at_horizon(cls, lo_chain, 3).thick for cls in gamma.classes())


@pytest.mark.parametrize("seed", SEEDS)
def test_partition_of_thick_set_has_thick_part(seed, linear_orders):
    rng = random.Random(seed)
    prefix = chain_prefix(linear_orders, [linear_order(n) for n in range(1, 8)])
    A, top = linear_order(2), prefix.top
    S = EmbeddingSet.from_predicate(A, top, lambda e: 7 not in e.map)
    assert thick_at_horizon(S, prefix, 3).thick
    left = frozenset(i for i in sorted(S.members) if rng.random() < 0.5)
    parts = (EmbeddingSet(A, top, left), EmbeddingSet(A, top, S.members - left))
    assert any(thick_at_horizon(part, prefix, 3).thick for part in parts)


def test_bad_colouring_splits_into_thin_parts(linear_orders):
    prefix = chain_prefix(linear_orders, [linear_order(n) for n in range(1, 6)])
    result = arrow_check(prefix.top, linear_order(3), linear_order(2), 2, 1)
    assert result.verdict == FAILS
    parts = result.coloring.classes()
    assert len(parts) == 2
    assert not any(thick_at_horizon(part, prefix, 3).thick for part in parts)


def test_syndetic_classes_pull_back_to_syndetic_classes(lo_chain):
    lo1, lo2 = linear_order(1), linear_order(2)
    top = lo_chain.top
    f = Embedding.checked((1,), lo1, lo2)
    checked = 0
    for values in itertools.product((1, 2), repeat=top.size):
        gamma = Coloring(lo1, top, 2, values)
        pulled = pullback_coloring(gamma, f)
        for color in (1, 2):
            if syndetic_at_horizon(gamma.color_class(color), lo_chain, 3).syndetic:
                checked += 1
                assert syndetic_at_horizon(pulled.color_class(color), lo_chain, 4).syndetic
    assert checked > 0


@pytest.mark.parametrize("seed", SEEDS)
def test_action_preserves_refinement(seed, lo_chain):
    rng = random.Random(seed)
    A, top = linear_order(2), lo_chain.top
    gamma = _random_coloring(rng, A, top, 2)
    delta = product_coloring(gamma, _random_coloring(rng, A, top, 3))
    n = rng.randint(2, top.size)
    g = dict(zip(sorted(rng.sample(top.vertices, n)), sorted(rng.sample(top.vertices, n))))
    assert refines(delta, gamma)
    assert refines(act_on_coloring(g, delta), act_on_coloring(g, gamma))


def test_ramsey_linear_orders_amalgamate(linear_orders):
    witness = find_arrow_witness(linear_orders, linear_order(3), linear_order(2), 2, 1, 6)
    assert witness.found
    assert witness.witness.size == 6
    assert check_AP(linear_orders, 3).verdict == HOLDS_AT_BOUND


@pytest.mark.parametrize("seed", SEEDS)
def test_canonical_code_survives_fifty_relabelings(seed, graphs):
    rng = random.Random(seed)
    corpus = [A for n in range(1, 6) for A in generate_structures(graphs, n)]
    corpus += [linear_order(n) for n in range(1, 6)]
    for A in rng.sample(corpus, 8):
        code = canonical_form(A).code
        for _ in range(50):
            assert canonical_form(relabel(A, _random_perm(rng, A.size))).code == code


def test_distinct_codes_have_no_bijective_embedding(graphs):
    reps = generate_structures(graphs, 4)
    for A, B in itertools.permutations(reps, 2):
        assert canonical_form(A).code != canonical_form(B).code
        assert not enumerate_embeddings(A, B)
