"""Cross-checks between the decider, the oracles, the decomposition and the bounds."""

import random
from itertools import combinations

import networkx as nx
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from core import Multigraph, bisubdivide, contract_shore, cut, is_even_cycle, named_graph, underlying_simple
from decomposition import DecompositionPolicy, brick_count, is_brace, is_brick, same_leaves, tight_cut_decomposition
from families import check_bounds
from generators import GeneratorConfig, exhaustive_matching_covered, random_matching_covered
from matching import (
    MatchabilityCache,
    is_matching_covered,
    maximum_matching,
    odd_components_count,
    perfect_matching,
    pm_with_forced_and_forbidden,
    tutte_set,
)
from oracle import check_crossing_properties, oracle_k4, oracle_theta, verify_k4_witness
from structure import (
    barrier_contractions,
    bicontract,
    canonical_partition,
    elp_cut,
    is_tight_cut,
    iter_two_separations,
    marked_components,
)
from theta import BASED, is_theta_free
from verifier import verify_certificate
from witness import verify_theta_witness


@st.composite
def matching_covered_graphs(draw, orders=(4, 6, 8), max_extra=3, simple=True):
    cfg = GeneratorConfig(
        n=draw(st.sampled_from(orders)), extra_edges=draw(st.integers(0, max_extra)), simple=simple
    )
    return random_matching_covered(cfg, random.Random(draw(st.integers(0, 2**32))))


@st.composite
def small_graphs(draw, max_n=8):
    """Arbitrary simple graphs, matchable or not."""
    n = draw(st.integers(1, max_n))
    pairs = list(combinations(range(n), 2))
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Multigraph.from_pairs(n, [p for p, k in zip(pairs, keep) if k])


def _agrees_with_oracle(G):
    certificate = is_theta_free(G)
    found = oracle_theta(G)
    assert certificate.is_free == (found is None)
    if certificate.witness is not None:
        assert verify_theta_witness(G, certificate.witness)
    return certificate


@given(matching_covered_graphs())
def test_decider_matches_oracle(G):
    _agrees_with_oracle(G)


@given(matching_covered_graphs())
def test_theta_or_k4(G):
    assume(not is_even_cycle(G))
    assert oracle_theta(G) is not None or oracle_k4(G) is not None


@given(matching_covered_graphs(orders=(6, 8, 10)), st.integers(0, 1000))
def test_brick_count_ignores_cut_order(G, seed):
    reference = tight_cut_decomposition(G)
    other = tight_cut_decomposition(G, DecompositionPolicy(strategy="random", seed=seed))
    assert reference.b == other.b
    assert same_leaves(reference, other)


@given(matching_covered_graphs(orders=(6, 8, 10)))
def test_brick_count_is_additive(G):
    b = brick_count(G)
    cache = MatchabilityCache(G)
    for B in canonical_partition(G, cache):
        if len(B) > 1:
            assert b == sum(brick_count(item.graph) for item in barrier_contractions(G, B))
            return
    sep = next(iter_two_separations(G), None)
    if sep is not None and len(sep.components) == 2:
        assert b == sum(brick_count(part.graph) for part in marked_components(G, sep))


@given(matching_covered_graphs())
def test_canonical_partition_is_the_pair_relation(G):
    cache = MatchabilityCache(G)
    index = {v: i for i, part in enumerate(canonical_partition(G, cache)) for v in part}
    for u, v in combinations(G.vertices, 2):
        assert (index[u] == index[v]) == (not cache.pair(u, v))


@given(matching_covered_graphs(orders=(4, 6, 8, 10)))
def test_bounds_are_consistent(G):
    assert check_bounds(G).consistent


@given(matching_covered_graphs(orders=(6, 8, 10)))
def test_elp_cut_is_tight(G):
    found = elp_cut(G)
    if found is not None:
        assert cut(G, found.shore).is_nontrivial
        assert is_tight_cut(G, found.shore)


@given(matching_covered_graphs(orders=(6, 8, 10)))
def test_certificates_verify(G):
    data = is_theta_free(G).to_dict()
    report = verify_certificate(G, data)
    assert report, report.reasons


@given(st.integers(0, 2**32))
def test_minimum_degree_four_forces_theta(seed):
    G = random_matching_covered(GeneratorConfig(n=8, min_degree=4), random.Random(seed))
    assert is_theta_free(G).verdict == BASED


def test_corpus_agrees_with_oracle(random_corpus):
    for G in random_corpus:
        _agrees_with_oracle(G)


@pytest.mark.slow
def test_exhaustive_small_orders():
    for G in exhaustive_matching_covered(8):
        certificate = _agrees_with_oracle(G)
        assert verify_certificate(G, certificate.to_dict())
        assert check_bounds(G).consistent


@pytest.mark.slow
def test_random_corpus_up_to_twelve():
    rng = random.Random(2024)
    for i in range(500):
        cfg = GeneratorConfig(n=rng.choice((4, 6, 8, 10, 12)), extra_edges=rng.randrange(4))
        G = random_matching_covered(cfg, rng)
        certificate = _agrees_with_oracle(G)
        assert verify_certificate(G, certificate.to_dict()), i


@pytest.mark.slow
def test_petersen_plus_any_edge_is_based():
    petersen = named_graph("petersen")
    chords = [(u, v) for u, v in combinations(petersen.vertices, 2) if not petersen.edges_between(u, v)]
    assert len(chords) == 30
    for u, v in chords:
        G, _ = petersen.with_edge(u, v)
        _agrees_with_oracle(G)
        assert not is_theta_free(G).is_free


@given(matching_covered_graphs(orders=(4, 6, 8, 10), max_extra=0))
def test_bipartite_theta_free_graphs_are_cycles(G):
    assume(G.is_bipartite())
    assert is_theta_free(G).is_free == is_even_cycle(G)


@given(matching_covered_graphs(orders=(6, 8, 10)))
def test_bicontraction_keeps_verdict(G):
    low = [v for v in G.vertices if G.degree(v) == 2]
    assume(low)
    assert is_theta_free(bicontract(G, low[0])).verdict == is_theta_free(G).verdict


def _deficiency_from_tutte_sets(G):
    return max(odd_components_count(G, S) - len(S) for r in range(G.n + 1) for S in combinations(G.vertices, r))


@given(small_graphs())
def test_berge_formula(G):
    assert G.n - 2 * len(maximum_matching(G)) == _deficiency_from_tutte_sets(G)


@given(small_graphs())
def test_tutte_set_blocks_perfect_matchings(G):
    S = tutte_set(G)
    if perfect_matching(G) is not None:
        assert S is None
    else:
        assert odd_components_count(G, S) > len(S)


@given(matching_covered_graphs(), st.data())
def test_bisubdivision_stays_matching_covered(G, data):
    plan = data.draw(st.dictionaries(st.sampled_from([e.id for e in G.edges]), st.sampled_from((2, 4)), max_size=3))
    H = bisubdivide(G, plan)
    assert H.n == G.n + sum(plan.values())
    assert is_matching_covered(H)


@given(matching_covered_graphs(simple=False))
def test_underlying_simple_is_idempotent(G):
    H = underlying_simple(G)
    assert H.is_simple()
    assert H.vertices == G.vertices
    assert underlying_simple(H) == H


@given(matching_covered_graphs(orders=(4, 6, 8, 10), simple=False), st.data())
def test_contraction_order_and_size(G, data):
    X = data.draw(st.sets(st.sampled_from(G.vertices), min_size=1, max_size=G.n - 1))
    H = contract_shore(G, X).graph
    assert H.n == len(X) + 1
    assert H.m == G.m - G.edges_inside(G.vertex_set - X)


@given(matching_covered_graphs(orders=(6, 8, 10)))
def test_witnesses_cross_tight_cuts_in_order(G):
    found = elp_cut(G)
    assume(found is not None)
    witnesses = [W for W in (is_theta_free(G).witness, oracle_theta(G)) if W is not None]
    for W in witnesses:
        report = check_crossing_properties(G, W, found.shore)
        assert report, report.violations


@given(matching_covered_graphs(), st.data())
def test_theta_survives_edge_addition(G, data):
    W = oracle_theta(G)
    assume(W is not None)
    u, v = data.draw(st.sampled_from(list(combinations(G.vertices, 2))))
    H, _ = G.with_edge(u, v)
    assert verify_theta_witness(H, W)
    assert oracle_theta(H) is not None


@given(matching_covered_graphs(simple=False), st.data())
def test_two_perfect_matchings_differ_in_alternating_even_cycles(G, data):
    M1 = perfect_matching(G)
    M2 = pm_with_forced_and_forbidden(G, force=[data.draw(st.sampled_from([e.id for e in G.edges]))])
    assert M2 is not None
    diff = M1 ^ M2
    assume(diff)
    H = Multigraph(tuple({v for eid in diff for v in G.edge(eid).ends}), tuple(G.edge(eid) for eid in diff))
    for part in H.components():
        C = H.induced(part)
        assert is_even_cycle(C)
        assert all(len(M1.intersection(C.incident(v))) == 1 for v in part)


@given(matching_covered_graphs(simple=False))
def test_k4_search_reduces_to_underlying_simple(G):
    found = oracle_k4(underlying_simple(G))
    assert (oracle_k4(G) is None) == (found is None)
    if found is not None:
        assert verify_k4_witness(G, found)


@pytest.mark.slow
def test_berge_formula_on_atlas():
    for g in nx.graph_atlas_g()[1:]:
        G = Multigraph.from_pairs(g.number_of_nodes(), list(g.edges()))
        assert G.n - 2 * len(maximum_matching(G)) == _deficiency_from_tutte_sets(G)
        S = tutte_set(G)
        assert S is None or odd_components_count(G, S) > len(S)


@pytest.mark.slow
def test_brick_count_under_five_random_policies():
    rng = random.Random(8)
    for i in range(100):
        cfg = GeneratorConfig(n=rng.choice((6, 8, 10, 12)), extra_edges=rng.randrange(4))
        G = random_matching_covered(cfg, rng)
        reference = tight_cut_decomposition(G)
        for seed in range(5):
            other = tight_cut_decomposition(G, DecompositionPolicy(strategy="random", seed=seed))
            assert reference.b == other.b, i
            assert same_leaves(reference, other), i


@pytest.mark.slow
def test_minimum_degree_four_corpus():
    rng = random.Random(12)
    for i in range(100):
        G = random_matching_covered(GeneratorConfig(n=rng.choice((8, 10)), min_degree=4), rng)
        assert G.min_degree >= 4
        assert is_theta_free(G).verdict == BASED, i


@pytest.mark.slow
def test_elp_cut_on_exhaustive_corpus():
    for G in exhaustive_matching_covered(8):
        if is_brick(G) or is_brace(G):
            continue
        found = elp_cut(G)
        assert found is not None
        assert cut(G, found.shore).is_nontrivial
        assert is_tight_cut(G, found.shore)
