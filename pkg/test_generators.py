import random

import pytest

from core import is_isomorphic, named_graph, write_graph
from generators import (
    GenerationError,
    GeneratorConfig,
    exhaustive_matching_covered,
    random_matching_covered,
)
from matching import is_matching_covered


def test_random_graph_is_matching_covered():
    G = random_matching_covered(GeneratorConfig(n=10), random.Random(3))
    assert G.n == 10
    assert G.is_simple()
    assert is_matching_covered(G)


def test_random_graph_is_reproducible():
    cfg = GeneratorConfig(n=12, extra_edges=3)
    first = random_matching_covered(cfg, random.Random(11))
    second = random_matching_covered(cfg, random.Random(11))
    assert write_graph(first) == write_graph(second)


def test_random_corpus_fixture(random_corpus):
    assert len(random_corpus) == 12
    assert all(G.n == 8 and is_matching_covered(G) for G in random_corpus)


def test_min_degree_is_reached():
    G = random_matching_covered(GeneratorConfig(n=8, min_degree=3), random.Random(5))
    assert G.min_degree >= 3
    assert is_matching_covered(G)


def test_multigraphs_allowed_when_not_simple():
    rng = random.Random(2)
    graphs = [random_matching_covered(GeneratorConfig(n=6, simple=False, extra_edges=4), rng) for _ in range(5)]
    assert all(is_matching_covered(G) for G in graphs)


@pytest.mark.parametrize("cfg", [GeneratorConfig(n=7), GeneratorConfig(n=0), GeneratorConfig(n=4, min_degree=4)])
def test_impossible_configs(cfg):
    with pytest.raises(GenerationError):
        random_matching_covered(cfg, random.Random(0))


def test_attempts_are_bounded():
    with pytest.raises(GenerationError):
        random_matching_covered(GeneratorConfig(n=8, max_attempts=0), random.Random(0))


def test_exhaustive_order_four():
    found = exhaustive_matching_covered(4)
    assert len(found) == 3
    for G, name in zip(found, ("K2", "C4", "K4")):
        assert is_isomorphic(G, named_graph(name))


def test_exhaustive_order_six_contains_known_graphs():
    found = exhaustive_matching_covered(6)
    order_six = [G for G in found if G.n == 6]
    for name in ("C6", "K33", "prism", "T6"):
        assert sum(is_isomorphic(G, named_graph(name)) for G in order_six) == 1
    for i, G in enumerate(order_six):
        assert is_matching_covered(G)
        assert not any(is_isomorphic(G, H) for H in order_six[i + 1:])


def test_exhaustive_rejects_large_orders():
    with pytest.raises(GenerationError):
        exhaustive_matching_covered(10)
