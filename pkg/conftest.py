import os
import random

import hypothesis
import pytest
from hypothesis import HealthCheck

from core import Multigraph, named_graph
from generators import GeneratorConfig, random_matching_covered

hypothesis.settings.register_profile(
    "default", max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
hypothesis.settings.register_profile(
    "thorough", max_examples=300, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
hypothesis.settings.register_profile("fast", max_examples=5, deadline=None)
hypothesis.settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def t6() -> Multigraph:
    return named_graph("T6")


@pytest.fixture
def petersen() -> Multigraph:
    return named_graph("petersen")


@pytest.fixture
def random_corpus():
    rng = random.Random(7)
    cfg = GeneratorConfig(n=8, extra_edges=2)
    return [random_matching_covered(cfg, rng) for _ in range(12)]
