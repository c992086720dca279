"""Random and exhaustive sources of matching covered graphs.

Random graphs grow from K2 by ear additions: a single ear keeps the graph
matching covered exactly when its ends are admissible together, and a
double ear is tried as a pair. Exhaustive enumeration reads small orders
from the networkx graph atlas and extends order seven by one vertex.
"""

import logging
import random
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Optional, Tuple

import networkx as nx

import config
from core import Edge, Multigraph, ThetaKitError, fingerprint, is_isomorphic
from matching import is_matchable, is_matching_covered

logger = logging.getLogger(__name__)

ATLAS_MAX_ORDER = 7


class GenerationError(ThetaKitError):
    def __init__(self, message: str):
        super().__init__(message, error_type="GenerationError")


@dataclass
class GeneratorConfig:
    n: int = 10
    extra_edges: int = 0
    min_degree: Optional[int] = None
    simple: bool = True
    double_ear_probability: float = 0.3
    max_ear_length: int = 5
    max_attempts: int = config.GENERATOR_MAX_ATTEMPTS


def _add_path(G: Multigraph, a: int, b: int, internal: int) -> Multigraph:
    chain = [a] + list(range(G.next_vertex_id, G.next_vertex_id + internal)) + [b]
    edges = tuple(Edge(G.next_edge_id + i, x, y) for i, (x, y) in enumerate(zip(chain, chain[1:])))
    return Multigraph(G.vertices + tuple(chain[1:-1]), G.edges + edges)


class EarGrower:
    def __init__(self, cfg: GeneratorConfig, rng: random.Random):
        self.cfg = cfg
        self.rng = rng

    def _ear(self, G: Multigraph, budget: int, avoid: Tuple[int, ...] = ()) -> Optional[Multigraph]:
        choices = [v for v in G.vertices if v not in avoid]
        if len(choices) < 2:
            return None
        a, b = self.rng.sample(choices, 2)
        lengths = [k for k in range(0, min(budget, self.cfg.max_ear_length - 1) + 1, 2)]
        internal = self.rng.choice(lengths)
        if internal == 0 and self.cfg.simple and G.edges_between(a, b):
            return None
        return _add_path(G, a, b, internal)

    def step(self, G: Multigraph) -> Optional[Multigraph]:
        budget = self.cfg.n - G.n
        if budget >= 2 and G.n >= 4 and self.rng.random() < self.cfg.double_ear_probability:
            first = self._ear(G, budget - 2)
            if first is None:
                return None
            ends = tuple(w for w in G.vertices if first.degree(w) != G.degree(w))
            return self._ear(first, budget - (first.n - G.n), avoid=ends)
        return self._ear(G, budget)

    def grow(self) -> Optional[Multigraph]:
        G = Multigraph.from_pairs(2, [(0, 1)])
        stalls = 0
        while G.n < self.cfg.n:
            candidate = self.step(G)
            if candidate is not None and candidate.n > G.n and is_matching_covered(candidate):
                G = candidate
                continue
            stalls += 1
            if stalls > self.cfg.max_attempts:
                return None
        return self._densify(G)

    def _admissible_partners(self, G: Multigraph, v: int) -> List[int]:
        return [
            w
            for w in G.vertices
            if w != v and not (self.cfg.simple and G.edges_between(v, w)) and is_matchable(G, (v, w))
        ]

    def _densify(self, G: Multigraph) -> Optional[Multigraph]:
        added = 0
        tries = 0
        while added < self.cfg.extra_edges and tries < self.cfg.max_attempts:
            tries += 1
            a, b = self.rng.sample(list(G.vertices), 2)
            if self.cfg.simple and G.edges_between(a, b):
                continue
            if is_matchable(G, (a, b)):
                G, _ = G.with_edge(a, b)
                added += 1
        if self.cfg.min_degree:
            while G.min_degree < self.cfg.min_degree:
                low = [v for v in G.vertices if G.degree(v) == G.min_degree]
                v = self.rng.choice(low)
                partners = self._admissible_partners(G, v)
                if not partners:
                    return None
                G, _ = G.with_edge(v, self.rng.choice(partners))
        return G


def random_matching_covered(cfg: GeneratorConfig, rng: random.Random) -> Multigraph:
    """Matching covered graph on cfg.n vertices, reproducible from the state of rng."""
    if cfg.n < 2 or cfg.n % 2:
        raise GenerationError(f"Order must be even and at least 2, got {cfg.n}")
    if cfg.min_degree is not None and cfg.min_degree >= cfg.n and cfg.simple:
        raise GenerationError(f"Minimum degree {cfg.min_degree} is impossible on {cfg.n} vertices")
    grower = EarGrower(cfg, rng)
    for attempt in range(1, cfg.max_attempts + 1):
        G = grower.grow()
        if G is not None:
            logger.debug(f"Random graph n={G.n}, m={G.m} after {attempt} attempt(s)")
            return G
    raise GenerationError(f"No matching covered graph found in {cfg.max_attempts} attempts")


def _from_networkx(g: nx.Graph) -> Multigraph:
    order = {v: i for i, v in enumerate(sorted(g.nodes))}
    return Multigraph.from_pairs(len(order), sorted(tuple(sorted((order[u], order[v]))) for u, v in g.edges))


def _connected_atlas(n: int) -> List[nx.Graph]:
    return [g for g in nx.graph_atlas_g() if g.number_of_nodes() == n and nx.is_connected(g)]


def _one_vertex_extensions(base: List[nx.Graph]) -> List[nx.Graph]:
    extended = []
    for g in base:
        n = g.number_of_nodes()
        for size in range(2, n + 1):
            for neighbours in combinations(range(n), size):
                h = g.copy()
                h.add_edges_from((n, w) for w in neighbours)
                extended.append(h)
    return extended


def exhaustive_matching_covered(max_n: int) -> List[Multigraph]:
    """All simple matching covered graphs of even order up to max_n, one per isomorphism class."""
    if max_n > ATLAS_MAX_ORDER + 1:
        raise GenerationError(f"Exhaustive enumeration supports n <= {ATLAS_MAX_ORDER + 1}, got {max_n}")
    found: List[Multigraph] = []
    for n in range(2, max_n + 1, 2):
        if n <= ATLAS_MAX_ORDER:
            candidates = _connected_atlas(n)
        else:
            candidates = _one_vertex_extensions(_connected_atlas(n - 1))
        buckets: Dict[str, List[Multigraph]] = {}
        kept = 0
        for g in candidates:
            if n > 2 and min(d for _, d in g.degree) < 2:
                continue
            G = _from_networkx(g)
            key = fingerprint(G)
            if any(is_isomorphic(G, H) for H in buckets.get(key, [])):
                continue
            buckets.setdefault(key, []).append(G)
            if is_matching_covered(G):
                found.append(G)
                kept += 1
        logger.info(f"Order {n}: {kept} matching covered graphs from {len(candidates)} candidates")
    return found
