"""Exhaustive searches for conformal bisubdivisions of θ and K4.

Exponential by construction and guarded by a vertex cap. Two facts keep the
search small. Every single path of a conformal bisubdivision is itself
conformal. Every pair of θ paths is a conformal cycle.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import Dict, FrozenSet, Iterator, List, Optional, Set, Tuple

import config
from core import Multigraph, ThetaKitError, cut
from matching import MatchabilityCache, perfect_matching
from witness import ThetaWitness

logger = logging.getLogger(__name__)


class OracleCapExceeded(ThetaKitError):
    def __init__(self, message: str):
        super().__init__(message, error_type="OracleCapExceeded")


class PatternTarget(Enum):
    THETA = "theta"
    K4 = "K4"

    @property
    def branch_count(self) -> int:
        return 2 if self is PatternTarget.THETA else 4

    @property
    def path_count(self) -> int:
        return 3 if self is PatternTarget.THETA else 6


@dataclass(frozen=True)
class K4Witness:
    branch: Tuple[int, int, int, int]
    paths: Tuple[Tuple[Tuple[int, int], Tuple[int, ...]], ...]
    complement_matching: FrozenSet[int] = frozenset()

    def to_dict(self) -> Dict:
        return {
            "branch": list(self.branch),
            "paths": [{"ends": list(ends), "edges": list(path)} for ends, path in self.paths],
            "complement_matching": sorted(self.complement_matching),
        }


class _PathSearch:
    def __init__(self, G: Multigraph):
        self.graph = G
        self.cache = MatchabilityCache(G)
        self.adjacency: Dict[int, List[Tuple[int, int]]] = {
            v: [(eid, G.edge(eid).other(v)) for eid in G.incident(v)] for v in G.vertices
        }

    def odd_paths(self, x: int, y: int, blocked: FrozenSet[int], min_first: int = -1) -> Iterator[Tuple[Tuple[int, ...], FrozenSet[int]]]:
        """Odd x-y paths avoiding `blocked`, with first edge id above `min_first`.

        Yields (edge ids, internal vertices); only conformal paths survive.
        """
        inner: List[int] = []
        inner_set: Set[int] = set()
        edges: List[int] = []

        def extend(v: int) -> Iterator[Tuple[Tuple[int, ...], FrozenSet[int]]]:
            for eid, w in self.adjacency[v]:
                if not edges and eid <= min_first:
                    continue
                if w == y:
                    if len(edges) % 2 == 0:
                        found = frozenset(inner_set)
                        if self.cache.matchable_without(found | {x, y}):
                            yield tuple(edges) + (eid,), found
                    continue
                if w == x or w in blocked or w in inner_set:
                    continue
                edges.append(eid)
                inner.append(w)
                inner_set.add(w)
                yield from extend(w)
                inner_set.discard(inner.pop())
                edges.pop()

        yield from extend(x)


def _check_cap(G: Multigraph, vertex_cap: Optional[int]) -> None:
    cap = config.ORACLE_VERTEX_CAP if vertex_cap is None else vertex_cap
    if G.n > cap:
        raise OracleCapExceeded(f"Graph has {G.n} vertices, oracle cap is {cap}")


def oracle_theta(G: Multigraph, vertex_cap: Optional[int] = None) -> Optional[ThetaWitness]:
    _check_cap(G, vertex_cap)
    search = _PathSearch(G)
    cache = search.cache
    hubs = [v for v in G.vertices if G.degree(v) >= 3]
    for x, y in combinations(hubs, 2):
        ends = frozenset((x, y))
        for p1, in1 in search.odd_paths(x, y, frozenset()):
            for p2, in2 in search.odd_paths(x, y, in1, p1[0]):
                if not cache.matchable_without(ends | in1 | in2):
                    continue
                for p3, in3 in search.odd_paths(x, y, in1 | in2, p2[0]):
                    covered = ends | in1 | in2 | in3
                    if cache.matchable_without(covered):
                        logger.debug(f"Theta oracle: branch vertices {x}, {y}")
                        return ThetaWitness(x, y, (p1, p2, p3), perfect_matching(G, without=covered))
    return None


def oracle_k4(G: Multigraph, vertex_cap: Optional[int] = None) -> Optional[K4Witness]:
    _check_cap(G, vertex_cap)
    search = _PathSearch(G)
    hubs = [v for v in G.vertices if G.degree(v) >= 3]

    for quad in combinations(hubs, 4):
        pairs = list(combinations(quad, 2))
        chosen: List[Tuple[int, ...]] = []

        def extend(index: int, used: FrozenSet[int]) -> Optional[K4Witness]:
            if index == len(pairs):
                covered = frozenset(quad) | used
                if not search.cache.matchable_without(covered):
                    return None
                return K4Witness(quad, tuple(zip(pairs, chosen)), perfect_matching(G, without=covered))
            a, b = pairs[index]
            others = frozenset(quad) - {a, b}
            for path, inner in search.odd_paths(a, b, used | others):
                chosen.append(path)
                found = extend(index + 1, used | inner)
                if found is not None:
                    return found
                chosen.pop()
            return None

        witness = extend(0, frozenset())
        if witness is not None:
            logger.debug(f"K4 oracle: branch vertices {quad}")
            return witness
    return None


def verify_k4_witness(G: Multigraph, W: K4Witness) -> bool:
    if len(set(W.branch)) != 4 or not set(W.branch) <= G.vertex_set:
        return False
    if sorted(tuple(sorted(ends)) for ends, _ in W.paths) != sorted(combinations(sorted(W.branch), 2)):
        return False
    covered, used = set(W.branch), set()
    for (a, b), path in W.paths:
        if len(path) % 2 == 0:
            return False
        current = a
        for position, eid in enumerate(path):
            if not G.has_edge_id(eid) or eid in used or current not in G.edge(eid).ends:
                return False
            used.add(eid)
            current = G.edge(eid).other(current)
            if position < len(path) - 1:
                if current in covered:
                    return False
                covered.add(current)
        if current != b:
            return False
    matched = set()
    for eid in W.complement_matching:
        if not G.has_edge_id(eid):
            return False
        ends = G.edge(eid).ends
        if ends & covered or ends & matched:
            return False
        matched |= ends
    return matched | covered == set(G.vertex_set)


@dataclass
class CrossingReport:
    ok: bool
    violations: List[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def check_crossing_properties(G: Multigraph, W: ThetaWitness, X: FrozenSet[int]) -> CrossingReport:
    """Parity discipline of witness paths crossing a tight cut with shore X."""
    cut_ids = set(cut(G, X).edge_ids)
    crossings: Dict[int, List[Tuple[int, str]]] = {}
    for index, path in enumerate(W.paths):
        hits = [(eid, "odd" if j % 2 == 0 else "even") for j, eid in enumerate(path) if eid in cut_ids]
        if hits:
            crossings[index] = hits

    violations = []
    for index, hits in crossings.items():
        if len(hits) > 2:
            violations.append(f"path {index} crosses {len(hits)} times")
        elif len(hits) == 2 and hits[0][1] == hits[1][1]:
            violations.append(f"path {index} crosses twice in edges of {hits[0][1]} parity")
    if len(crossings) > 1:
        if any(len(hits) >= 2 for hits in crossings.values()):
            violations.append("a path crosses twice while another path also crosses")
        for index, hits in crossings.items():
            if any(parity != "odd" for _, parity in hits):
                violations.append(f"path {index} crosses in an even edge while other paths cross too")
    return CrossingReport(not violations, violations)
