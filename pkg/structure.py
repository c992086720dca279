"""Barriers, 2-separations, tight cuts and the cuts guaranteed by the ELP theorem."""

import logging
from dataclasses import dataclass
from itertools import combinations
from typing import FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import networkx as nx

from core import Contraction, Multigraph, ThetaKitError, contract_shore, cut
from matching import MatchabilityCache, maximum_matching, is_matching_covered, odd_components_count, require_matching_covered

logger = logging.getLogger(__name__)


class StructureError(ThetaKitError):
    def __init__(self, message: str):
        super().__init__(message, error_type="StructureError")


@dataclass(frozen=True)
class Barrier:
    vertices: FrozenSet[int]
    components: Tuple[FrozenSet[int], ...]

    @property
    def is_trivial(self) -> bool:
        return len(self.vertices) <= 1

    @property
    def nontrivial_components(self) -> Tuple[FrozenSet[int], ...]:
        return tuple(c for c in self.components if len(c) > 1)


@dataclass(frozen=True)
class TwoSeparation:
    u: int
    v: int
    components: Tuple[FrozenSet[int], ...]

    @property
    def vertices(self) -> Tuple[int, int]:
        return (self.u, self.v)


@dataclass(frozen=True)
class MarkedComponent:
    graph: Multigraph
    marker_edge: int
    component: FrozenSet[int]
    separation: Tuple[int, int]


@dataclass(frozen=True)
class BarrierContraction:
    component: FrozenSet[int]
    contraction: Contraction

    @property
    def graph(self) -> Multigraph:
        return self.contraction.graph


@dataclass(frozen=True)
class TightCutCheck:
    tight: bool
    reason: str

    def __bool__(self) -> bool:
        return self.tight


@dataclass(frozen=True)
class ELPCut:
    shore: FrozenSet[int]
    kind: str
    barrier: Optional[FrozenSet[int]] = None
    separation: Optional[Tuple[int, int]] = None

    def to_dict(self) -> dict:
        return {
            "shore": sorted(self.shore),
            "kind": self.kind,
            "barrier": sorted(self.barrier) if self.barrier is not None else None,
            "separation": list(self.separation) if self.separation is not None else None,
        }


def is_barrier(G: Multigraph, B: Iterable[int]) -> bool:
    S = frozenset(B)
    if not S <= G.vertex_set:
        return False
    return odd_components_count(G, S) == len(S)


def barrier(G: Multigraph, B: Iterable[int]) -> Barrier:
    S = frozenset(B)
    if not is_barrier(G, S):
        raise StructureError(f"{sorted(S)} is not a barrier")
    return Barrier(S, tuple(G.components(S)))


def in_common_barrier(G: Multigraph, u: int, v: int, cache: Optional[MatchabilityCache] = None) -> bool:
    if u == v:
        raise StructureError("in_common_barrier needs two distinct vertices")
    cache = cache or MatchabilityCache(G)
    return not cache.pair(u, v)


def canonical_partition(G: Multigraph, cache: Optional[MatchabilityCache] = None, check: bool = True) -> List[FrozenSet[int]]:
    """Maximal barriers, as classes of u ~ v iff G - u - v has no perfect matching."""
    if check:
        require_matching_covered(G)
    cache = cache or MatchabilityCache(G)
    classes: List[FrozenSet[int]] = []
    assigned = set()
    for v in G.vertices:
        if v in assigned:
            continue
        members = {v} | {w for w in G.vertices if w > v and w not in assigned and not cache.pair(v, w)}
        assigned |= members
        classes.append(frozenset(members))
    return classes


def is_bicritical(G: Multigraph, cache: Optional[MatchabilityCache] = None) -> bool:
    cache = cache or MatchabilityCache(G)
    return all(cache.pair(u, v) for u, v in combinations(G.vertices, 2))


def is_three_connected(G: Multigraph) -> bool:
    if G.n < 4:
        return False
    return nx.node_connectivity(G.simple_view()) >= 3


def iter_two_separations(G: Multigraph) -> Iterator[TwoSeparation]:
    if G.n < 4:
        return
    for u, v in combinations(G.vertices, 2):
        parts = G.components((u, v))
        if len(parts) >= 2 and all(len(p) % 2 == 0 for p in parts):
            yield TwoSeparation(u, v, tuple(parts))


def two_separations(G: Multigraph) -> List[TwoSeparation]:
    return list(iter_two_separations(G))


def as_separation(G: Multigraph, S: Union[TwoSeparation, Sequence[int]]) -> TwoSeparation:
    u, v = S.vertices if isinstance(S, TwoSeparation) else tuple(S)
    parts = G.components((u, v))
    if len(parts) < 2 or any(len(p) % 2 for p in parts):
        raise StructureError(f"{{{u}, {v}}} is not a 2-separation")
    return TwoSeparation(u, v, tuple(parts))


def marked_component(G: Multigraph, S: Union[TwoSeparation, Sequence[int]], component: Iterable[int]) -> MarkedComponent:
    sep = as_separation(G, S)
    part = frozenset(component)
    if part not in sep.components:
        raise StructureError(f"{sorted(part)} is not a component of G - {{{sep.u}, {sep.v}}}")
    H = G.induced(part | {sep.u, sep.v})
    graph, marker = H.with_edge(sep.u, sep.v, G.next_edge_id)
    return MarkedComponent(graph, marker, part, sep.vertices)


def marked_components(G: Multigraph, S: Union[TwoSeparation, Sequence[int]]) -> List[MarkedComponent]:
    sep = as_separation(G, S)
    marked = [marked_component(G, sep, part) for part in sep.components]
    for mc in marked:
        if not is_matching_covered(mc.graph):
            raise StructureError(f"Marked component on {sorted(mc.component)} is not matching covered")
    return marked


def barrier_contractions(G: Multigraph, B: Iterable[int]) -> List[BarrierContraction]:
    found = barrier(G, B)
    return [BarrierContraction(part, contract_shore(G, part)) for part in found.components]


def check_tight_cut(G: Multigraph, X: Iterable[int], cache: Optional[MatchabilityCache] = None) -> TightCutCheck:
    c = cut(G, X)
    if not c.is_odd:
        return TightCutCheck(False, "even cut")
    if c.is_trivial:
        return TightCutCheck(True, "trivial cut")
    cache = cache or MatchabilityCache(G)
    edges = [G.edge(eid) for eid in c.edge_ids]
    tried = set()
    for e, f in combinations(edges, 2):
        if e.ends & f.ends:
            continue
        removed = e.ends | f.ends
        if removed in tried:
            continue
        tried.add(removed)
        if cache.matchable_without(removed):
            return TightCutCheck(False, f"a perfect matching uses edges {e.id} and {f.id}")
    return TightCutCheck(True, "no perfect matching uses two cut edges")


def is_tight_cut(G: Multigraph, X: Iterable[int], cache: Optional[MatchabilityCache] = None) -> bool:
    return check_tight_cut(G, X, cache).tight


def _hall_violator(G: Multigraph, removed: FrozenSet[int], side: FrozenSet[int]) -> FrozenSet[int]:
    # alternating search from a vertex of `side` missed by a maximum matching of G - removed
    mate = {}
    for eid in maximum_matching(G, without=removed):
        e = G.edge(eid)
        mate[e.u], mate[e.v] = e.v, e.u
    start = min(a for a in side - removed if a not in mate)
    reached, seen = {start}, set()
    frontier = [start]
    while frontier:
        a = frontier.pop()
        for w in G.neighbors(a):
            if w in removed or w in seen:
                continue
            seen.add(w)
            partner = mate[w]
            if partner not in reached:
                reached.add(partner)
                frontier.append(partner)
    return frozenset(reached)


def _bipartite_cuts(G: Multigraph, cache: MatchabilityCache) -> Iterator[ELPCut]:
    first, second = G.bipartition
    tried = set()
    for e, f in combinations(G.edges, 2):
        removed = e.ends | f.ends
        if len(removed) < 4 or removed in tried:
            continue
        tried.add(removed)
        if cache.matchable_without(removed):
            continue
        X = _hall_violator(G, removed, first)
        neighbourhood = frozenset(w for a in X for w in G.neighbors(a))
        yield ELPCut(X | neighbourhood, "barrier", barrier=first - X)


def _barrier_cuts(G: Multigraph, cache: MatchabilityCache) -> Iterator[ELPCut]:
    partition = canonical_partition(G, cache, check=False)
    for B in sorted(partition, key=lambda s: tuple(sorted(s))):
        if len(B) < 2:
            continue
        for part in G.components(B):
            if cut(G, part).is_nontrivial:
                yield ELPCut(part, "barrier", barrier=B)


def _separation_cuts(G: Multigraph, every_side: bool) -> Iterator[ELPCut]:
    for sep in iter_two_separations(G):
        parts = sep.components if every_side else sep.components[:1]
        ends = (sep.u, sep.v) if every_side else (sep.u,)
        for part in parts:
            for end in ends:
                yield ELPCut(part | {end}, "two_separation", separation=sep.vertices)


def iter_elp_cuts(G: Multigraph, cache: Optional[MatchabilityCache] = None, exhaustive: bool = False) -> Iterator[ELPCut]:
    """ELP cuts in preference order: barrier cuts first, then 2-separation cuts.

    Bipartite graphs get their barrier cuts from pairs of disjoint edges
    that do not extend to a perfect matching, since the maximal barriers of a
    bipartite matching covered graph are its colour classes.
    """
    if G.n < 6:
        return
    cache = cache or MatchabilityCache(G)
    if G.is_bipartite():
        yield from _bipartite_cuts(G, cache)
    else:
        yield from _barrier_cuts(G, cache)
    if exhaustive or not G.is_bipartite():
        yield from _separation_cuts(G, every_side=exhaustive)


def elp_cut(G: Multigraph, cache: Optional[MatchabilityCache] = None) -> Optional[ELPCut]:
    return next(iter_elp_cuts(G, cache), None)


def candidate_elp_cuts(G: Multigraph, cache: Optional[MatchabilityCache] = None) -> List[ELPCut]:
    """Every ELP cut exposed by the structure, deduplicated by cut."""
    found, seen = [], set()
    for c in iter_elp_cuts(G, cache, exhaustive=True):
        key = min(tuple(sorted(c.shore)), tuple(sorted(G.vertex_set - c.shore)))
        if key not in seen:
            seen.add(key)
            found.append(c)
    return found


def bicontract(G: Multigraph, v0: int) -> Multigraph:
    if G.degree(v0) != 2:
        raise StructureError(f"Vertex {v0} has degree {G.degree(v0)}, expected 2")
    neighbours = G.neighbors(v0)
    if len(neighbours) != 2:
        raise StructureError(f"Vertex {v0} is joined to a single neighbour by a parallel pair")
    return contract_shore(G, G.vertex_set - {v0, *neighbours}).graph
