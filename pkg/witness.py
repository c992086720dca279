"""Conformal bisubdivisions of θ.

A witness is three internally disjoint odd paths between two branch
vertices together with a perfect matching of everything the paths miss.
Constructions here follow the proof structure of the θ characterization:
claws at a vertex of a barrier, conformal cycles through adjacent edges,
conformal odd paths across 2-separations, and lifts from a tight cut
contraction back to the whole graph.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from core import Contraction, Multigraph, ThetaKitError, contract_shore
from matching import perfect_matching, pm_with_forced_and_forbidden
from structure import MarkedComponent, TwoSeparation, as_separation, is_barrier, marked_component

logger = logging.getLogger(__name__)


class WitnessError(ThetaKitError):
    def __init__(self, message: str):
        super().__init__(message, error_type="WitnessError")


@dataclass(frozen=True)
class ThetaWitness:
    x: int
    y: int
    paths: Tuple[Tuple[int, ...], ...]
    complement_matching: FrozenSet[int] = frozenset()

    @property
    def edge_ids(self) -> FrozenSet[int]:
        return frozenset(eid for path in self.paths for eid in path)

    def edge_parity(self) -> Dict[int, str]:
        # first edge out of x is odd
        return {eid: ("odd" if i % 2 == 0 else "even") for path in self.paths for i, eid in enumerate(path)}

    def to_dict(self) -> Dict:
        return {
            "x": self.x,
            "y": self.y,
            "paths": [list(p) for p in self.paths],
            "complement_matching": sorted(self.complement_matching),
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "ThetaWitness":
        try:
            return cls(
                int(data["x"]),
                int(data["y"]),
                tuple(tuple(int(eid) for eid in p) for p in data["paths"]),
                frozenset(int(eid) for eid in data.get("complement_matching", [])),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise WitnessError(f"Malformed witness: {e}")


@dataclass
class WitnessCheck:
    valid: bool
    reasons: List[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.valid


def path_vertices(G: Multigraph, start: int, path: Sequence[int]) -> List[int]:
    walk = [start]
    for eid in path:
        walk.append(G.edge(eid).other(walk[-1]))
    return walk


def check_theta_witness(G: Multigraph, W: ThetaWitness) -> WitnessCheck:
    reasons: List[str] = []
    if W.x == W.y:
        reasons.append("branch vertices coincide")
    for b in (W.x, W.y):
        if b not in G.vertex_set:
            reasons.append(f"branch vertex {b} is not in the graph")
    if len(W.paths) != 3:
        reasons.append(f"expected 3 paths, got {len(W.paths)}")
    if reasons:
        return WitnessCheck(False, reasons)

    covered = {W.x, W.y}
    used = set()
    for index, path in enumerate(W.paths):
        if len(path) % 2 == 0:
            reasons.append(f"path {index} has even length {len(path)}")
            continue
        current = W.x
        for position, eid in enumerate(path):
            if not G.has_edge_id(eid):
                reasons.append(f"path {index} uses unknown edge {eid}")
                break
            if eid in used:
                reasons.append(f"edge {eid} is used twice")
                break
            used.add(eid)
            e = G.edge(eid)
            if current not in e.ends:
                reasons.append(f"path {index} breaks at edge {eid}")
                break
            current = e.other(current)
            if position == len(path) - 1:
                if current != W.y:
                    reasons.append(f"path {index} ends at {current}, not at {W.y}")
            elif current in covered:
                reasons.append(f"path {index} revisits vertex {current}")
                break
            else:
                covered.add(current)

    matched = set()
    for eid in sorted(W.complement_matching):
        if not G.has_edge_id(eid):
            reasons.append(f"complement uses unknown edge {eid}")
            continue
        e = G.edge(eid)
        if eid in used or e.ends & covered:
            reasons.append(f"complement edge {eid} touches the bisubdivision")
        if e.ends & matched:
            reasons.append(f"complement edges overlap at edge {eid}")
        matched |= e.ends
    missing = G.vertex_set - covered - matched
    if missing:
        reasons.append(f"vertices {sorted(missing)} are not covered by the complement matching")
    return WitnessCheck(not reasons, reasons)


def verify_theta_witness(G: Multigraph, W: ThetaWitness) -> bool:
    return check_theta_witness(G, W).valid


def _require_valid(G: Multigraph, W: ThetaWitness, where: str) -> None:
    result = check_theta_witness(G, W)
    if not result:
        raise WitnessError(f"Invalid witness in {where}: {'; '.join(result.reasons)}")


@dataclass(frozen=True)
class ConformalCycle:
    pivot: int
    vertices: Tuple[int, ...]
    edges: Tuple[int, ...]
    complement: FrozenSet[int]


def conformal_cycle_through_adjacent(G: Multigraph, e1: int, e2: int, pivot: Optional[int] = None) -> ConformalCycle:
    """Cycle of M1 Δ M2 through the shared end of e1 and e2.

    ``edges`` starts with e1 leaving the pivot and ends with e2 returning to
    it. The complement agrees with M1 off the cycle.
    """
    first, second = G.edge(e1), G.edge(e2)
    shared = first.ends & second.ends
    if e1 == e2 or not shared:
        raise WitnessError(f"Edges {e1} and {e2} are not adjacent")
    pivot = min(shared) if pivot is None else pivot
    if pivot not in shared:
        raise WitnessError(f"Vertex {pivot} is not a common end of edges {e1} and {e2}")
    M1 = pm_with_forced_and_forbidden(G, (e1,))
    M2 = pm_with_forced_and_forbidden(G, (e2,))
    if M1 is None or M2 is None:
        raise WitnessError(f"Edges {e1} and {e2} do not both lie in perfect matchings")
    difference = M1 ^ M2
    vertices, edges = [pivot], [e1]
    current, previous = first.other(pivot), e1
    while current != pivot:
        vertices.append(current)
        previous = next(eid for eid in G.incident(current) if eid in difference and eid != previous)
        edges.append(previous)
        current = G.edge(previous).other(current)
    on_cycle = set(vertices)
    complement = frozenset(eid for eid in M1 if not (G.edge(eid).ends & on_cycle))
    return ConformalCycle(pivot, tuple(vertices), tuple(edges), complement)


def theta_through_claw_bipartite(G: Multigraph, v: int, e1: int, e2: int, e3: int) -> ThetaWitness:
    if not G.is_bipartite():
        raise WitnessError("Claw construction needs a bipartite graph")
    if len({e1, e2, e3}) != 3 or any(v not in G.edge(e).ends for e in (e1, e2, e3)):
        raise WitnessError(f"Edges {e1}, {e2}, {e3} are not three distinct edges at vertex {v}")
    cycle = conformal_cycle_through_adjacent(G, e1, e2, pivot=v)
    M = frozenset(cycle.edges[0::2]) | cycle.complement
    M3 = pm_with_forced_and_forbidden(G, (e3,))
    if M3 is None:
        raise WitnessError(f"Edge {e3} lies in no perfect matching")

    # follow the M/M3 alternating cycle from v along e3 until it meets the cycle again
    difference = M ^ M3
    on_cycle = set(cycle.vertices)
    ear, ear_vertices = [e3], []
    current, previous = G.edge(e3).other(v), e3
    while current not in on_cycle:
        ear_vertices.append(current)
        previous = next(eid for eid in G.incident(current) if eid in difference and eid != previous)
        ear.append(previous)
        current = G.edge(previous).other(current)

    j = cycle.vertices.index(current)
    forward = cycle.edges[:j]
    backward = tuple(reversed(cycle.edges[j:]))
    touched = on_cycle | set(ear_vertices)
    complement = frozenset(eid for eid in M if not (G.edge(eid).ends & touched))
    return ThetaWitness(v, current, (forward, backward, tuple(ear)), complement)


def _oriented_from(W: ThetaWitness, vertex: int) -> Tuple[Tuple[Tuple[int, ...], ...], int]:
    if W.x == vertex:
        return W.paths, W.y
    if W.y == vertex:
        return tuple(tuple(reversed(p)) for p in W.paths), W.x
    raise WitnessError(f"Vertex {vertex} is not a branch vertex of the witness")


ClawBuilder = Callable[[Multigraph, int, Tuple[int, int, int]], ThetaWitness]


def _expand_contraction(G: Multigraph, shrunk: Contraction, W: ThetaWitness, claw: Optional[ClawBuilder]) -> ThetaWitness:
    """Turn a witness of G/X̄ into one of G, using the other contraction G/X."""
    H1 = shrunk.graph
    hub = shrunk.vertex
    kept = H1.vertex_set - {hub}
    other = contract_shore(G, G.vertex_set - kept)
    crossing = [eid for path in W.paths for eid in path if hub in H1.edge(eid).ends]

    if not crossing:
        f = next(eid for eid in W.complement_matching if hub in H1.edge(eid).ends)
        M2 = pm_with_forced_and_forbidden(other.graph, (f,))
        if M2 is None:
            raise WitnessError(f"Cut edge {f} does not extend to a perfect matching across the cut")
        return ThetaWitness(W.x, W.y, W.paths, W.complement_matching | M2)

    if len(crossing) == 2:
        paths, extra = [], frozenset()
        for path in W.paths:
            spliced = path
            for i in range(len(path) - 1):
                if path[i] in crossing and path[i + 1] in crossing:
                    cycle = conformal_cycle_through_adjacent(other.graph, path[i], path[i + 1], pivot=other.vertex)
                    spliced = path[: i + 1] + cycle.edges[1:-1] + path[i + 1:]
                    extra = cycle.complement
                    break
            paths.append(tuple(spliced))
        return ThetaWitness(W.x, W.y, tuple(paths), W.complement_matching | extra)

    if len(crossing) == 3:
        if claw is None:
            raise WitnessError("Contraction vertex is a branch vertex where the construction forbids it")
        near_paths, far = _oriented_from(W, hub)
        W2 = claw(other.graph, other.vertex, tuple(p[0] for p in near_paths))
        far_paths, far2 = _oriented_from(W2, other.vertex)
        by_first = {p[0]: p for p in far_paths}
        joined = tuple(tuple(reversed(p[1:])) + (p[0],) + by_first[p[0]][1:] for p in near_paths)
        return ThetaWitness(far, far2, joined, W.complement_matching | W2.complement_matching)

    raise WitnessError(f"Witness meets the contraction vertex in {len(crossing)} edges")


def theta_through_claw_barrier(G: Multigraph, B: Iterable[int], z: int, e1: int, e2: int, e3: int) -> ThetaWitness:
    barrier_set = frozenset(B)
    if not is_barrier(G, barrier_set):
        raise WitnessError(f"{sorted(barrier_set)} is not a barrier")
    parts = G.components(barrier_set)
    if frozenset((z,)) not in parts:
        raise WitnessError(f"Vertex {z} is not isolated in G - B")
    nontrivial = [p for p in parts if len(p) > 1]
    if not nontrivial:
        return theta_through_claw_bipartite(G, z, e1, e2, e3)
    shrunk = contract_shore(G, G.vertex_set - nontrivial[0])
    logger.debug(f"Claw at {z}: shrinking component {sorted(nontrivial[0])}")
    inner = theta_through_claw_barrier(shrunk.graph, barrier_set, z, e1, e2, e3)
    return _expand_contraction(G, shrunk, inner, None)


def lift_witness_barrier(G: Multigraph, B: Iterable[int], L: Iterable[int], W: ThetaWitness) -> ThetaWitness:
    barrier_set = frozenset(B)
    shrunk = contract_shore(G, frozenset(L))
    _require_valid(shrunk.graph, W, "barrier contraction")

    def claw(graph: Multigraph, vertex: int, edges: Tuple[int, int, int]) -> ThetaWitness:
        return theta_through_claw_barrier(graph, barrier_set, vertex, *edges)

    return _expand_contraction(G, shrunk, W, claw)


@dataclass(frozen=True)
class OddPath:
    u: int
    v: int
    edges: Tuple[int, ...]
    complement: FrozenSet[int]


def conformal_odd_path(G: Multigraph, S: Union[TwoSeparation, Sequence[int]], L: Iterable[int]) -> OddPath:
    marked = marked_component(G, S, L)
    u, v = marked.separation
    H = marked.graph
    f = min(eid for eid in H.incident(u) if H.edge(eid).other(u) in marked.component)
    cycle = conformal_cycle_through_adjacent(H, marked.marker_edge, f, pivot=u)
    return OddPath(u, v, tuple(reversed(cycle.edges[1:])), cycle.complement)


def _component_matching(G: Multigraph, part: FrozenSet[int]) -> FrozenSet[int]:
    pm = perfect_matching(G.induced(part))
    if pm is None:
        raise WitnessError(f"Component {sorted(part)} has no perfect matching")
    return pm


def lift_witness_2sep(G: Multigraph, S: Union[TwoSeparation, Sequence[int]], K: MarkedComponent, W: ThetaWitness) -> ThetaWitness:
    sep = as_separation(G, S)
    _require_valid(K.graph, W, "marked component")
    marker = K.marker_edge
    others = [p for p in sep.components if p != K.component]
    paths = W.paths
    complement = set(W.complement_matching) - {marker}

    if marker in W.edge_ids or marker in W.complement_matching:
        bridge = conformal_odd_path(G, sep, others[0])
        others = others[1:]
        complement |= bridge.complement
        if marker in W.edge_ids:
            rebuilt = []
            for path in paths:
                if marker not in path:
                    rebuilt.append(path)
                    continue
                i = path.index(marker)
                before = path_vertices(K.graph, W.x, path)[i]
                detour = bridge.edges if before == bridge.u else tuple(reversed(bridge.edges))
                rebuilt.append(path[:i] + detour + path[i + 1:])
            paths = tuple(rebuilt)
        else:
            complement |= set(bridge.edges[0::2])

    for part in others:
        complement |= _component_matching(G, part)
    return ThetaWitness(W.x, W.y, paths, frozenset(complement))


def theta_through_parallel_pair(G: Multigraph) -> ThetaWitness:
    """θ through two parallel edges, for non-simple matching covered graphs other than C2."""
    seen: Dict[FrozenSet[int], int] = {}
    pair = None
    for e in G.edges:
        if e.ends in seen:
            pair = (seen[e.ends], e.id)
            break
        seen[e.ends] = e.id
    if pair is None:
        raise WitnessError("Graph has no parallel edges")
    e1, e2 = pair
    a, b = sorted(G.edge(e1).ends)
    if G.n == 2:
        if G.m < 3:
            raise WitnessError("C2 contains no θ")
        return ThetaWitness(a, b, tuple((eid,) for eid in (e.id for e in G.edges[:3])))
    for hub in (a, b):
        away = [eid for eid in G.incident(hub) if G.edge(eid).other(hub) not in (a, b)]
        if away:
            cycle = conformal_cycle_through_adjacent(G, e1, min(away), pivot=hub)
            far = G.edge(e1).other(hub)
            return ThetaWitness(hub, far, ((e1,), (e2,), tuple(reversed(cycle.edges[1:]))), cycle.complement)
    raise WitnessError("Parallel pair has no adjacent edge leaving it")


def theta_through_three_components(G: Multigraph, S: Union[TwoSeparation, Sequence[int]]) -> ThetaWitness:
    sep = as_separation(G, S)
    if len(sep.components) < 3:
        raise WitnessError(f"2-separation {{{sep.u}, {sep.v}}} has only {len(sep.components)} components")
    bridges = [conformal_odd_path(G, sep, part) for part in sep.components[:3]]
    complement = frozenset().union(*(p.complement for p in bridges))
    for part in sep.components[3:]:
        complement |= _component_matching(G, part)
    return ThetaWitness(sep.u, sep.v, tuple(p.edges for p in bridges), complement)


@dataclass(frozen=True)
class WitnessSearch:
    witness: Optional[ThetaWitness]
    certificate_omitted: bool = False


def find_theta_witness_in_nondecomposable(G: Multigraph, search_cap: int) -> WitnessSearch:
    if G.is_bipartite():
        hub = next((v for v in G.vertices if G.degree(v) >= 3), None)
        if hub is None:
            return WitnessSearch(None)
        return WitnessSearch(theta_through_claw_bipartite(G, hub, *G.incident(hub)[:3]))
    if not G.is_simple():
        return WitnessSearch(theta_through_parallel_pair(G))
    if G.n > search_cap:
        logger.info(f"Brick on {G.n} vertices exceeds search cap {search_cap}; witness omitted")
        return WitnessSearch(None, certificate_omitted=True)
    from oracle import oracle_theta  # the oracle builds on this module's witness type

    return WitnessSearch(oracle_theta(G, vertex_cap=search_cap))
