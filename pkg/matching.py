import logging
from typing import Dict, FrozenSet, Iterable, List, Optional

import networkx as nx

from core import Multigraph, ThetaKitError

logger = logging.getLogger(__name__)

Matching = FrozenSet[int]


class MatchingError(ThetaKitError):
    def __init__(self, message: str):
        super().__init__(message, error_type="MatchingError")


class NotMatchingCoveredError(ThetaKitError):
    def __init__(self, message: str, edge_id: Optional[int] = None, tutte_set: Optional[FrozenSet[int]] = None):
        super().__init__(message, error_type="NotMatchingCoveredError")
        self.edge_id = edge_id
        self.tutte_set = tutte_set


def _matching_of_view(H: nx.Graph) -> Matching:
    pairs = nx.max_weight_matching(H, maxcardinality=True)
    return frozenset(H.edges[u, v]["eid"] for u, v in pairs)


def maximum_matching(G: Multigraph, without: Iterable[int] = (), forbid: Iterable[int] = ()) -> Matching:
    return _matching_of_view(G.simple_view(without, forbid))


def perfect_matching(G: Multigraph, without: Iterable[int] = (), forbid: Iterable[int] = ()) -> Optional[Matching]:
    H = G.simple_view(without, forbid)
    if H.number_of_nodes() % 2:
        return None
    if any(len(c) % 2 for c in nx.connected_components(H)):
        return None
    matching = _matching_of_view(H)
    return matching if 2 * len(matching) == H.number_of_nodes() else None


def is_matchable(G: Multigraph, without: Iterable[int] = ()) -> bool:
    return perfect_matching(G, without) is not None


def odd_components_count(G: Multigraph, S: Iterable[int] = ()) -> int:
    return sum(len(c) % 2 for c in G.components(S))


def pm_with_forced_and_forbidden(G: Multigraph, force: Iterable[int] = (), forbid: Iterable[int] = ()) -> Optional[Matching]:
    forced = tuple(force)
    forbidden = frozenset(forbid)
    covered = set()
    for eid in forced:
        e = G.edge(eid)
        if e.u in covered or e.v in covered:
            raise MatchingError(f"Forced edges share a vertex at edge {eid}")
        covered.update((e.u, e.v))
    if forbidden.intersection(forced):
        return None
    rest = perfect_matching(G, without=covered, forbid=forbidden)
    if rest is None:
        return None
    return frozenset(forced) | rest


class MatchabilityCache:
    """Memoised matchability of G minus small vertex sets, scoped to one call."""

    def __init__(self, G: Multigraph):
        self.graph = G
        self._memo: Dict[FrozenSet[int], bool] = {}

    def matchable_without(self, removed: Iterable[int]) -> bool:
        key = frozenset(removed)
        if key not in self._memo:
            self._memo[key] = is_matchable(self.graph, key)
        return self._memo[key]

    def pair(self, u: int, v: int) -> bool:
        return self.matchable_without((u, v))

    def __len__(self) -> int:
        return len(self._memo)


def inadmissible_edges(G: Multigraph, cache: Optional[MatchabilityCache] = None) -> List[int]:
    cache = cache or MatchabilityCache(G)
    return [e.id for e in G.edges if not cache.pair(e.u, e.v)]


def is_matching_covered(G: Multigraph, cache: Optional[MatchabilityCache] = None) -> bool:
    if G.n < 2 or G.n % 2 or not G.is_connected():
        return False
    cache = cache or MatchabilityCache(G)
    if not cache.matchable_without(()):
        return False
    return all(cache.pair(e.u, e.v) for e in G.edges)


def tutte_set(G: Multigraph) -> Optional[FrozenSet[int]]:
    """A set S with more odd components in G - S than |S|, or None when G is matchable.

    Built from the Gallai-Edmonds sets: D holds the vertices missed by some
    maximum matching and S = N(D) - D.
    """
    nu = len(maximum_matching(G))
    if 2 * nu == G.n:
        return None
    deficient = {v for v in G.vertices if len(maximum_matching(G, without=(v,))) == nu}
    S = frozenset(w for v in deficient for w in G.neighbors(v)) - deficient
    if odd_components_count(G, S) <= len(S):
        raise MatchingError(f"Gallai-Edmonds set {sorted(S)} does not violate Tutte's condition")
    return S


def require_matching_covered(G: Multigraph) -> None:
    """Raise NotMatchingCoveredError naming an offending edge or a Tutte set."""
    if G.n < 2 or G.n % 2:
        raise NotMatchingCoveredError(f"Graph has odd or trivial order {G.n}")
    if not G.is_connected():
        raise NotMatchingCoveredError("Graph is disconnected")
    cache = MatchabilityCache(G)
    if not cache.matchable_without(()):
        S = tutte_set(G)
        raise NotMatchingCoveredError(f"Graph has no perfect matching; Tutte set {sorted(S)}", tutte_set=S)
    bad = inadmissible_edges(G, cache)
    if bad:
        raise NotMatchingCoveredError(f"Edge {bad[0]} lies in no perfect matching", edge_id=bad[0])


def removable_edges(G: Multigraph) -> List[int]:
    require_matching_covered(G)
    return [e.id for e in G.edges if is_matching_covered(G.remove_edges((e.id,)))]
