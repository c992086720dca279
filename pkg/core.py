"""Multigraphs with stable vertex ids and distinguishable parallel edges."""

import logging
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple

import networkx as nx
from networkx.algorithms.isomorphism import MultiGraphMatcher

logger = logging.getLogger(__name__)


class ThetaKitError(Exception):
    def __init__(self, message: str, error_type: str = "ThetaKitError"):
        super().__init__(message)
        self.error_type = error_type


class GraphFormatError(ThetaKitError):
    def __init__(self, message: str):
        super().__init__(message, error_type="GraphFormatError")


class GraphError(ThetaKitError):
    def __init__(self, message: str):
        super().__init__(message, error_type="GraphError")


@dataclass(frozen=True)
class Edge:
    id: int
    u: int
    v: int

    def other(self, w: int) -> int:
        if w == self.u:
            return self.v
        if w == self.v:
            return self.u
        raise GraphError(f"Vertex {w} is not an end of edge {self.id}")

    @property
    def ends(self) -> FrozenSet[int]:
        return frozenset((self.u, self.v))


@dataclass(frozen=True)
class Multigraph:
    vertices: Tuple[int, ...]
    edges: Tuple[Edge, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(sorted(set(self.vertices))))
        object.__setattr__(self, "edges", tuple(sorted(self.edges, key=lambda e: e.id)))
        if not self.vertices:
            raise GraphError("A graph needs at least one vertex")
        vertex_set = set(self.vertices)
        seen = set()
        for e in self.edges:
            if e.u == e.v:
                raise GraphError(f"Edge {e.id} is a loop at vertex {e.u}")
            if e.u not in vertex_set or e.v not in vertex_set:
                raise GraphError(f"Edge {e.id} has an end outside the vertex set")
            if e.id in seen:
                raise GraphError(f"Duplicate edge id {e.id}")
            seen.add(e.id)

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[Tuple[int, int]]) -> "Multigraph":
        return cls(tuple(range(n)), tuple(Edge(i, u, v) for i, (u, v) in enumerate(pairs)))

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def vertex_set(self) -> FrozenSet[int]:
        return frozenset(self.vertices)

    @cached_property
    def _edge_index(self) -> Dict[int, Edge]:
        return {e.id: e for e in self.edges}

    @cached_property
    def _incidence(self) -> Dict[int, Tuple[int, ...]]:
        incidence: Dict[int, List[int]] = {v: [] for v in self.vertices}
        for e in self.edges:
            incidence[e.u].append(e.id)
            incidence[e.v].append(e.id)
        return {v: tuple(ids) for v, ids in incidence.items()}

    def edge(self, eid: int) -> Edge:
        try:
            return self._edge_index[eid]
        except KeyError:
            raise GraphError(f"Unknown edge id {eid}")

    def has_edge_id(self, eid: int) -> bool:
        return eid in self._edge_index

    def incident(self, v: int) -> Tuple[int, ...]:
        return self._incidence[v]

    def degree(self, v: int) -> int:
        return len(self._incidence[v])

    @property
    def min_degree(self) -> int:
        return min((self.degree(v) for v in self.vertices), default=0)

    @property
    def max_degree(self) -> int:
        return max((self.degree(v) for v in self.vertices), default=0)

    def neighbors(self, v: int) -> Tuple[int, ...]:
        return tuple(sorted({self._edge_index[eid].other(v) for eid in self._incidence[v]}))

    def edges_between(self, u: int, v: int) -> Tuple[int, ...]:
        return tuple(eid for eid in self._incidence[u] if self._edge_index[eid].other(u) == v)

    def is_simple(self) -> bool:
        pairs = {e.ends for e in self.edges}
        return len(pairs) == self.m

    @property
    def next_vertex_id(self) -> int:
        return max(self.vertices, default=-1) + 1

    @property
    def next_edge_id(self) -> int:
        return max((e.id for e in self.edges), default=-1) + 1

    def induced(self, X: Iterable[int]) -> "Multigraph":
        keep = frozenset(X)
        return Multigraph(
            tuple(v for v in self.vertices if v in keep),
            tuple(e for e in self.edges if e.u in keep and e.v in keep),
        )

    def remove_edges(self, ids: Iterable[int]) -> "Multigraph":
        drop = frozenset(ids)
        return Multigraph(self.vertices, tuple(e for e in self.edges if e.id not in drop))

    def with_edge(self, u: int, v: int, eid: Optional[int] = None) -> Tuple["Multigraph", int]:
        eid = self.next_edge_id if eid is None else eid
        return Multigraph(self.vertices, self.edges + (Edge(eid, u, v),)), eid

    def edges_inside(self, X: Iterable[int]) -> int:
        shore = frozenset(X)
        return sum(1 for e in self.edges if e.u in shore and e.v in shore)

    def to_networkx(self) -> nx.MultiGraph:
        H = nx.MultiGraph()
        H.add_nodes_from(self.vertices)
        for e in self.edges:
            H.add_edge(e.u, e.v, key=e.id)
        return H

    def simple_view(self, without: Iterable[int] = (), forbid: Iterable[int] = ()) -> nx.Graph:
        """Simple graph on the surviving vertices; each pair keeps its smallest edge id as ``eid``."""
        removed = frozenset(without)
        skipped = frozenset(forbid)
        H = nx.Graph()
        H.add_nodes_from(v for v in self.vertices if v not in removed)
        for e in self.edges:
            if e.id in skipped or e.u in removed or e.v in removed:
                continue
            if not H.has_edge(e.u, e.v):
                H.add_edge(e.u, e.v, eid=e.id)
        return H

    def components(self, without: Iterable[int] = ()) -> List[FrozenSet[int]]:
        parts = [frozenset(c) for c in nx.connected_components(self.simple_view(without))]
        return sorted(parts, key=min)

    def is_connected(self) -> bool:
        return self.n > 0 and len(self.components()) == 1

    @cached_property
    def bipartition(self) -> Optional[Tuple[FrozenSet[int], FrozenSet[int]]]:
        H = self.simple_view()
        if not nx.is_bipartite(H):
            return None
        colouring = nx.bipartite.color(H)
        first = frozenset(v for v, c in colouring.items() if c == 0)
        return first, self.vertex_set - first

    def is_bipartite(self) -> bool:
        return self.bipartition is not None

    def relabeled(self) -> Tuple["Multigraph", Dict[int, int]]:
        """Compact copy with vertices 0..n-1 and edge ids 0..m-1, keeping relative order."""
        vmap = {v: i for i, v in enumerate(self.vertices)}
        edges = tuple(Edge(i, vmap[e.u], vmap[e.v]) for i, e in enumerate(self.edges))
        return Multigraph(tuple(range(self.n)), edges), vmap


@dataclass(frozen=True)
class Cut:
    shore: FrozenSet[int]
    complement: FrozenSet[int]
    edge_ids: Tuple[int, ...]

    @property
    def is_odd(self) -> bool:
        return len(self.shore) % 2 == 1 and len(self.complement) % 2 == 1

    @property
    def is_trivial(self) -> bool:
        return len(self.shore) == 1 or len(self.complement) == 1

    @property
    def is_nontrivial(self) -> bool:
        return not self.is_trivial


@dataclass(frozen=True)
class Contraction:
    graph: Multigraph
    vertex: int
    vertex_map: Mapping[int, int] = field(compare=False)


def _proper_shore(G: Multigraph, X: Iterable[int]) -> FrozenSet[int]:
    shore = frozenset(X)
    if not shore:
        raise GraphError("Shore is empty")
    if not shore <= G.vertex_set:
        raise GraphError(f"Shore has vertices outside the graph: {sorted(shore - G.vertex_set)}")
    if shore == G.vertex_set:
        raise GraphError("Shore is the whole vertex set")
    return shore


def cut(G: Multigraph, X: Iterable[int]) -> Cut:
    shore = _proper_shore(G, X)
    ids = tuple(e.id for e in G.edges if (e.u in shore) != (e.v in shore))
    return Cut(shore, G.vertex_set - shore, ids)


def contract_shore(G: Multigraph, X: Iterable[int]) -> Contraction:
    """G/X̄: keep X and shrink its complement to one fresh vertex."""
    shore = _proper_shore(G, X)
    fresh = G.next_vertex_id
    vertex_map = {v: (v if v in shore else fresh) for v in G.vertices}
    edges = []
    for e in G.edges:
        u, v = vertex_map[e.u], vertex_map[e.v]
        if u == v == fresh:
            continue
        edges.append(Edge(e.id, u, v))
    graph = Multigraph(tuple(shore) + (fresh,), tuple(edges))
    return Contraction(graph, fresh, vertex_map)


def underlying_simple(G: Multigraph) -> Multigraph:
    kept = {}
    for e in G.edges:
        kept.setdefault(e.ends, e)
    return Multigraph(G.vertices, tuple(kept.values()))


def bisubdivide(G: Multigraph, plan: Mapping[int, int]) -> Multigraph:
    for eid, count in plan.items():
        G.edge(eid)
        if count < 0 or count % 2:
            raise GraphError(f"Edge {eid} needs an even non-negative subdivision count, got {count}")
    vertices = list(G.vertices)
    edges: List[Edge] = []
    next_v, next_e = G.next_vertex_id, G.next_edge_id
    for e in G.edges:
        count = plan.get(e.id, 0)
        if not count:
            edges.append(e)
            continue
        chain = [e.u] + list(range(next_v, next_v + count)) + [e.v]
        vertices.extend(chain[1:-1])
        next_v += count
        edges.append(Edge(e.id, chain[0], chain[1]))
        for a, b in zip(chain[1:], chain[2:]):
            edges.append(Edge(next_e, a, b))
            next_e += 1
    return Multigraph(tuple(vertices), tuple(edges))


def parse_graph(text: str) -> Multigraph:
    lines = [line.strip() for line in text.splitlines()]
    lines = [line for line in lines if line and not line.startswith("#")]
    if not lines:
        raise GraphFormatError("Missing header line 'n m'")
    try:
        n, m = (int(tok) for tok in lines[0].split())
    except ValueError:
        raise GraphFormatError(f"Malformed header: {lines[0]!r}")
    if n < 1 or m < 0:
        raise GraphFormatError(f"Header needs n >= 1 and m >= 0, got {n} {m}")
    body = lines[1:]
    if len(body) != m:
        raise GraphFormatError(f"Header announces {m} edges but {len(body)} edge lines follow")
    pairs = []
    for lineno, line in enumerate(body, start=2):
        try:
            u, v = (int(tok) for tok in line.split())
        except ValueError:
            raise GraphFormatError(f"Line {lineno}: expected 'u v', got {line!r}")
        if u == v:
            raise GraphFormatError(f"Line {lineno}: loop at vertex {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(f"Line {lineno}: vertex index out of range 0..{n - 1}")
        pairs.append((u, v))
    return Multigraph.from_pairs(n, pairs)


def write_graph(G: Multigraph) -> str:
    H, _ = G.relabeled()
    rows = [f"{H.n} {H.m}"] + [f"{e.u} {e.v}" for e in H.edges]
    return "\n".join(rows) + "\n"


def read_graph_file(path: str) -> Multigraph:
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except UnicodeDecodeError:
        with open(path, "r", encoding="latin-1") as f:
            text = f.read()
    except OSError as e:
        raise GraphFormatError(f"Cannot read graph file {path}: {e}")
    return parse_graph(text)


def _cycle_pairs(length: int) -> List[Tuple[int, int]]:
    return [(i, (i + 1) % length) for i in range(length)] if length > 2 else [(0, 1), (0, 1)]


def _petersen_pairs() -> List[Tuple[int, int]]:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5, 7), (7, 9), (9, 6), (6, 8), (8, 5)]
    return outer + spokes + inner


# u=0 v=1 a=2 b=3 c=4 d=5, with S = {u, v}
_T6_PAIRS = [(0, 2), (0, 4), (1, 4), (1, 2), (0, 3), (0, 5), (1, 5), (1, 3), (2, 3), (4, 5)]

# A=0 B=1 C=2 D=3 E=4 F=5 G=6 H=7; the removable edge B-G has id 11
_BICORN_PAIRS = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 5), (5, 4), (5, 6), (6, 7), (7, 2), (7, 3), (1, 6)]

_NAMED_PAIRS = {
    "K2": (2, [(0, 1)]),
    "C2": (2, [(0, 1), (0, 1)]),
    "theta": (2, [(0, 1), (0, 1), (0, 1)]),
    "K4": (4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]),
    "C4star": (4, [(0, 1), (1, 2), (1, 2), (2, 3), (3, 0), (3, 0)]),
    "prism": (6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)]),
    "K33": (6, [(a, b) for a in range(3) for b in range(3, 6)]),
    "cube": (8, [(a, a ^ (1 << bit)) for a in range(8) for bit in range(3) if a < a ^ (1 << bit)]),
    "petersen": (10, _petersen_pairs()),
    "T6": (6, _T6_PAIRS),
    "bicorn": (8, _BICORN_PAIRS),
}

NAMED_GRAPHS = tuple(sorted(_NAMED_PAIRS)) + ("C<2k>",)

_CYCLE_NAME = re.compile(r"^C(\d+)$")


def named_graph(name: str) -> Multigraph:
    """Named graph with the canonical labeling documented in the README.

    Even cycles are requested as ``C<length>``, e.g. ``C6``; ``C2`` is the
    digon and ``C4`` the square.
    """
    if name in _NAMED_PAIRS:
        n, pairs = _NAMED_PAIRS[name]
        return Multigraph.from_pairs(n, pairs)
    match = _CYCLE_NAME.match(name)
    if match:
        length = int(match.group(1))
        if length >= 2 and length % 2 == 0:
            return Multigraph.from_pairs(length, _cycle_pairs(length))
    raise GraphError(f"Unknown named graph: {name}")


def is_isomorphic(G: Multigraph, H: Multigraph) -> bool:
    if (G.n, G.m) != (H.n, H.m):
        return False
    if sorted(G.degree(v) for v in G.vertices) != sorted(H.degree(v) for v in H.vertices):
        return False
    return nx.is_isomorphic(G.to_networkx(), H.to_networkx())


def isomorphism(G: Multigraph, H: Multigraph) -> Optional[Dict[int, int]]:
    """Vertex map from G onto H respecting edge multiplicities, or None."""
    if (G.n, G.m) != (H.n, H.m):
        return None
    matcher = MultiGraphMatcher(G.to_networkx(), H.to_networkx())
    if not matcher.is_isomorphic():
        return None
    return dict(matcher.mapping)


def fingerprint(G: Multigraph) -> str:
    H = nx.Graph()
    H.add_nodes_from(G.vertices)
    for e in G.edges:
        if H.has_edge(e.u, e.v):
            H[e.u][e.v]["mult"] += 1
        else:
            H.add_edge(e.u, e.v, mult=1)
    for u, v in H.edges:
        H[u][v]["mult"] = str(H[u][v]["mult"])
    degrees = ",".join(str(d) for d in sorted(G.degree(v) for v in G.vertices))
    return f"{G.n}:{G.m}:{degrees}:{nx.weisfeiler_lehman_graph_hash(H, edge_attr='mult', iterations=3)}"


def is_even_cycle(G: Multigraph) -> bool:
    """Connected 2-regular graph of even order (C2 included)."""
    return G.n >= 2 and G.n % 2 == 0 and all(G.degree(v) == 2 for v in G.vertices) and G.is_connected()
