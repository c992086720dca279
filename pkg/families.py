"""K2-sums and the extremal families T and T0, plus the edge and brick bounds.

T is the smallest class holding C2, K4 and the Petersen graph that is
closed under K2-sums; T0 drops Petersen. Members are described by sum
trees whose edge endpoints refer to the evaluated child graphs.
"""

import logging
from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Dict, List, Optional, Tuple, Union

from core import Edge, GraphError, Multigraph, fingerprint, is_isomorphic, isomorphism, named_graph
from decomposition import brick_count
from matching import is_matching_covered
from structure import iter_two_separations, marked_components
from theta import DecisionContext, is_theta_free

logger = logging.getLogger(__name__)

FAMILY_BASES = {
    "T": ("C2", "K4", "petersen"),
    "T0": ("C2", "K4"),
}


@dataclass(frozen=True)
class FamilyLeaf:
    name: str

    def to_dict(self) -> Dict:
        return {"leaf": self.name}


@dataclass(frozen=True)
class FamilySum:
    left: "FamilyTree"
    right: "FamilyTree"
    left_edge: Tuple[int, int]
    right_edge: Tuple[int, int]

    def to_dict(self) -> Dict:
        return {
            "sum": [self.left.to_dict(), self.right.to_dict()],
            "edges": [list(self.left_edge), list(self.right_edge)],
        }


FamilyTree = Union[FamilyLeaf, FamilySum]


def _bases(which: str) -> Tuple[str, ...]:
    if which not in FAMILY_BASES:
        raise GraphError(f"Unknown family {which!r}; expected one of {sorted(FAMILY_BASES)}")
    return FAMILY_BASES[which]


def k2_sum(G1: Multigraph, e1: int, G2: Multigraph, e2: int, flip: bool = False) -> Multigraph:
    """Identify e1 with e2 (u to u and v to v, or crossed with flip) and delete both copies.

    The result is relabeled compactly; G1 keeps its vertex order first.
    """
    first, second = G1.edge(e1), G2.edge(e2)
    a2, b2 = (second.v, second.u) if flip else (second.u, second.v)
    offset = G1.next_vertex_id
    vmap = {w: offset + i for i, w in enumerate(G2.vertices)}
    vmap[a2], vmap[b2] = first.u, first.v
    edge_offset = G1.next_edge_id
    edges = [e for e in G1.edges if e.id != e1]
    edges += [Edge(edge_offset + i, vmap[e.u], vmap[e.v]) for i, e in enumerate(G2.edges) if e.id != e2]
    vertices = G1.vertices + tuple(vmap[w] for w in G2.vertices if w not in (a2, b2))
    graph, _ = Multigraph(vertices, tuple(edges)).relabeled()
    return graph


def _glue(G1: Multigraph, ends1: Tuple[int, int], G2: Multigraph, ends2: Tuple[int, int]) -> Multigraph:
    shared1 = G1.edges_between(*ends1)
    shared2 = G2.edges_between(*ends2)
    if not shared1 or not shared2:
        raise GraphError(f"K2-sum needs edges {ends1} and {ends2} to exist")
    flip = (G1.edge(shared1[0]).u == ends1[0]) != (G2.edge(shared2[0]).u == ends2[0])
    return k2_sum(G1, shared1[0], G2, shared2[0], flip)


def evaluate_tree(tree: FamilyTree) -> Multigraph:
    if isinstance(tree, FamilyLeaf):
        return named_graph(tree.name)
    return _glue(evaluate_tree(tree.left), tree.left_edge, evaluate_tree(tree.right), tree.right_edge)


class _IsoIndex:
    """Graphs bucketed by fingerprint, compared exactly inside a bucket."""

    def __init__(self):
        self.buckets: Dict[str, List[Tuple[Multigraph, object]]] = {}

    def find(self, G: Multigraph) -> Tuple[bool, object]:
        for H, payload in self.buckets.get(fingerprint(G), []):
            if is_isomorphic(G, H):
                return True, payload
        return False, None

    def add(self, G: Multigraph, payload: object) -> None:
        self.buckets.setdefault(fingerprint(G), []).append((G, payload))


def generate_family(which: str, max_n: int) -> List[Tuple[Multigraph, FamilyTree]]:
    """Every member of order at most max_n, one per isomorphism class."""
    members: List[Tuple[Multigraph, FamilyTree]] = []
    index = _IsoIndex()

    def add(G: Multigraph, tree: FamilyTree) -> None:
        seen, _ = index.find(G)
        if not seen:
            index.add(G, tree)
            members.append((G, tree))

    for name in _bases(which):
        base = named_graph(name)
        if base.n <= max_n:
            add(base, FamilyLeaf(name))

    for n in range(6, max_n + 1, 2):
        smaller = [(G, t) for G, t in members if G.n >= 4]
        for (A, ta), (B, tb) in combinations_with_replacement(smaller, 2):
            if A.n + B.n - 2 != n:
                continue
            for ea in A.edges:
                for eb in B.edges:
                    for ends_b in ((eb.u, eb.v), (eb.v, eb.u)):
                        G = _glue(A, (ea.u, ea.v), B, ends_b)
                        add(G, FamilySum(ta, tb, (ea.u, ea.v), ends_b))
        logger.debug(f"Family {which}: {len(members)} members up to order {n}")

    logger.info(f"Generated {len(members)} members of {which} with n <= {max_n}")
    return sorted(members, key=lambda item: (item[0].n, item[0].m, fingerprint(item[0])))


class FamilyRecognizer:
    """Membership in T or T0 by splitting along 2-separations, memoised up to isomorphism."""

    def __init__(self, which: str):
        self.which = which
        self.bases = _bases(which)
        self.memo = _IsoIndex()

    def recognize(self, G: Multigraph) -> Optional[FamilyTree]:
        seen, tree = self.memo.find(G)
        if seen:
            return tree
        tree = self._recognize(G)
        self.memo.add(G, tree)
        return tree

    def _recognize(self, G: Multigraph) -> Optional[FamilyTree]:
        for name in self.bases:
            if is_isomorphic(G, named_graph(name)):
                return FamilyLeaf(name)
        if G.n < 6 or not G.is_simple():
            return None
        # every member of T0 has exactly 2n - 2 edges
        if self.which == "T0" and G.m != 2 * G.n - 2:
            return None
        if not is_matching_covered(G):
            return None
        for sep in iter_two_separations(G):
            if len(sep.components) != 2 or G.edges_between(sep.u, sep.v):
                continue
            parts = marked_components(G, sep)
            trees = [self.recognize(part.graph) for part in parts]
            if any(t is None for t in trees):
                continue
            ends = []
            for part, tree in zip(parts, trees):
                phi = isomorphism(part.graph, evaluate_tree(tree))
                ends.append((phi[sep.u], phi[sep.v]))
            return FamilySum(trees[0], trees[1], ends[0], ends[1])
        return None


def recognize_family(G: Multigraph, which: str) -> Optional[FamilyTree]:
    return FamilyRecognizer(which).recognize(G)


@dataclass
class BoundsReport:
    n: int
    m: int
    b: int
    theta_free: bool
    edge_bound_holds: bool
    edge_bound_tight: bool
    brick_bound_holds: bool
    brick_bound_tight: bool
    plain_bound_holds: bool
    plain_bound_tight: bool
    in_T: bool
    in_T0: bool

    @property
    def consistent(self) -> bool:
        """Bounds hold for θ-free graphs and are tight exactly on the families (K2 aside)."""
        if not self.theta_free:
            return True
        if not (self.edge_bound_holds and self.brick_bound_holds and self.plain_bound_holds):
            return False
        if self.edge_bound_tight != self.in_T or self.plain_bound_tight != self.in_T0:
            return False
        is_k2 = self.n == 2 and self.m == 1
        return is_k2 or self.brick_bound_tight == self.in_T0

    def to_dict(self) -> Dict:
        return {
            "n": self.n,
            "m": self.m,
            "b": self.b,
            "theta_free": self.theta_free,
            "bounds": {
                "edges_vs_bricks": {"holds": self.edge_bound_holds, "tight": self.edge_bound_tight},
                "bricks": {"holds": self.brick_bound_holds, "tight": self.brick_bound_tight},
                "edges": {"holds": self.plain_bound_holds, "tight": self.plain_bound_tight},
            },
            "in_T": self.in_T,
            "in_T0": self.in_T0,
            "consistent": self.consistent,
        }


def check_bounds(G: Multigraph, context: Optional[DecisionContext] = None) -> BoundsReport:
    certificate = is_theta_free(G, context)
    n, m = G.n, G.m
    b = brick_count(G)
    report = BoundsReport(
        n=n,
        m=m,
        b=b,
        theta_free=certificate.is_free,
        edge_bound_holds=2 * m <= 3 * n + 2 * b - 2,
        edge_bound_tight=2 * m == 3 * n + 2 * b - 2,
        brick_bound_holds=2 * b <= n - 2,
        brick_bound_tight=2 * b == n - 2,
        plain_bound_holds=m <= 2 * n - 2,
        plain_bound_tight=m == 2 * n - 2,
        in_T=recognize_family(G, "T") is not None,
        in_T0=recognize_family(G, "T0") is not None,
    )
    if not report.consistent:
        logger.warning(f"Bounds report inconsistent for n={n}, m={m}, b={b}")
    return report
