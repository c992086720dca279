"""Deciding whether a matching covered graph is θ-free.

The recursion follows the structure theory directly. A base graph is FREE.
Otherwise a nontrivial maximal barrier sends the question to the
contractions of its components. A bicritical graph is either a brick (FREE
only for K4 and Petersen) or has a 2-separation. Three or more components
make the graph θ-based; with two, both marked components are decided.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, List, Optional, Tuple, Union

import config
from core import Multigraph, ThetaKitError, contract_shore, is_even_cycle, is_isomorphic, named_graph
from matching import MatchabilityCache, require_matching_covered
from monitoring import RunMetrics
from structure import TwoSeparation, canonical_partition, is_three_connected, iter_two_separations, marked_components
from witness import (
    ThetaWitness,
    WitnessError,
    check_theta_witness,
    find_theta_witness_in_nondecomposable,
    lift_witness_2sep,
    lift_witness_barrier,
    theta_through_parallel_pair,
    theta_through_three_components,
)

logger = logging.getLogger(__name__)

FREE = "FREE"
BASED = "BASED"

BASE_GRAPHS = ("K2", "C2", "K4", "petersen")
LEAF_NAMES = BASE_GRAPHS + ("cycle",)
BASED_REASONS = ("nonleaf-brick", "nonleaf-brace", "2sep-3-components", "adjacent-parallel-cycle")


@dataclass
class Leaf:
    name: str

    @property
    def verdict(self) -> str:
        return FREE

    def to_dict(self) -> Dict:
        return {"type": "leaf", "name": self.name}


@dataclass
class BasedLeaf:
    reason: str
    witness: Optional[ThetaWitness] = None
    separation: Optional[Tuple[int, int]] = None
    certificate_omitted: bool = False

    @property
    def verdict(self) -> str:
        return BASED

    def to_dict(self) -> Dict:
        data = {
            "type": "based",
            "reason": self.reason,
            "witness": self.witness.to_dict() if self.witness else None,
            "certificate_omitted": self.certificate_omitted,
        }
        if self.separation is not None:
            data["separation"] = list(self.separation)
        return data


@dataclass
class BarrierChild:
    component: FrozenSet[int]
    contraction_vertex: int
    node: "Node"


@dataclass
class BarrierNode:
    barrier: FrozenSet[int]
    children: List[BarrierChild] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        return BASED if any(c.node.verdict == BASED for c in self.children) else FREE

    def to_dict(self) -> Dict:
        return {
            "type": "barrier",
            "barrier": sorted(self.barrier),
            "children": [
                {"component": sorted(c.component), "contraction_vertex": c.contraction_vertex, "node": c.node.to_dict()}
                for c in self.children
            ],
        }


@dataclass
class SeparationChild:
    component: FrozenSet[int]
    marker_edge: int
    node: "Node"


@dataclass
class TwoSepNode:
    separation: Tuple[int, int]
    children: List[SeparationChild] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        return BASED if any(c.node.verdict == BASED for c in self.children) else FREE

    def to_dict(self) -> Dict:
        return {
            "type": "two_separation",
            "separation": list(self.separation),
            "children": [
                {"component": sorted(c.component), "marker_edge": c.marker_edge, "node": c.node.to_dict()}
                for c in self.children
            ],
        }


Node = Union[Leaf, BasedLeaf, BarrierNode, TwoSepNode]


@dataclass
class Certificate:
    verdict: str
    tree: Node
    witness: Optional[ThetaWitness] = None
    certificate_omitted: bool = False

    @property
    def is_free(self) -> bool:
        return self.verdict == FREE

    def to_dict(self) -> Dict:
        return {
            "verdict": self.verdict,
            "tree": self.tree.to_dict(),
            "witness": self.witness.to_dict() if self.witness else None,
            "certificate_omitted": self.certificate_omitted,
        }


@dataclass
class DecisionContext:
    search_cap: int = config.SEARCH_CAP
    self_verify: bool = config.SELF_VERIFY
    metrics: Optional[RunMetrics] = None


@dataclass
class _Outcome:
    node: Node
    witness: Optional[ThetaWitness] = None
    omitted: bool = False


def base_graph_name(G: Multigraph) -> Optional[str]:
    if G.n == 2:
        return {1: "K2", 2: "C2"}.get(G.m)
    if G.n == 4 and G.m == 6 and G.is_simple():
        return "K4"
    if G.n == 10 and G.m == 15 and G.is_simple() and is_isomorphic(G, named_graph("petersen")):
        return "petersen"
    if G.n >= 4 and is_even_cycle(G):
        return "cycle"
    return None


class ThetaDecider:
    def __init__(self, context: DecisionContext):
        self.context = context

    def _attempt(self, G: Multigraph, build: Callable[[], Optional[ThetaWitness]], stage: str) -> Optional[ThetaWitness]:
        try:
            W = build()
        except ThetaKitError as e:
            logger.warning(f"Could not build witness at {stage} (n={G.n}): {e}")
            return None
        if W is not None and self.context.self_verify:
            result = check_theta_witness(G, W)
            if not result:
                raise WitnessError(f"Self-check failed at {stage}: {'; '.join(result.reasons)}")
        return W

    def decide(self, G: Multigraph) -> _Outcome:
        name = base_graph_name(G)
        if name is not None:
            logger.debug(f"Leaf {name} (n={G.n}, m={G.m})")
            return _Outcome(Leaf(name))
        if G.n == 2:
            u, v = G.vertices
            W = ThetaWitness(u, v, tuple((e.id,) for e in G.edges[:3]))
            return _Outcome(BasedLeaf("nonleaf-brace", W), W)

        cache = MatchabilityCache(G)
        partition = canonical_partition(G, cache, check=False)
        nontrivial = sorted((B for B in partition if len(B) > 1), key=lambda s: tuple(sorted(s)))
        if nontrivial:
            return self._across_barrier(G, nontrivial[0])
        if is_three_connected(G):
            return self._brick(G)
        return self._across_separation(G, next(iter_two_separations(G)))

    def _brick(self, G: Multigraph) -> _Outcome:
        if not G.is_simple():
            W = self._attempt(G, lambda: theta_through_parallel_pair(G), "parallel pair")
            return _Outcome(BasedLeaf("adjacent-parallel-cycle", W), W)
        search = find_theta_witness_in_nondecomposable(G, self.context.search_cap)
        W = self._attempt(G, lambda: search.witness, "brick search")
        node = BasedLeaf("nonleaf-brick", W, certificate_omitted=search.certificate_omitted)
        return _Outcome(node, W, search.certificate_omitted)

    def _across_barrier(self, G: Multigraph, B: FrozenSet[int]) -> _Outcome:
        logger.debug(f"Recursing along barrier {sorted(B)} (n={G.n})")
        node = BarrierNode(B)
        for part in G.components(B):
            shrunk = contract_shore(G, part)
            outcome = self.decide(shrunk.graph)
            node.children.append(BarrierChild(part, shrunk.vertex, outcome.node))
            if outcome.node.verdict == BASED:
                W = None
                if outcome.witness is not None:
                    W = self._attempt(G, lambda: lift_witness_barrier(G, B, part, outcome.witness), "barrier lift")
                return _Outcome(node, W, outcome.omitted)
        return _Outcome(node)

    def _across_separation(self, G: Multigraph, sep: TwoSeparation) -> _Outcome:
        if len(sep.components) >= 3:
            W = self._attempt(G, lambda: theta_through_three_components(G, sep), "three components")
            return _Outcome(BasedLeaf("2sep-3-components", W, separation=sep.vertices), W)
        logger.debug(f"Recursing across 2-separation {sep.vertices} (n={G.n})")
        node = TwoSepNode(sep.vertices)
        for marked in marked_components(G, sep):
            outcome = self.decide(marked.graph)
            node.children.append(SeparationChild(marked.component, marked.marker_edge, outcome.node))
            if outcome.node.verdict == BASED:
                W = None
                if outcome.witness is not None:
                    W = self._attempt(G, lambda: lift_witness_2sep(G, sep, marked, outcome.witness), "2-separation lift")
                return _Outcome(node, W, outcome.omitted)
        return _Outcome(node)


def is_theta_free(G: Multigraph, context: Optional[DecisionContext] = None) -> Certificate:
    context = context or DecisionContext()
    metrics = context.metrics or RunMetrics()
    with metrics.measure_stage("matching_covered_check", {"n": G.n, "m": G.m}):
        require_matching_covered(G)
    with metrics.measure_stage("decide", {"n": G.n, "m": G.m}) as record:
        outcome = ThetaDecider(context).decide(G)
        verdict = outcome.node.verdict
        record.metadata["verdict"] = verdict
    logger.info(f"Graph with n={G.n}, m={G.m} is {verdict}" + (" (witness attached)" if outcome.witness else ""))
    return Certificate(verdict, outcome.node, outcome.witness if verdict == BASED else None, outcome.omitted)
