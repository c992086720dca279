"""Independent checking of θ-freeness certificates.

Nothing here trusts the decider: every barrier, separation, contraction
and leaf claim is recomputed from the graph and the certificate alone,
using only the multigraph primitives, perfect matchings and the witness
checker.
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Optional

import networkx as nx

from core import Multigraph, ThetaKitError, contract_shore, is_even_cycle, is_isomorphic, named_graph
from matching import MatchabilityCache, is_matching_covered, odd_components_count
from witness import ThetaWitness, check_theta_witness

logger = logging.getLogger(__name__)

FREE = "FREE"
BASED = "BASED"


class CertificateFormatError(ThetaKitError):
    def __init__(self, message: str):
        super().__init__(message, error_type="CertificateFormatError")


@dataclass
class VerificationReport:
    valid: bool
    verdict: Optional[str] = None
    reasons: List[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.valid

    def to_dict(self) -> Dict:
        return {"valid": self.valid, "verdict": self.verdict, "reasons": self.reasons}


def _vertex_set(raw, where: str) -> frozenset:
    try:
        return frozenset(int(v) for v in raw)
    except (TypeError, ValueError):
        raise CertificateFormatError(f"{where}: expected a list of vertex ids")


def _three_connected(G: Multigraph) -> bool:
    return G.n >= 4 and nx.node_connectivity(G.simple_view()) >= 3


def _bicritical(G: Multigraph) -> bool:
    cache = MatchabilityCache(G)
    return all(cache.pair(u, v) for u, v in combinations(G.vertices, 2))


class CertificateChecker:
    def __init__(self):
        self.reasons: List[str] = []

    def fail(self, path: str, message: str) -> None:
        self.reasons.append(f"{path}: {message}")

    def check_witness(self, G: Multigraph, raw: Dict, path: str) -> None:
        try:
            W = ThetaWitness.from_dict(raw)
        except ThetaKitError as e:
            self.fail(path, str(e))
            return
        result = check_theta_witness(G, W)
        for reason in result.reasons:
            self.fail(path, f"witness: {reason}")

    def node(self, G: Multigraph, data: Dict, path: str) -> Optional[str]:
        """Verdict the node proves for G, or None once something is wrong."""
        if not isinstance(data, dict):
            raise CertificateFormatError(f"{path}: node must be an object")
        kind = data.get("type")
        try:
            if kind == "leaf":
                return self._leaf(G, data, path)
            if kind == "based":
                return self._based(G, data, path)
            if kind == "barrier":
                return self._barrier(G, data, path)
            if kind == "two_separation":
                return self._two_separation(G, data, path)
        except (TypeError, ValueError, AttributeError, KeyError) as e:
            raise CertificateFormatError(f"{path}: malformed {kind} node ({e})")
        self.fail(path, f"unknown node type {kind!r}")
        return None

    def _leaf(self, G: Multigraph, data: Dict, path: str) -> Optional[str]:
        name = data.get("name")
        if name == "cycle":
            ok = G.n >= 4 and is_even_cycle(G)
        elif name in ("K2", "C2", "K4", "petersen"):
            ok = is_isomorphic(G, named_graph(name))
        else:
            self.fail(path, f"unknown leaf name {name!r}")
            return None
        if not ok:
            self.fail(path, f"graph (n={G.n}, m={G.m}) is not {name}")
            return None
        return FREE

    def _based(self, G: Multigraph, data: Dict, path: str) -> Optional[str]:
        reason = data.get("reason")
        if reason == "nonleaf-brace":
            ok = G.is_bipartite() and not (G.n == 2 and G.m <= 2) and not is_even_cycle(G)
        elif reason == "nonleaf-brick":
            ok = (
                G.n >= 4
                and not G.is_bipartite()
                and _three_connected(G)
                and _bicritical(G)
                and not is_isomorphic(G, named_graph("K4"))
                and not is_isomorphic(G, named_graph("petersen"))
            )
        elif reason == "adjacent-parallel-cycle":
            ok = not G.is_simple() and not (G.n == 2 and G.m == 2)
        elif reason == "2sep-3-components":
            separation = data.get("separation")
            if not separation or len(separation) != 2:
                self.fail(path, "2sep-3-components needs a separation pair")
                return None
            S = _vertex_set(separation, path)
            parts = G.components(S) if len(S) == 2 and S <= G.vertex_set else []
            ok = len(parts) >= 3 and all(len(p) % 2 == 0 for p in parts)
        else:
            self.fail(path, f"unknown reason {reason!r}")
            return None
        if not ok:
            self.fail(path, f"reason {reason} does not hold (n={G.n}, m={G.m})")
            return None
        if data.get("witness"):
            self.check_witness(G, data["witness"], f"{path}.witness")
        return BASED

    def _barrier(self, G: Multigraph, data: Dict, path: str) -> Optional[str]:
        B = _vertex_set(data.get("barrier", []), path)
        if not B or not B <= G.vertex_set or odd_components_count(G, B) != len(B):
            self.fail(path, f"{sorted(B)} is not a barrier")
            return None
        parts = G.components(B)
        seen = set()
        verdicts = []
        for i, child in enumerate(data.get("children", [])):
            where = f"{path}.children[{i}]"
            if not isinstance(child, dict):
                raise CertificateFormatError(f"{where}: child must be an object")
            component = _vertex_set(child.get("component", []), where)
            if component not in parts:
                self.fail(where, f"{sorted(component)} is not a component of G - B")
                return None
            if component in seen:
                self.fail(where, "component listed twice")
                return None
            seen.add(component)
            if child.get("contraction_vertex") != G.next_vertex_id:
                self.fail(where, f"contraction vertex must be {G.next_vertex_id}")
                return None
            verdict = self.node(contract_shore(G, component).graph, child.get("node"), f"{where}.node")
            if verdict is None:
                return None
            verdicts.append(verdict)
        if BASED in verdicts:
            return BASED
        if len(seen) != len(parts):
            self.fail(path, f"only {len(seen)} of {len(parts)} components are certified")
            return None
        return FREE

    def _two_separation(self, G: Multigraph, data: Dict, path: str) -> Optional[str]:
        S = _vertex_set(data.get("separation", []), path)
        if len(S) != 2 or not S <= G.vertex_set:
            self.fail(path, "separation must name two vertices of the graph")
            return None
        parts = G.components(S)
        if len(parts) != 2 or any(len(p) % 2 for p in parts):
            self.fail(path, f"{sorted(S)} does not split the graph into two even components")
            return None
        u, v = sorted(S)
        seen = set()
        verdicts = []
        for i, child in enumerate(data.get("children", [])):
            where = f"{path}.children[{i}]"
            if not isinstance(child, dict):
                raise CertificateFormatError(f"{where}: child must be an object")
            component = _vertex_set(child.get("component", []), where)
            if component not in parts or component in seen:
                self.fail(where, f"{sorted(component)} is not a fresh component of G - {{{u}, {v}}}")
                return None
            seen.add(component)
            if child.get("marker_edge") != G.next_edge_id:
                self.fail(where, f"marker edge must be {G.next_edge_id}")
                return None
            marked, _ = G.induced(component | S).with_edge(u, v, G.next_edge_id)
            verdict = self.node(marked, child.get("node"), f"{where}.node")
            if verdict is None:
                return None
            verdicts.append(verdict)
        if BASED in verdicts:
            return BASED
        if len(seen) != 2:
            self.fail(path, "both marked components must be certified")
            return None
        return FREE


def verify_certificate(G: Multigraph, data: Dict) -> VerificationReport:
    if not isinstance(data, dict) or "verdict" not in data or "tree" not in data:
        raise CertificateFormatError("Certificate needs 'verdict' and 'tree'")
    claimed = data["verdict"]
    checker = CertificateChecker()
    if claimed not in (FREE, BASED):
        checker.fail("verdict", f"unknown verdict {claimed!r}")
    if not is_matching_covered(G):
        checker.fail("graph", "graph is not matching covered")
        return VerificationReport(False, None, checker.reasons)

    computed = checker.node(G, data["tree"], "tree")
    if computed is not None and computed != claimed:
        checker.fail("verdict", f"tree proves {computed}, certificate claims {claimed}")
    if data.get("witness"):
        if claimed != BASED:
            checker.fail("witness", "a witness accompanies a FREE verdict")
        checker.check_witness(G, data["witness"], "witness")

    report = VerificationReport(not checker.reasons, computed, checker.reasons)
    logger.info(f"Certificate {'accepted' if report.valid else 'rejected'} ({len(report.reasons)} problems)")
    return report
