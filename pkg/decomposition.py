import logging
import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional

from core import Multigraph, ThetaKitError, contract_shore, cut, fingerprint, is_isomorphic, underlying_simple, write_graph
from matching import MatchabilityCache, require_matching_covered
from structure import ELPCut, candidate_elp_cuts, check_tight_cut, elp_cut, is_bicritical, is_three_connected

logger = logging.getLogger(__name__)


class DecompositionError(ThetaKitError):
    def __init__(self, message: str):
        super().__init__(message, error_type="DecompositionError")


def is_brick(G: Multigraph) -> bool:
    return G.n >= 4 and not G.is_bipartite() and is_three_connected(G) and is_bicritical(G)


def is_brace(G: Multigraph) -> bool:
    return G.is_bipartite() and elp_cut(G) is None


@dataclass
class DecompositionPolicy:
    strategy: str = "elp"  # elp, random, or custom
    seed: Optional[int] = None
    chooser: Optional[Callable[[Multigraph], Optional[Iterable[int]]]] = None


class CutChooser:
    def __init__(self, policy: DecompositionPolicy):
        if policy.strategy not in ("elp", "random", "custom"):
            raise DecompositionError(f"Unknown decomposition strategy: {policy.strategy}")
        if policy.strategy == "custom" and policy.chooser is None:
            raise DecompositionError("Custom decomposition strategy needs a chooser")
        self.policy = policy
        self.rng = random.Random(policy.seed)

    def choose(self, G: Multigraph, cache: MatchabilityCache) -> Optional[ELPCut]:
        if self.policy.strategy == "elp":
            return elp_cut(G, cache)
        elif self.policy.strategy == "random":
            candidates = candidate_elp_cuts(G, cache)
            return self.rng.choice(candidates) if candidates else None
        else:
            shore = self.policy.chooser(G)
            if shore is None:
                return None
            chosen = ELPCut(frozenset(shore), "custom")
            self._validate(G, chosen, cache)
            return chosen

    @staticmethod
    def _validate(G: Multigraph, chosen: ELPCut, cache: MatchabilityCache) -> None:
        try:
            c = cut(G, chosen.shore)
        except ThetaKitError as e:
            raise DecompositionError(f"Policy returned an invalid shore: {e}")
        if c.is_trivial:
            raise DecompositionError(f"Policy returned trivial cut with shore {sorted(chosen.shore)}")
        check = check_tight_cut(G, chosen.shore, cache)
        if not check.tight:
            raise DecompositionError(f"Policy returned a cut that is not tight: {check.reason}")


@dataclass
class TraceNode:
    n: int
    m: int
    kind: str  # split, brick, or brace
    cut: Optional[ELPCut] = None
    children: List["TraceNode"] = field(default_factory=list)

    def to_dict(self) -> Dict:
        data = {"n": self.n, "m": self.m, "kind": self.kind}
        if self.cut is not None:
            data["cut"] = self.cut.to_dict()
            data["children"] = [child.to_dict() for child in self.children]
        return data


@dataclass
class DecompositionResult:
    bricks: List[Multigraph]
    braces: List[Multigraph]
    trace: TraceNode

    @property
    def b(self) -> int:
        return len(self.bricks)

    def to_dict(self) -> Dict:
        return {
            "bricks": [write_graph(g) for g in self.bricks],
            "braces": [write_graph(g) for g in self.braces],
            "b": self.b,
            "trace": self.trace.to_dict(),
        }


def tight_cut_decomposition(G: Multigraph, policy: Optional[DecompositionPolicy] = None, check: bool = True) -> DecompositionResult:
    if check:
        require_matching_covered(G)
    chooser = CutChooser(policy or DecompositionPolicy())
    bricks: List[Multigraph] = []
    braces: List[Multigraph] = []

    def split(H: Multigraph) -> TraceNode:
        chosen = chooser.choose(H, MatchabilityCache(H))
        if chosen is None:
            kind = "brace" if H.is_bipartite() else "brick"
            leaf, _ = underlying_simple(H).relabeled()
            (bricks if kind == "brick" else braces).append(leaf)
            logger.debug(f"Leaf {kind} with n={H.n}, m={H.m}")
            return TraceNode(H.n, H.m, kind)
        logger.debug(f"Splitting n={H.n} along {chosen.kind} cut with shore {sorted(chosen.shore)}")
        inner = contract_shore(H, chosen.shore).graph
        outer = contract_shore(H, H.vertex_set - chosen.shore).graph
        return TraceNode(H.n, H.m, "split", chosen, [split(inner), split(outer)])

    trace = split(G)
    logger.info(f"Tight cut decomposition: {len(bricks)} bricks, {len(braces)} braces")
    return DecompositionResult(bricks, braces, trace)


def brick_count(G: Multigraph) -> int:
    return tight_cut_decomposition(G).b


def leaf_multiset(result: DecompositionResult) -> Counter:
    return Counter([("brick", fingerprint(g)) for g in result.bricks] + [("brace", fingerprint(g)) for g in result.braces])


def same_leaves(first: DecompositionResult, second: DecompositionResult) -> bool:
    """Exact comparison of the two leaf lists up to isomorphism."""
    if leaf_multiset(first) != leaf_multiset(second):
        return False
    for mine, theirs in ((first.bricks, second.bricks), (first.braces, second.braces)):
        pool = list(theirs)
        for g in mine:
            match = next((i for i, h in enumerate(pool) if is_isomorphic(g, h)), None)
            if match is None:
                return False
            pool.pop(match)
    return True
