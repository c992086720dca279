import pytest

from core import GraphError, is_isomorphic, named_graph
from families import (
    FamilyLeaf,
    FamilySum,
    check_bounds,
    evaluate_tree,
    generate_family,
    k2_sum,
    recognize_family,
)
from matching import is_matching_covered
from theta import is_theta_free


def test_k2_sum_of_two_k4_is_t6(t6):
    K4 = named_graph("K4")
    G = k2_sum(K4, 0, K4, 0)
    assert (G.n, G.m) == (6, 10)
    assert is_isomorphic(G, t6)
    assert is_isomorphic(k2_sum(K4, 0, K4, 0, flip=True), t6)


def test_k2_sum_keeps_matching_covered(petersen):
    G = k2_sum(petersen, 0, named_graph("K4"), 3)
    assert (G.n, G.m) == (12, 19)
    assert is_matching_covered(G)
    assert is_theta_free(G).is_free


def test_evaluate_tree():
    tree = FamilySum(FamilyLeaf("K4"), FamilyLeaf("K4"), (0, 1), (2, 3))
    assert is_isomorphic(evaluate_tree(tree), named_graph("T6"))
    assert tree.to_dict() == {"sum": [{"leaf": "K4"}, {"leaf": "K4"}], "edges": [[0, 1], [2, 3]]}


def test_evaluate_tree_needs_existing_edges():
    with pytest.raises(GraphError):
        evaluate_tree(FamilySum(FamilyLeaf("C2"), FamilyLeaf("K4"), (0, 1), (0, 5)))


def test_unknown_family():
    with pytest.raises(GraphError):
        generate_family("T1", 6)
    with pytest.raises(GraphError):
        recognize_family(named_graph("K4"), "Tx")


def test_small_t0_members(t6):
    members = generate_family("T0", 6)
    assert len(members) == 3
    assert is_isomorphic(members[-1][0], t6)


def test_t0_up_to_order_eight():
    members = generate_family("T0", 8)
    assert len(members) == 5
    for G, tree in members:
        assert is_isomorphic(evaluate_tree(tree), G)
        assert G.m == 2 * G.n - 2
        assert recognize_family(G, "T0") is not None
        report = check_bounds(G)
        assert report.theta_free
        assert report.consistent
        assert report.plain_bound_tight


def test_t_contains_petersen_but_t0_does_not(petersen):
    assert recognize_family(petersen, "T") == FamilyLeaf("petersen")
    assert recognize_family(petersen, "T0") is None


def test_recognize_rejects_non_members():
    for name in ("C6", "prism", "K33", "cube", "bicorn"):
        assert recognize_family(named_graph(name), "T") is None


def test_recognize_sum_with_petersen(petersen):
    G = k2_sum(petersen, 0, named_graph("K4"), 0)
    tree = recognize_family(G, "T")
    assert isinstance(tree, FamilySum)
    assert is_isomorphic(evaluate_tree(tree), G)
    assert recognize_family(G, "T0") is None


@pytest.mark.parametrize(
    "name,edge_tight,brick_tight,plain_tight,in_T,in_T0",
    [
        ("K4", True, True, True, True, True),
        ("petersen", True, False, False, True, False),
        ("C2", True, True, True, True, True),
        ("T6", True, True, True, True, True),
        ("C6", False, False, False, False, False),
        ("K2", False, True, False, False, False),
    ],
)
def test_bounds_report(name, edge_tight, brick_tight, plain_tight, in_T, in_T0):
    report = check_bounds(named_graph(name))
    assert report.theta_free
    assert report.edge_bound_holds and report.brick_bound_holds and report.plain_bound_holds
    assert (report.edge_bound_tight, report.brick_bound_tight, report.plain_bound_tight) == (edge_tight, brick_tight, plain_tight)
    assert (report.in_T, report.in_T0) == (in_T, in_T0)
    assert report.consistent


def test_bounds_report_for_based_graph(t6):
    G, _ = t6.with_edge(0, 1)
    report = check_bounds(G)
    assert not report.theta_free
    assert report.consistent
    data = report.to_dict()
    assert data["b"] == 2
    assert data["bounds"]["bricks"] == {"holds": True, "tight": True}
