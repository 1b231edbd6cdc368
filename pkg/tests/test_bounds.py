import math
from fractions import Fraction

import pytest

from qgossip.bounds import (
    BoundReport,
    fixed_convergence_bound,
    hitting_cubic_bound,
    meeting_from_hitting_bound,
    mixing_horizon,
    nontrivial_budget,
    random_graph_convergence_bound,
    standard_reports,
    switching_convergence_bound,
    switching_meeting_bound,
)
from qgossip.quantization import QState, QuantizerSpec
from qgossip.randwalk import edge_selection_prob

SPEC = QuantizerSpec(0.0, 8.0, 3)


def test_meeting_from_hitting_values():
    assert meeting_from_hitting_bound(2, 1) == 2.0
    assert meeting_from_hitting_bound(3, 2) == 9.0
    assert meeting_from_hitting_bound(3, 3) > meeting_from_hitting_bound(3, 2)


def test_hitting_cubic_values():
    assert hitting_cubic_bound(3) == pytest.approx(4.0)
    assert hitting_cubic_bound(6) == pytest.approx(32.0)


def test_fixed_convergence_values():
    assert fixed_convergence_bound(3, 2) == pytest.approx(31.5)
    assert fixed_convergence_bound(2, 1) == pytest.approx(37 / 54)


def test_fixed_convergence_chain_consistency():
    # the closed form is the meeting bound with the cubic hitting cap substituted
    for n in range(2, 9):
        for j0 in (1, 2, 3):
            chained = (n * j0**2 / 8) * (2 * n * hitting_cubic_bound(n) - n)
            assert fixed_convergence_bound(n, j0) == pytest.approx(chained, rel=1e-12)


def test_mixing_horizon_values():
    assert mixing_horizon(2, 1) == 534
    assert mixing_horizon(2, 2) == 1067
    assert mixing_horizon(3, 1) == 8430


@pytest.mark.parametrize("n", [2, 3, 4, 6])
@pytest.mark.parametrize("b", [1, 2, 3, 5])
def test_mixing_horizon_is_next_integer(n, b):
    x = b * (8 * n**6 * math.log(math.sqrt(2) * n) + 1)
    t1 = mixing_horizon(n, b)
    assert t1 > x
    assert t1 - x <= 1.0


def test_switching_meeting_values():
    assert switching_meeting_bound(2, 1) == 4272.0
    assert switching_meeting_bound(2, 2) == pytest.approx(8 * 1067)


def test_switching_convergence_values():
    assert switching_convergence_bound(2, 1, 2) == 16392.0
    # leading term scales like b * n^9 * j0^2
    assert switching_convergence_bound(2, 2, 2) == pytest.approx(2 * 16392.0)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_switching_bound_dominates_meeting_chain(n):
    # the closed form must absorb (n j0^2/8) * meeting bound after the log relaxation
    for b in (1, 2):
        for j0 in (1, 2):
            assert switching_convergence_bound(n, b, j0) >= (
                n * j0**2 / 8
            ) * switching_meeting_bound(n, b)


def test_random_graph_bound_small_case():
    exact, relaxed = random_graph_convergence_bound(2, 1.0, 2)
    assert exact == pytest.approx(1.0)  # 2*4/(16*0.5)
    assert relaxed == pytest.approx(0.5)
    # at n=2 and large p the relaxation undershoots: exact > relaxed


def test_random_graph_bound_ordering_where_valid():
    # the relaxed form dominates exactly when p0 >= 2p/(n(n-1)); for p = 0.2
    # that holds from n = 4 upward
    for n in range(4, 11):
        exact, relaxed = random_graph_convergence_bound(n, 0.2, 2)
        assert exact <= relaxed
        assert edge_selection_prob(n, 0.2) >= 2 * 0.2 / (n * (n - 1))


def test_random_graph_bound_rejects_p_zero():
    with pytest.raises(ValueError):
        random_graph_convergence_bound(4, 0.0, 2)


def test_nontrivial_budget_worst_case_state():
    for n in (3, 5, 8):
        units = [1] * n
        units[0] = 0
        units[-1] = 2
        exact, relaxed = nontrivial_budget(QState(units, SPEC))
        assert exact == 1
        assert relaxed == Fraction(n, 2)


def test_nontrivial_budget_constant_state():
    exact, relaxed = nontrivial_budget(QState([3, 3, 3], SPEC))
    assert exact == 0 and relaxed == 0


def test_nontrivial_budget_equality_case():
    top = SPEC.levels
    exact, relaxed = nontrivial_budget(QState([0, top], SPEC))
    assert exact == Fraction(top**2, 4)
    assert exact == relaxed


def test_hitting_cubic_caps_small_family():
    # exhaustive solves over the named families; tight (equality) at n=3
    from qgossip.graphs import complete_graph, cycle_graph, lollipop_graph, path_graph, star_graph
    from qgossip.randwalk import hitting_time_matrix, p_sf

    for n in range(2, 8):
        family = [path_graph(n), star_graph(n), complete_graph(n)]
        if n >= 3:
            family.append(cycle_graph(n))
        family += [lollipop_graph(n, m) for m in range(2, n + 1)]
        for g in family:
            h_max = hitting_time_matrix(p_sf(g)).max()
            assert h_max <= hitting_cubic_bound(n) + 1e-9
    assert hitting_time_matrix(p_sf(path_graph(3))).max() == pytest.approx(4.0)


def test_evaluators_are_pure():
    assert fixed_convergence_bound(5, 2) == fixed_convergence_bound(5, 2)
    assert mixing_horizon(4, 3) == mixing_horizon(4, 3)


def test_bound_report_rejects_nonpositive():
    with pytest.raises(ValueError):
        BoundReport(name="bad", inputs={}, value=0.0, formula="zero")


def test_standard_reports_cover_inputs():
    reports = {r.name for r in standard_reports(n=4, b=2, j0=2, p=0.5, h_sf_max=9.0)}
    assert {
        "hitting_cubic",
        "meeting_from_hitting",
        "fixed_convergence",
        "mixing_horizon",
        "switching_meeting",
        "switching_convergence",
        "edge_selection_prob",
        "random_graph_meeting",
        "random_graph_convergence",
        "random_graph_convergence_relaxed",
    } <= reports
