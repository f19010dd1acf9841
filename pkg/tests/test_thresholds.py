import math

import pytest

from poisson_widths.errors import ParameterError
from poisson_widths.thresholds import (
    UNIFORM_Q,
    NotFound,
    ThresholdKind,
    active_implications,
    branch_crossover,
    check_umova_z,
    condition_holds,
    find_threshold,
    implication_graph,
    implication_suite,
    lhs_new,
    lhs_old,
    log_inverse_q_lower_bound,
    n1_n2_gap,
    n_q_beta,
    rhs_condition,
    spline_q_limit,
    uniform_umova_certificate,
    xi,
)

LARGE_CAP = 10 ** 80


def test_rhs_condition_value():
    assert rhs_condition(0.5) == pytest.approx(0.0059920, rel=1e-4)


def test_thresholds_at_one_half():
    assert find_threshold(0.5, ThresholdKind.NQ).n == 969
    assert find_threshold(0.5, ThresholdKind.NQ_STAR).n == 963


def test_threshold_is_minimal():
    assert condition_holds(0.5, 963, ThresholdKind.NQ_STAR)
    assert not condition_holds(0.5, 962, ThresholdKind.NQ_STAR)
    assert lhs_new(0.5, 963) <= rhs_condition(0.5) < lhs_new(0.5, 962)
    assert lhs_old(0.5, 969) <= rhs_condition(0.5) < lhs_old(0.5, 968)


def test_threshold_result_fields():
    result = find_threshold(0.5, ThresholdKind.NQ_STAR)
    assert result.found
    assert result.as_value() == 963
    data = result.to_dict()
    assert data["kind"] == "nq_star"
    assert data["n"] == 963
    assert data["lhs_at_n"] <= data["rhs"]


def test_threshold_not_found():
    result = find_threshold(0.9, ThresholdKind.NQ, cap=1000)
    assert not result.found
    assert result.n is None
    assert result.as_value() == NotFound(1000)


def test_threshold_small_q_is_nine():
    assert find_threshold(0.05, ThresholdKind.NQ).n == 9


@pytest.mark.slow
@pytest.mark.parametrize("q", [round(0.25 + 0.05 * i, 2) for i in range(15)])
def test_new_threshold_never_larger(q):
    nq = find_threshold(q, ThresholdKind.NQ, LARGE_CAP)
    nq_star = find_threshold(q, ThresholdKind.NQ_STAR, LARGE_CAP)
    assert nq.found and nq_star.found
    assert nq_star.n <= nq.n


@pytest.mark.parametrize("q", [0.4925, 0.55, 0.65, 0.80])
def test_new_threshold_strictly_smaller(q):
    nq = find_threshold(q, ThresholdKind.NQ, LARGE_CAP)
    nq_star = find_threshold(q, ThresholdKind.NQ_STAR, LARGE_CAP)
    assert nq.n > nq_star.n


def test_huge_thresholds_use_exact_integers():
    result = find_threshold(0.95, ThresholdKind.NQ_STAR, LARGE_CAP)
    assert result.found
    assert result.n > 2 ** 50
    assert condition_holds(0.95, result.n, ThresholdKind.NQ_STAR)
    assert not condition_holds(0.95, result.n - 1, ThresholdKind.NQ_STAR)


def test_branch_crossover():
    n = branch_crossover()
    assert n == 766
    for m, expected in ((n, True), (n - 1, False)):
        root = math.sqrt(m)
        assert (8.0 / (3.0 * m - 7.0 * root) < 160.0 / (57.0 * (m - root))) is expected


def test_lhs_requires_nine():
    with pytest.raises(ParameterError):
        lhs_old(0.5, 8)
    with pytest.raises(ParameterError):
        lhs_new(0.5, 8)


def test_lhs_new_not_larger():
    for n in (9, 100, 765, 766, 5000):
        assert lhs_new(0.5, n) <= lhs_old(0.5, n)


@pytest.mark.parametrize("beta,expected", [(0.0, 0.2), (3.0, 0.2), (0.5, 0.196881), (1.7, 0.196881)])
def test_spline_q_limit(beta, expected):
    assert spline_q_limit(beta) == expected


def test_case_table():
    assert n_q_beta(0.2, 3.0) == 1
    assert n_q_beta(0.15, 0.0) == 1
    assert n_q_beta(0.196881, 0.5) == 1
    assert n_q_beta(0.197, 0.5) == find_threshold(0.197, ThresholdKind.NQ_STAR).n
    assert n_q_beta(0.2, 0.5) == find_threshold(0.2, ThresholdKind.NQ_STAR).n
    assert n_q_beta(0.5, 0.0) == 963
    assert n_q_beta(0.9, 0.0, cap=100) == NotFound(100)


def test_umova_z_small_q():
    assert check_umova_z(0.3, 9)


@pytest.mark.parametrize("q", [0.4, 0.6, 0.8])
def test_umova_z_at_new_threshold(q):
    n = find_threshold(q, ThresholdKind.NQ_STAR, LARGE_CAP).n
    assert check_umova_z(q, n)


def test_implication_graph_shape():
    graph = implication_graph()
    assert set(graph.nodes) == {"P9", "Pn1", "Pn2", "Pz"}
    assert graph.number_of_edges() == 4
    small = active_implications(0.3)
    assert small.has_edge("P9", "Pz")
    assert not small.has_edge("Pn1", "Pn2")
    large = active_implications(0.5)
    assert large.has_edge("Pn1", "Pn2")
    assert not large.has_edge("P9", "Pz")


@pytest.mark.parametrize("q", [0.37, 0.5, 0.7, 0.9])
@pytest.mark.parametrize("n", [9, 50, 963, 2000])
def test_implication_suite_sample(q, n):
    report = implication_suite(q, n)
    assert report.ok, report.violations
    assert set(report.predicates) == {"P9", "Pn1", "Pn2", "Pz"}


@pytest.mark.slow
@pytest.mark.parametrize("q", [0.37, 0.5, 0.7, 0.9])
def test_implication_suite_full_range(q):
    for n in range(9, 2001):
        assert implication_suite(q, n).ok


def test_implication_report_at_threshold():
    report = implication_suite(0.5, 963)
    assert report.predicates["P9"]
    assert report.predicates["Pz"]
    assert report.to_dict()["ok"] is True


@pytest.mark.parametrize("q", [0.37, 0.4, 0.6, 0.9])
def test_gap_positive_above_uniform_q(q):
    assert q > UNIFORM_Q
    assert n1_n2_gap(q) > 0.0


@pytest.mark.parametrize("q", [0.01, 0.3, 0.5, 0.99])
def test_log_inverse_q_lower_bound(q):
    assert log_inverse_q_lower_bound(q) < -math.log(q)


def test_uniform_certificate():
    cert = uniform_umova_certificate()
    assert cert.holds
    assert cert.xi_at_9 == pytest.approx(-0.00423, abs=1e-4)
    assert xi(9) == cert.xi_at_9
