import math

import pytest

from poisson_widths.errors import ParameterError, UnderflowError
from poisson_widths.kernels import KernelParams
from poisson_widths.thresholds import n_q_beta
from poisson_widths.widths import (
    GAMMA_BOUND,
    asymptotic_gamma,
    asymptotic_width,
    best_approx_factored,
    best_approx_value,
    two_sided_bounds,
    width_by_dimension,
    width_report,
)

Q_GRID = [round(0.1 * i, 1) for i in range(1, 10)]


@pytest.mark.parametrize("q", Q_GRID)
@pytest.mark.parametrize("n", [1, 2, 7, 16, 32])
def test_closed_form_beta_zero(q, n):
    expected = 4.0 / math.pi * math.atan(q ** n)
    assert best_approx_value(KernelParams(q, 0.0), n) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("q", Q_GRID)
@pytest.mark.parametrize("n", [1, 2, 7, 16, 32])
def test_closed_form_beta_one(q, n):
    expected = 4.0 / math.pi * math.atanh(q ** n)
    assert best_approx_value(KernelParams(q, 1.0), n) == pytest.approx(expected, rel=1e-12)


def test_factored_form(skew):
    log_qn, m = best_approx_factored(skew, 5)
    assert log_qn == pytest.approx(5 * math.log(0.3))
    assert math.exp(log_qn) * m == pytest.approx(best_approx_value(skew, 5), rel=1e-15)


def test_value_underflows_to_zero():
    params = KernelParams(0.1, 0.0)
    assert best_approx_value(params, 400) == 0.0
    report = width_report(params, 400)
    assert report.value == 0.0
    assert report.log_value == pytest.approx(400 * math.log(0.1) + math.log(4.0 / math.pi), rel=1e-12)


@pytest.mark.parametrize(
    "q,beta,n,certified",
    [
        (0.15, 0.0, 1, True),
        (0.2, 3.0, 1, True),
        (0.197, 0.5, 1, False),
        (0.5, 0.0, 963, True),
        (0.5, 0.0, 962, False),
    ],
)
def test_certification_cases(q, beta, n, certified):
    assert width_report(KernelParams(q, beta), n).certified is certified


def test_uncertain_beyond_search_cap():
    report = width_report(KernelParams(0.9, 0.0), 200, cap=100)
    assert report.certified is None
    assert report.to_dict()["certified"] == "unknown"


def test_not_certified_below_search_cap():
    report = width_report(KernelParams(0.9, 0.0), 50, cap=100)
    assert report.certified is False
    assert report.threshold is None


def test_report_fields(half):
    report = width_report(half, 963)
    assert report.dimensions == (1925, 1926)
    assert report.threshold == 963
    data = report.to_dict()
    assert data["n_q_beta"] == 963
    assert data["dimensions"] == [1925, 1926]


@pytest.mark.parametrize("m,n", [(1, 1), (2, 1), (7, 4), (8, 4)])
def test_width_by_dimension(skew, m, n):
    assert width_by_dimension(skew, m).n == n


def test_width_by_dimension_rejects_zero(skew):
    with pytest.raises(ParameterError):
        width_by_dimension(skew, 0)


@pytest.mark.parametrize("q,beta,n", [(0.3, 0.7, 5), (0.19, 1.7, 2), (0.1, 0.5, 1), (0.5, 0.3, 20)])
def test_asymptotic_width_reproduces_value(q, beta, n):
    params = KernelParams(q, beta)
    assert asymptotic_width(params, n) == pytest.approx(best_approx_value(params, n), rel=1e-12)


@pytest.mark.parametrize("q", [0.1, 0.15, 0.19])
@pytest.mark.parametrize("beta", [0.0, 0.5, 1.0, 1.7])
def test_gamma_bound_and_bracket(q, beta):
    params = KernelParams(q, beta)
    for n in range(n_q_beta(q, beta), 33):
        assert abs(asymptotic_gamma(params, n)) <= GAMMA_BOUND
        lower, upper = two_sided_bounds(params, n)
        scaled = math.pi / 4.0 * best_approx_value(params, n)
        assert lower * (1.0 - 1e-12) <= scaled <= upper * (1.0 + 1e-12)


def test_gamma_closed_form_beta_zero():
    # arctan x = x - x³/3 + …, so γ_n → -4/(3π) as q^n → 0
    assert asymptotic_gamma(KernelParams(0.1, 0.0), 10) == pytest.approx(-4.0 / (3.0 * math.pi), rel=1e-6)


def test_asymptotics_reject_unrepresentable():
    params = KernelParams(0.1, 0.0)
    with pytest.raises(UnderflowError):
        asymptotic_gamma(params, 400)
    with pytest.raises(UnderflowError):
        two_sided_bounds(params, 400)
