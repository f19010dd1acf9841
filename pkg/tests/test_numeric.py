import math

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from poisson_widths.errors import ParameterError, TruncationError
from poisson_widths.numeric import SeriesPolicy, cospi, reduce_angle, safe_pow, sinpi, sum_series


@given(st.floats(min_value=-1e6, max_value=1e6, allow_nan=False))
def test_reduce_angle_range(t):
    r = reduce_angle(t)
    assert -math.pi < r <= math.pi
    assert math.isclose(math.cos(r), math.cos(t), abs_tol=1e-9)


@pytest.mark.parametrize("k", [1, 7, 1000, -250])
def test_reduce_angle_removes_whole_turns(k):
    assert reduce_angle(0.3 + 2.0 * math.pi * k) == pytest.approx(0.3, abs=1e-12)


@pytest.mark.parametrize("t", [1e7, -3.3e8, 1e10, 1e13, 1e22, 2.0 ** 80])
def test_reduce_angle_large_arguments(t):
    r = reduce_angle(t)
    assert -math.pi < r <= math.pi
    with mpmath.workdps(80):
        expected_cos = float(mpmath.cos(mpmath.mpf(t)))
        expected_sin = float(mpmath.sin(mpmath.mpf(t)))
    assert math.cos(r) == pytest.approx(expected_cos, abs=1e-15)
    assert math.sin(r) == pytest.approx(expected_sin, abs=1e-15)


def test_reduce_angle_across_split_limit():
    limit = math.ldexp(2.0 * math.pi, 20)
    for t in (math.nextafter(limit, 0.0), limit, limit + 1.0):
        with mpmath.workdps(60):
            expected = float(mpmath.sin(mpmath.mpf(t)))
        assert math.sin(reduce_angle(t)) == pytest.approx(expected, abs=1e-15)


def test_reduce_angle_keeps_principal_values():
    assert reduce_angle(math.pi) == math.pi
    assert reduce_angle(-0.25) == -0.25


@pytest.mark.parametrize("u", [0.5, 1.5, -0.5, 2.5, 101.5])
def test_cospi_exact_zero_at_half_integers(u):
    assert cospi(u) == 0.0


@pytest.mark.parametrize("u", [0.0, 1.0, -3.0, 42.0])
def test_sinpi_exact_zero_at_integers(u):
    assert sinpi(u) == 0.0


def test_cospi_sinpi_values():
    assert cospi(2.0) == 1.0
    assert cospi(1.0) == -1.0
    assert sinpi(0.5) == 1.0
    assert sinpi(-0.5) == -1.0
    assert cospi(0.25) == pytest.approx(math.sqrt(0.5), abs=1e-15)


def test_sum_series_geometric():
    total = sum_series(lambda k: 0.5 ** k, lambda k: 0.5 ** k)
    assert total == pytest.approx(2.0, rel=1e-15)


def test_sum_series_start_index():
    total = sum_series(lambda k: 0.5 ** k, lambda k: 0.5 ** k, start=1)
    assert total == pytest.approx(1.0, rel=1e-15)


def test_sum_series_raises_when_not_converged():
    policy = SeriesPolicy(max_terms=5)
    with pytest.raises(TruncationError) as info:
        sum_series(lambda k: 1.0 / (k + 1), lambda k: 1.0, policy, name="harmonic")
    assert info.value.max_terms == 5
    assert info.value.name == "harmonic"


@pytest.mark.parametrize("kwargs", [{"rel_tol": 0.0}, {"max_terms": 0}])
def test_series_policy_validation(kwargs):
    with pytest.raises(ParameterError):
        SeriesPolicy(**kwargs)


def test_safe_pow_underflows_to_zero():
    assert safe_pow(0.5, 2000) == 0.0
    assert safe_pow(0.5, 3) == pytest.approx(0.125, rel=1e-15)
