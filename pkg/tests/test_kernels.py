import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from poisson_widths.errors import ParameterError
from poisson_widths.kernels import (
    KernelParams,
    bernoulli_series,
    convolve_phi_n,
    eval_bernoulli,
    eval_heat_poisson,
    eval_poisson,
    eval_poisson_integrated,
    eval_poisson_integrated_mp,
    eval_poisson_vec,
    heat_poisson_direct,
    poisson_series,
    quadrature_convolution,
)
from poisson_widths.widths import best_approx_value

Q_GRID = [0.1, 0.5, 0.9]
BETA_GRID = [0.0, 0.5, 1.0, 1.7]
T_GRID = [0.0, 0.3, 1.0, math.pi / 2, 3.0, -2.2, 40.0]


@pytest.mark.parametrize("q", [0.0, 1.0, -0.1, 1.5, float("nan")])
def test_params_reject_bad_q(q):
    with pytest.raises(ParameterError):
        KernelParams(q, 0.0)


def test_params_reject_infinite_beta():
    with pytest.raises(ValueError):
        KernelParams(0.5, float("inf"))


def test_params_integer_beta():
    assert KernelParams(0.5, 3.0).beta_is_integer
    assert not KernelParams(0.5, 0.5).beta_is_integer
    assert KernelParams(0.5, 0.5).shifted(1.0).beta == 1.5


@pytest.mark.parametrize("q", Q_GRID)
@pytest.mark.parametrize("beta", BETA_GRID)
@pytest.mark.parametrize("t", T_GRID)
def test_closed_form_matches_series(q, beta, t):
    params = KernelParams(q, beta)
    assert eval_poisson(params, t) == pytest.approx(poisson_series(params, t), abs=1e-12)


def test_vectorised_matches_scalar(skew):
    t = np.linspace(-7.0, 7.0, 41)
    expected = [eval_poisson(skew, x) for x in t]
    np.testing.assert_allclose(eval_poisson_vec(skew, t), expected, rtol=1e-13, atol=1e-15)


@given(st.floats(min_value=-50.0, max_value=50.0))
def test_poisson_periodic(t):
    params = KernelParams(0.4, 0.3)
    assert eval_poisson(params, t + 2.0 * math.pi) == pytest.approx(eval_poisson(params, t), abs=1e-12)


def test_poisson_at_zero_for_beta_zero():
    # Σ q^k = q/(1-q)
    assert eval_poisson(KernelParams(0.5, 0.0), 0.0) == pytest.approx(1.0, rel=1e-15)


def test_bernoulli_values():
    assert eval_bernoulli(0.0) == 0.0
    assert eval_bernoulli(2.0 * math.pi) == 0.0
    assert eval_bernoulli(math.pi / 2) == pytest.approx(math.pi / 4, rel=1e-15)
    assert eval_bernoulli(-math.pi / 2) == pytest.approx(-math.pi / 4, rel=1e-15)


@pytest.mark.parametrize("k", [-3, -1, 1, 2, 5, 1000])
def test_bernoulli_principal_value_at_lattice(k):
    assert eval_bernoulli(2.0 * math.pi * k) == 0.0


def test_bernoulli_off_lattice_keeps_sawtooth():
    t = 2.0 * math.pi + 1e-9
    assert eval_bernoulli(t) == pytest.approx((math.pi - 1e-9) / 2.0, rel=1e-12)


@given(st.floats(min_value=0.01, max_value=6.0))
def test_bernoulli_odd(t):
    assert eval_bernoulli(-t) == pytest.approx(-eval_bernoulli(t), abs=1e-14)


def test_bernoulli_partial_sums():
    assert bernoulli_series(1.0, 200_000) == pytest.approx(eval_bernoulli(1.0), abs=1e-4)


def test_integrated_kernel_zero_at_origin_for_beta_zero():
    assert eval_poisson_integrated(KernelParams(0.5, 0.0), 0.0) == pytest.approx(0.0, abs=1e-15)


def test_integrated_kernel_arctan():
    # Σ q^k/k · sin(kπ/2) = arctan q
    value = eval_poisson_integrated(KernelParams(0.5, 0.0), math.pi / 2)
    assert value == pytest.approx(math.atan(0.5), abs=1e-14)


@pytest.mark.parametrize("q,beta,t", [(0.3, 0.7, 1.1), (0.9, 0.0, 0.2), (0.1, 1.0, -2.5), (0.6, 1.7, 4.0)])
def test_integrated_kernel_high_precision(q, beta, t):
    ctx = mpmath.MPContext()
    ctx.dps = 30
    expected = float(eval_poisson_integrated_mp(ctx, q, beta, ctx.mpf(t)))
    assert eval_poisson_integrated(KernelParams(q, beta), t) == pytest.approx(expected, abs=1e-13)


@pytest.mark.parametrize("q", [0.05, 0.3, 0.7])
@pytest.mark.parametrize("t", [0.0, 1.0, math.pi, -2.0])
def test_heat_kernel_forms_agree(q, t):
    assert eval_heat_poisson(q, t) == pytest.approx(heat_poisson_direct(q, t), abs=1e-12)


@pytest.mark.parametrize("q", [0.1, 0.5, 0.9, 0.99])
def test_heat_kernel_positive(q):
    assert eval_heat_poisson(q, math.pi) > 0.0


def test_heat_kernel_rejects_bad_q():
    with pytest.raises(ParameterError):
        eval_heat_poisson(1.0, 0.0)


@given(st.floats(min_value=-5.0, max_value=5.0), st.integers(min_value=1, max_value=6))
def test_convolution_antiperiodic(x, n):
    params = KernelParams(0.4, 0.6)
    shifted = convolve_phi_n(params, n, x + math.pi / n)
    assert shifted == pytest.approx(-convolve_phi_n(params, n, x), abs=1e-12)


def _random_tuples(count=20, seed=2024):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        yield (
            float(rng.uniform(0.05, 0.7)),
            float(rng.uniform(0.0, 2.0)),
            int(rng.integers(1, 9)),
            float(rng.uniform(0.0, 2.0 * math.pi)),
        )


@pytest.mark.parametrize("q,beta,n,x", list(_random_tuples()))
def test_convolution_matches_quadrature(q, beta, n, x):
    params = KernelParams(q, beta)
    scale = best_approx_value(params, n)
    series = convolve_phi_n(params, n, x)
    assert abs(series - quadrature_convolution(params, n, x)) <= 1e-8 * scale


@pytest.mark.parametrize("q,beta,n", [(0.5, 0.0, 1), (0.5, 0.7, 3), (0.3, 1.3, 2)])
def test_grid_maximum_matches_best_approximation(q, beta, n):
    params = KernelParams(q, beta)
    grid = np.linspace(0.0, math.pi / n, 4096, endpoint=False)
    peak = max(abs(convolve_phi_n(params, n, x)) for x in grid)
    assert peak == pytest.approx(best_approx_value(params, n), rel=1e-6)


def test_convolution_rejects_bad_n(half):
    with pytest.raises(ParameterError):
        convolve_phi_n(half, 0, 0.1)
    with pytest.raises(ParameterError):
        quadrature_convolution(half, 1, 0.1, panels=0)


DENSE_Q = [round(float(q), 2) for q in np.linspace(0.05, 0.95, 10)]
DENSE_BETA = [float(b) for b in np.linspace(-2.0, 2.0, 10)]
DENSE_T = [float(t) for t in np.linspace(-math.pi, math.pi, 10)]


@pytest.mark.parametrize("q", DENSE_Q)
@pytest.mark.parametrize("beta", DENSE_BETA)
@pytest.mark.parametrize("t", DENSE_T)
def test_closed_form_matches_series_dense(q, beta, t):
    params = KernelParams(q, beta)
    # |P| 可达 q/(1-q) = 19，此时按相对误差比较
    assert eval_poisson(params, t) == pytest.approx(poisson_series(params, t), rel=1e-12, abs=1e-12)


def _high_q_tuples(count=12, seed=77):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        yield (
            float(rng.uniform(0.7, 0.9)),
            float(rng.uniform(0.0, 2.0)),
            int(rng.integers(1, 9)),
            float(rng.uniform(0.0, 2.0 * math.pi)),
        )


@pytest.mark.parametrize("q,beta,n,x", list(_high_q_tuples()))
def test_convolution_matches_quadrature_high_q(q, beta, n, x):
    params = KernelParams(q, beta)
    scale = best_approx_value(params, n)
    series = convolve_phi_n(params, n, x)
    assert abs(series - quadrature_convolution(params, n, x, panels=4096)) <= 1e-8 * scale


def test_quadrature_error_shrinks_with_panels():
    params = KernelParams(0.7, 0.3)
    exact = convolve_phi_n(params, 2, 1.0)
    coarse = abs(quadrature_convolution(params, 2, 1.0, panels=16) - exact)
    fine = abs(quadrature_convolution(params, 2, 1.0, panels=32) - exact)
    assert fine > 0.0
    assert coarse >= 4.0 * fine
