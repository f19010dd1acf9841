"""
核函数 - Poisson 核、Bernoulli 核、积分 Poisson 核、热传导 Poisson 核
以及与 φ_n(t) = sign sin nt 的卷积（含求积校验）
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .errors import ParameterError
from .numeric import (
    DEFAULT_POLICY,
    SeriesPolicy,
    cospi,
    reduce_angle,
    safe_pow,
    sinpi,
    sum_series,
)

_logger = logging.getLogger(__name__)

# 2πk 在 binary64 中不可表示，约化后残留几个 ulp
LATTICE_ULPS = 4

__all__ = [
    "KernelParams",
    "SeriesPolicy",
    "eval_poisson",
    "eval_poisson_vec",
    "poisson_series",
    "eval_bernoulli",
    "bernoulli_series",
    "eval_poisson_integrated",
    "eval_poisson_integrated_mp",
    "eval_heat_poisson",
    "heat_poisson_direct",
    "convolve_phi_n",
    "quadrature_convolution",
    "validate_q",
]


def validate_q(q: float) -> float:
    """检查 0 < q < 1"""
    q = float(q)
    if not (0.0 < q < 1.0):
        raise ParameterError(f"q 必须满足 0 < q < 1，实际为 {q}")
    return q


@dataclass(frozen=True)
class KernelParams:
    """Poisson 核参数 (q, β)"""
    q: float
    beta: float

    def __post_init__(self):
        validate_q(self.q)
        if not math.isfinite(self.beta):
            raise ParameterError(f"beta 必须为有限实数，实际为 {self.beta}")

    @property
    def phase_beta(self) -> float:
        """β 对 4 取模（fmod 精确）；所有核关于 β 以 4 为周期"""
        return math.fmod(self.beta, 4.0)

    @property
    def beta_is_integer(self) -> bool:
        return self.beta == round(self.beta)

    def shifted(self, delta_beta: float) -> "KernelParams":
        return KernelParams(self.q, self.beta + delta_beta)

    def to_dict(self) -> dict:
        return {"q": self.q, "beta": self.beta}


def eval_poisson(params: KernelParams, t: float) -> float:
    """
    P_{q,β}(t) = Σ_{k≥1} q^k cos(kt - βπ/2) 的闭式

    Args:
        params: 核参数
        t: 弧度

    Returns:
        核函数值
    """
    if not math.isfinite(t):
        raise ParameterError(f"t 必须为有限实数: {t}")
    q = params.q
    r = reduce_angle(t)
    c, s = math.cos(r), math.sin(r)
    den = 1.0 - 2.0 * q * c + q * q
    return (cospi(params.phase_beta / 2) * (q * c - q * q) + sinpi(params.phase_beta / 2) * q * s) / den


def eval_poisson_vec(params: KernelParams, t) -> np.ndarray:
    """eval_poisson 的 numpy 向量化版本"""
    q = params.q
    t = np.asarray(t, dtype=float)
    r = np.remainder(t + np.pi, 2.0 * np.pi) - np.pi
    c, s = np.cos(r), np.sin(r)
    den = 1.0 - 2.0 * q * c + q * q
    return (cospi(params.phase_beta / 2) * (q * c - q * q) + sinpi(params.phase_beta / 2) * q * s) / den


def poisson_series(params: KernelParams, t: float, policy: SeriesPolicy = DEFAULT_POLICY) -> float:
    """直接截断级数形式的 P_{q,β}(t)，作为闭式的校验"""
    q = params.q
    half_beta_pi = params.phase_beta * math.pi / 2

    def term(k):
        return safe_pow(q, k) * math.cos(reduce_angle(k * t) - half_beta_pi)

    def tail(k):
        return safe_pow(q, k + 1) / (1.0 - q)

    return sum_series(term, tail, policy, name="poisson", start=1)


def eval_bernoulli(t: float) -> float:
    """
    Bernoulli 核 B_1(t) = Σ sin(kt)/k 的锯齿闭式

    在 (0, 2π) 上为 (π - t)/2，格点 t ≡ 0 处取主值 0。
    约化余数在 LATTICE_ULPS 个 ulp(|t|) 以内即视为格点。
    """
    r = reduce_angle(t)
    if abs(r) <= LATTICE_ULPS * math.ulp(abs(t)):
        return 0.0
    return (math.copysign(math.pi, r) - r) / 2.0


def bernoulli_series(t: float, terms: int) -> float:
    """B_1 的部分和（收敛很慢，仅作测试参照）"""
    k = np.arange(1, terms + 1, dtype=float)
    return float(np.sum(np.sin(k * t) / k))


def eval_poisson_integrated(
    params: KernelParams, t: float, policy: SeriesPolicy = DEFAULT_POLICY
) -> float:
    """
    P_{q,β,1}(t) = (P_{q,β} * B_1)(t) = Σ_{k≥1} (q^k/k) cos(kt - (β+1)π/2)

    Args:
        params: 核参数
        t: 弧度
        policy: 截断策略

    Returns:
        核函数值
    """
    q = params.q
    phase = (params.phase_beta + 1.0) * math.pi / 2

    def term(k):
        return safe_pow(q, k) / k * math.cos(reduce_angle(k * t) - phase)

    def tail(k):
        return safe_pow(q, k + 1) / ((k + 1) * (1.0 - q))

    return sum_series(term, tail, policy, name="poisson_integrated", start=1)


def eval_poisson_integrated_mp(ctx, q, beta, t):
    """
    在 mpmath 上下文 ctx 中计算 P_{q,β,1}(t)

    使用闭式 P_{q,β,1}(t) = Im(-e^{-iβπ/2} · log(1 - q e^{it}))，
    参数可以是 ctx 的 mpf。
    """
    q = ctx.mpf(q)
    phase = ctx.expjpi(-ctx.mpf(beta) / 2)
    return ctx.im(-phase * ctx.log(1 - q * ctx.expj(t)))


def heat_poisson_direct(q: float, t: float, policy: SeriesPolicy = DEFAULT_POLICY) -> float:
    """𝒫_q(t) = 1/2 + 2 Σ_{j≥1} cos(jt)/(q^j + q^{-j}) 的直接级数"""
    q = validate_q(q)

    def term(j):
        if j == 0:
            return 0.5
        qj = safe_pow(q, j)
        return 2.0 * math.cos(reduce_angle(j * t)) * qj / (1.0 + qj * qj)

    def tail(j):
        return 2.0 * safe_pow(q, j + 1) / (1.0 - q)

    return sum_series(term, tail, policy, name="heat_poisson")


def _sech(x: float) -> float:
    e = math.exp(-abs(x))
    return 2.0 * e / (1.0 + e * e)


def _heat_poisson_dual(q: float, t: float, policy: SeriesPolicy) -> float:
    # Poisson 求和后的对偶级数: 𝒫_q(t) = (π/(2τ)) Σ_m sech(π(t - 2πm)/(2τ))
    tau = -math.log(q)
    a = math.pi / (2.0 * tau)
    r = reduce_angle(t)
    decay = math.exp(-2.0 * a * math.pi)

    def term(m):
        if m == 0:
            return _sech(a * r)
        return _sech(a * (r - 2.0 * math.pi * m)) + _sech(a * (r + 2.0 * math.pi * m))

    def tail(m):
        return 4.0 * math.exp(-a * math.pi * (2 * m + 1)) / (1.0 - decay)

    return a * sum_series(term, tail, policy, name="heat_poisson_dual")


def eval_heat_poisson(q: float, t: float, policy: SeriesPolicy = DEFAULT_POLICY) -> float:
    """
    热传导方程的 Poisson 核 𝒫_q(t)

    τ = ln(1/q) < π 时使用对偶级数（q 接近 1 时最小值极小，直接级数有严重抵消），
    否则使用直接级数。两种形式数学上相等。
    """
    q = validate_q(q)
    if -math.log(q) < math.pi:
        return _heat_poisson_dual(q, t, policy)
    return heat_poisson_direct(q, t, policy)


def convolve_phi_n(
    params: KernelParams, n: int, x: float, policy: SeriesPolicy = DEFAULT_POLICY
) -> float:
    """
    (P_{q,β} * φ_n)(x) = (4/π) Σ_{ν≥0} q^{(2ν+1)n}/(2ν+1) · sin((2ν+1)nx - βπ/2)

    Args:
        params: 核参数
        n: 正整数
        x: 弧度
        policy: 截断策略
    """
    if n < 1:
        raise ParameterError(f"n 必须 ≥ 1: {n}")
    q = params.q
    half_beta_pi = params.phase_beta * math.pi / 2
    q2n = safe_pow(q, 2 * n)

    def term(nu):
        m = 2 * nu + 1
        return safe_pow(q, m * n) / m * math.sin(reduce_angle(m * n * x) - half_beta_pi)

    def tail(nu):
        m = 2 * nu + 3
        return safe_pow(q, m * n) / (m * (1.0 - q2n))

    return 4.0 / math.pi * sum_series(term, tail, policy, name="convolve_phi_n")


def quadrature_convolution(params: KernelParams, n: int, x: float, panels: int = 512) -> float:
    """
    (1/π)∫_0^{2π} P_{q,β}(x - t) φ_n(t) dt 的复合 Simpson 求积

    在 φ_n 的 2n 个常号子区间 [kπ/n, (k+1)π/n] 上分别积分，
    每个子区间 panels 个 Simpson 小段，端点取精确的 kπ/n。
    """
    if n < 1:
        raise ParameterError(f"n 必须 ≥ 1: {n}")
    if panels < 1:
        raise ParameterError(f"panels 必须 ≥ 1: {panels}")
    if panels < 16:
        _logger.debug("panels=%d 小于推荐值 16", panels)
    width = math.pi / n
    steps = 2 * panels
    offsets = np.arange(steps + 1, dtype=float) * (width / steps)
    starts = np.arange(2 * n, dtype=float) * width
    nodes = starts[:, None] + offsets[None, :]
    nodes[:, -1] = starts + width
    signs = np.where(np.arange(2 * n) % 2 == 0, 1.0, -1.0)
    values = eval_poisson_vec(params, x - nodes) * signs[:, None]
    pieces = simpson(values, dx=width / steps, axis=-1)
    return float(math.fsum(pieces)) / math.pi
