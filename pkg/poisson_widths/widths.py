"""
宽度计算 - 最佳逼近值、Kolmogorov 宽度及其渐近分解

所有宽度值以因子形式 value = q^n · m 计算，m 单独保存，
因此 q^n 在 binary64 中下溢时报告依然有意义（log_value 字段）。
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

from .errors import ParameterError, UnderflowError
from .kernels import KernelParams
from .numeric import DEFAULT_POLICY, SeriesPolicy, safe_pow, sinpi, sum_series
from .rootfind import DEFAULT_TOL, ThetaRoot, leading_phase, solve_theta
from .thresholds import DEFAULT_CAP, NotFound, n_q_beta, spline_q_limit

_logger = logging.getLogger(__name__)

FOUR_OVER_PI = 4.0 / math.pi
GAMMA_BOUND = 16.0 / (3.0 * math.pi)
# q^n 可表示的上限 n·ln(1/q)
UNDERFLOW_LOG = 700.0

__all__ = [
    "WidthReport",
    "best_approx_factored",
    "best_approx_value",
    "width_report",
    "width_by_dimension",
    "asymptotic_gamma",
    "asymptotic_width",
    "two_sided_bounds",
    "spline_q_limit",
    "GAMMA_BOUND",
]


@dataclass(frozen=True)
class WidthReport:
    """
    宽度报告

    value 是 d_{2n}(C^q_{β,∞}, C)、d_{2n-1}(C^q_{β,∞}, C)、d_{2n-1}(C^q_{β,1}, L)
    以及两种范数下 E_n 的公共值；只有 certified 为 True 时等式才被断言。
    certified 为 None 表示 n_{q,β} 的搜索超出上限而 n 又大于该上限。
    """
    value: float
    log_value: float
    m_factor: float
    theta: ThetaRoot
    n: int
    params: KernelParams
    certified: Optional[bool]
    threshold: Optional[int]

    @property
    def dimensions(self) -> Tuple[int, int]:
        return 2 * self.n - 1, 2 * self.n

    def to_dict(self) -> dict:
        if self.certified is None:
            certified = "unknown"
        else:
            certified = self.certified
        return {
            "q": self.params.q,
            "beta": self.params.beta,
            "n": self.n,
            "dimensions": list(self.dimensions),
            "theta": self.theta.theta,
            "value": self.value,
            "log_value": self.log_value,
            "m_factor": self.m_factor,
            "certified": certified,
            "n_q_beta": self.threshold,
        }


def _check_n(n: int):
    if int(n) != n or n < 1:
        raise ParameterError(f"n 必须为正整数: {n}")


def _factored_sum(root: ThetaRoot, policy: SeriesPolicy) -> float:
    # Σ q^{2νn}/(2ν+1) · sin((2ν+1)θπ - βπ/2)
    params, n = root.params, root.n
    q2n = safe_pow(params.q, 2 * n)
    half_beta = params.phase_beta / 2

    def term(nu):
        m = 2 * nu + 1
        return safe_pow(params.q, 2 * nu * n) / m * sinpi(m * root.theta - half_beta)

    def tail(nu):
        return safe_pow(params.q, 2 * (nu + 1) * n) / ((2 * nu + 3) * (1.0 - q2n))

    return sum_series(term, tail, policy, name="best_approx")


def best_approx_factored(
    params: KernelParams,
    n: int,
    policy: SeriesPolicy = DEFAULT_POLICY,
    tol: float = DEFAULT_TOL,
    root: Optional[ThetaRoot] = None,
) -> Tuple[float, float]:
    """
    最佳逼近值的因子形式

    Returns:
        (log q^n, m)，其中 value = q^n · m
    """
    _check_n(n)
    if root is None:
        root = solve_theta(params, n, tol, policy)
    m = FOUR_OVER_PI * abs(_factored_sum(root, policy))
    return n * math.log(params.q), m


def best_approx_value(
    params: KernelParams,
    n: int,
    policy: SeriesPolicy = DEFAULT_POLICY,
    tol: float = DEFAULT_TOL,
    root: Optional[ThetaRoot] = None,
) -> float:
    """
    ‖P_{q,β} * φ_n‖_C = (4/π)|Σ q^{(2ν+1)n}/(2ν+1) · sin((2ν+1)θ_nπ - βπ/2)|

    q^n 下溢时返回 0.0，对数值见 best_approx_factored。

    Args:
        params: 核参数
        n: 正整数
        policy: 截断策略
        tol: θ 的求根容差
        root: 已求得的 θ_n（可选）
    """
    log_qn, m = best_approx_factored(params, n, policy, tol, root)
    if log_qn < -745.0:
        _logger.debug("q^n 下溢 (log q^n = %.3f)，返回 0", log_qn)
        return 0.0
    return math.exp(log_qn) * m


def width_report(
    params: KernelParams,
    n: int,
    cap: int = DEFAULT_CAP,
    tol: float = DEFAULT_TOL,
    policy: SeriesPolicy = DEFAULT_POLICY,
) -> WidthReport:
    """
    n 对应的宽度报告，n ≥ n_{q,β} 时 certified 为 True

    Args:
        params: 核参数
        n: 正整数
        cap: n_{q,β} 搜索上限
        tol: θ 的求根容差
        policy: 截断策略
    """
    _check_n(n)
    root = solve_theta(params, n, tol, policy)
    log_qn, m = best_approx_factored(params, n, policy, tol, root)
    value = 0.0 if log_qn < -745.0 else math.exp(log_qn) * m
    log_value = log_qn + math.log(m) if m > 0.0 else -math.inf

    threshold = n_q_beta(params.q, params.beta, cap)
    if isinstance(threshold, NotFound):
        certified = False if n <= threshold.cap else None
        threshold_n = None
        if certified is None:
            _logger.warning("n_{q,β} 超出搜索上限 %d，q=%s 的认证状态未知", cap, params.q)
    else:
        certified = n >= threshold
        threshold_n = threshold

    return WidthReport(
        value=value,
        log_value=log_value,
        m_factor=m,
        theta=root,
        n=n,
        params=params,
        certified=certified,
        threshold=threshold_n,
    )


def width_by_dimension(params: KernelParams, m: int, cap: int = DEFAULT_CAP) -> WidthReport:
    """d_m(C^q_{β,∞}, C)，按 d_{2n} = d_{2n-1} 取 n = ⌈m/2⌉"""
    if int(m) != m or m < 1:
        raise ParameterError(f"维数 m 必须为正整数: {m}")
    return width_report(params, (m + 1) // 2, cap)


def _check_representable(params: KernelParams, n: int):
    if -n * math.log(params.q) >= UNDERFLOW_LOG:
        raise UnderflowError(f"q^n 不可表示 (q={params.q}, n={n})")


def asymptotic_gamma(
    params: KernelParams, n: int, policy: SeriesPolicy = DEFAULT_POLICY, tol: float = DEFAULT_TOL
) -> float:
    """
    γ_n = (value/q^n - 4/π)(1 - q^{2n})/q^{2n}

    直接相减有严重抵消，这里把 |S| - 1 写成
    -cos²/(1 + |sin|) + sign(sin)·(尾项/q^{2n})，cos 取自根方程。
    """
    _check_n(n)
    _check_representable(params, n)
    root = solve_theta(params, n, tol, policy)
    q2n = safe_pow(params.q, 2 * n)
    cos0, sin0 = leading_phase(root, policy)
    half_beta = params.phase_beta / 2

    def term(nu):
        m = 2 * nu + 1
        return safe_pow(params.q, 2 * (nu - 1) * n) / m * sinpi(m * root.theta - half_beta)

    def tail(nu):
        return safe_pow(params.q, 2 * nu * n) / ((2 * nu + 3) * (1.0 - q2n))

    rest = sum_series(term, tail, policy, name="gamma_tail", start=1)
    total = sin0 + q2n * rest
    if total * sin0 > 0.0:
        scaled_cos = cos0 / q2n if q2n > 0.0 else 0.0
        excess = -q2n * scaled_cos * scaled_cos / (1.0 + abs(sin0)) + (rest if sin0 > 0.0 else -rest)
    else:
        # 尾项盖过主导项，只在 q^{2n} 不小时发生
        excess = (abs(total) - 1.0) / q2n
    return FOUR_OVER_PI * excess * (1.0 - q2n)


def asymptotic_width(
    params: KernelParams, n: int, policy: SeriesPolicy = DEFAULT_POLICY, tol: float = DEFAULT_TOL
) -> float:
    """q^n (4/π + γ_n q^{2n}/(1 - q^{2n}))"""
    gamma = asymptotic_gamma(params, n, policy, tol)
    qn = safe_pow(params.q, n)
    q2n = qn * qn
    return qn * (FOUR_OVER_PI + gamma * q2n / (1.0 - q2n))


def two_sided_bounds(params: KernelParams, n: int) -> Tuple[float, float]:
    """
    (π/4)·value 的双侧界

    Returns:
        (q^n(1 - (4/3)ρ), q^n(1 + (4/3)ρ))，ρ = q^{2n}/(1 - q^{2n})
    """
    _check_n(n)
    _check_representable(params, n)
    qn = safe_pow(params.q, n)
    rho = qn * qn / (1.0 - qn * qn)
    return qn * (1.0 - 4.0 / 3.0 * rho), qn * (1.0 + 4.0 / 3.0 * rho)
