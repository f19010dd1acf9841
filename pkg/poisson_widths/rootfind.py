"""
θ 方程求根 - 在 [0,1) 上求 Σ q^{(2ν+1)n} cos((2ν+1)θπ - βπ/2) = 0 的唯一根

级数提出公因子 q^n 后求值（各项为 q^{2νn}·cos(…)），n·ln(1/q) 很大时也不会下溢；
根的位置只依赖于缩放后函数的符号。
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Tuple

from .errors import AmbiguousRoot, NoSignChange, ParameterError, RootNotConverged
from .kernels import KernelParams
from .numeric import DEFAULT_POLICY, SeriesPolicy, cospi, safe_pow, sinpi, sum_series

_logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-12
SCAN_POINTS = 128
# 主导项零点 (β+1)/2 两侧的附加扫描偏移
CANDIDATE_OFFSET = 2.0 ** -10
# 返回的根满足 |缩放残差| ≤ RESIDUAL_FACTOR · tol
RESIDUAL_FACTOR = 10.0


@dataclass(frozen=True)
class ThetaRoot:
    """θ 方程的根及其残差信息"""
    theta: float
    residual: float
    scaled_residual: float
    bracket_width: float
    n: int
    params: KernelParams
    tol: float = field(default=DEFAULT_TOL)

    @property
    def y0(self) -> float:
        """|P_{q,β} * φ_n| 的最大值点 y0 = θπ/n"""
        return self.theta * math.pi / self.n

    def to_dict(self) -> dict:
        return {
            "q": self.params.q,
            "beta": self.params.beta,
            "n": self.n,
            "theta": self.theta,
            "y0": self.y0,
            "residual": self.residual,
            "scaled_residual": self.scaled_residual,
            "bracket_width": self.bracket_width,
            "tol": self.tol,
        }


def _check_n(n: int):
    if int(n) != n or n < 1:
        raise ParameterError(f"n 必须为正整数: {n}")


def _scaled_lhs(params: KernelParams, n: int, theta: float, policy: SeriesPolicy) -> float:
    q2n = safe_pow(params.q, 2 * n)
    half_beta = params.phase_beta / 2

    def term(nu):
        return safe_pow(params.q, 2 * nu * n) * cospi((2 * nu + 1) * theta - half_beta)

    def tail(nu):
        return safe_pow(params.q, 2 * (nu + 1) * n) / (1.0 - q2n)

    return sum_series(term, tail, policy, name="theta_lhs")


def theta_lhs(
    params: KernelParams, n: int, theta: float, policy: SeriesPolicy = DEFAULT_POLICY
) -> Tuple[float, float]:
    """
    θ 方程的左端

    Args:
        params: 核参数
        n: 正整数
        theta: [0,1] 中的点
        policy: 截断策略

    Returns:
        (q^{-n} 缩放后的值, 未缩放的值)
    """
    _check_n(n)
    if not (0.0 <= theta <= 1.0):
        raise ParameterError(f"theta 必须位于 [0,1]: {theta}")
    scaled = _scaled_lhs(params, n, theta, policy)
    return scaled, safe_pow(params.q, n) * scaled


def _scan_points(beta: float) -> List[float]:
    points = {i / SCAN_POINTS for i in range(SCAN_POINTS)}
    candidate = math.fmod((beta + 1.0) / 2.0, 1.0)
    if candidate < 0.0:
        candidate += 1.0
    for p in (candidate - CANDIDATE_OFFSET, candidate, candidate + CANDIDATE_OFFSET):
        p = p % 1.0
        points.add(p)
    return sorted(points)


def solve_theta(
    params: KernelParams, n: int, tol: float = DEFAULT_TOL, policy: SeriesPolicy = DEFAULT_POLICY
) -> ThetaRoot:
    """
    求 θ 方程在 [0,1) 上的唯一根

    先在均匀网格（加上主导项零点附近的候选点）上找变号区间，
    再二分到区间宽度不超过 tol 且缩放残差不超过 tol。

    Args:
        params: 核参数
        n: 正整数
        tol: 二分容差
        policy: 截断策略

    Returns:
        ThetaRoot
    """
    _check_n(n)
    if not tol > 0:
        raise ParameterError(f"tol 必须为正: {tol}")

    def f(x):
        return _scaled_lhs(params, n, x, policy)

    points = _scan_points(params.phase_beta) + [1.0]
    values = [f(p) for p in points]

    zeros = [p for p, v in zip(points[:-1], values[:-1]) if v == 0.0]
    brackets = []
    for i in range(len(points) - 1):
        fa, fb = values[i], values[i + 1]
        if fa != 0.0 and fb != 0.0 and (fa < 0.0) != (fb < 0.0):
            brackets.append((points[i], points[i + 1]))
    _logger.debug("θ 扫描: %d 个精确零点, %d 个变号区间", len(zeros), len(brackets))

    found = len(zeros) + len(brackets)
    if found == 0:
        raise NoSignChange(f"θ 方程在扫描网格上没有变号 (q={params.q}, β={params.beta}, n={n})")
    if found > 1:
        raise AmbiguousRoot([(z, z) for z in zeros] + brackets)

    if zeros:
        theta = zeros[0]
        return ThetaRoot(theta, 0.0, 0.0, 0.0, n, params, tol)

    a, b = brackets[0]
    fa = f(a)
    theta, ftheta = a, fa
    while True:
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            theta, ftheta = mid, f(mid)
            break
        fm = f(mid)
        theta, ftheta = mid, fm
        if fm == 0.0:
            break
        if b - a <= tol and abs(fm) <= tol:
            break
        if (fm < 0.0) == (fa < 0.0):
            a, fa = mid, fm
        else:
            b = mid
    width = b - a
    theta = theta % 1.0
    if abs(ftheta) > RESIDUAL_FACTOR * tol:
        raise RootNotConverged(theta, ftheta, tol)
    return ThetaRoot(
        theta=theta,
        residual=safe_pow(params.q, n) * ftheta,
        scaled_residual=ftheta,
        bracket_width=width,
        n=n,
        params=params,
        tol=tol,
    )


def leading_phase(root: ThetaRoot, policy: SeriesPolicy = DEFAULT_POLICY) -> Tuple[float, float]:
    """
    主导项的 (cos, sin)(θπ - βπ/2)

    cos 由根方程本身给出: cos(θπ - βπ/2) = -Σ_{ν≥1} q^{2νn} cos((2ν+1)θπ - βπ/2)，
    不受 θ 舍入误差的影响。
    """
    params, n, theta = root.params, root.n, root.theta
    q2n = safe_pow(params.q, 2 * n)
    half_beta = params.phase_beta / 2

    def term(nu):
        return safe_pow(params.q, 2 * (nu - 1) * n) * cospi((2 * nu + 1) * theta - half_beta)

    def tail(nu):
        return safe_pow(params.q, 2 * nu * n) / (1.0 - q2n)

    rest = sum_series(term, tail, policy, name="leading_cos", start=1)
    return -q2n * rest, sinpi(theta - half_beta)


def sin_defect_bound(root: ThetaRoot) -> Tuple[float, float]:
    """
    1 - |sin(θπ - βπ/2)| 及其上界 q^{2n}/(1 - q^{2n})

    Returns:
        (缺陷值, 上界)
    """
    q2n = safe_pow(root.params.q, 2 * root.n)
    c, s = leading_phase(root)
    defect = c * c / (1.0 + abs(s))
    return defect, q2n / (1.0 - q2n)
