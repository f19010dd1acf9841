"""
基本 SK 样条 - 插值线性方程组的求解与 C_{y,2n} 符号条件的检验

方程组的条件数约为 n²q^{1-n}，在 binary64 中残差无法满足要求，
因此在独立的 mpmath 上下文中组装并求解（精度随 n·log10(1/q) 增长），
输出再舍入到 binary64。每次调用创建自己的上下文，可以在线程间并行。
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import mpmath
import numpy as np

from .errors import ParameterError, SplineNotUnique
from .kernels import KernelParams, eval_poisson_integrated_mp
from .rootfind import DEFAULT_TOL, solve_theta

_logger = logging.getLogger(__name__)

BASE_DPS = 30
DEFAULT_ZERO_TOL = 1e-8
# cond · eps 超过该值视为数值奇异
SINGULAR_LEVEL = 1e-13


@dataclass(frozen=True)
class SplineSolution:
    """
    基本 SK 样条 α_0 + Σ_{k=1}^{2n} α_k P_{q,β,1}(· - x_k) 的系数

    alpha 为 binary64 副本；高精度系数保存在 alpha_mp 中，供求值使用。
    """
    alpha: np.ndarray
    n: int
    y: float
    params: KernelParams
    interp_residual: float
    sum_residual: float
    condition_estimate: float
    dps: int
    alpha_mp: Tuple = field(default=(), repr=False, compare=False)

    def to_dict(self) -> dict:
        return {
            "q": self.params.q,
            "beta": self.params.beta,
            "n": self.n,
            "y": self.y,
            "alpha": [float(a) for a in self.alpha],
            "interp_residual": self.interp_residual,
            "sum_residual": self.sum_residual,
            "condition_estimate": self.condition_estimate,
            "dps": self.dps,
        }


@dataclass(frozen=True)
class SignPattern:
    """中点处 (q,β)-导数的符号以及 C_{y,2n} 条件的判定"""
    signs: Tuple[int, ...]
    epsilon: int
    e: Tuple[int, ...]
    conforms: bool
    zero_tolerance: float
    values: Tuple[float, ...] = field(default=(), repr=False)

    def to_dict(self) -> dict:
        return {
            "signs": list(self.signs),
            "epsilon": self.epsilon,
            "e": list(self.e),
            "conforms": self.conforms,
            "zero_tolerance": self.zero_tolerance,
            "values": list(self.values),
        }


def working_dps(q: float, n: int) -> int:
    """求解使用的十进制位数 30 + 2·⌈n·log10(1/q)⌉"""
    return BASE_DPS + 2 * math.ceil(-n * math.log10(q))


def _context(dps: int):
    ctx = mpmath.MPContext()
    ctx.dps = dps
    return ctx


def build_fundamental_spline(params: KernelParams, n: int, y: float) -> SplineSolution:
    """
    求解基本 SK 样条的 (2n+1)×(2n+1) 插值方程组

    行 k = 0..2n-1: α_0 + Σ_j α_j P_{q,β,1}(y_k - x_j) = δ_{0,k}，
    最后一行: Σ_j α_j = 0，其中 x_j = jπ/n，y_k = x_k + y。

    Args:
        params: 核参数
        n: 正整数
        y: [0, π/n) 中的平移

    Returns:
        SplineSolution

    Raises:
        SplineNotUnique: 方程组在工作精度下数值奇异
    """
    if int(n) != n or n < 1:
        raise ParameterError(f"n 必须为正整数: {n}")
    if not (0.0 <= y < math.pi / n):
        raise ParameterError(f"y 必须位于 [0, π/n): {y}")

    dps = working_dps(params.q, n)
    ctx = _context(dps)
    size = 2 * n + 1
    step = ctx.pi / n
    y_mp = ctx.mpf(y)
    # P_{q,β,1}(y_k - x_j) 只依赖于 (k - j) mod 2n
    column = [eval_poisson_integrated_mp(ctx, params.q, params.phase_beta, y_mp + m * step) for m in range(2 * n)]

    matrix = ctx.zeros(size, size)
    for k in range(2 * n):
        matrix[k, 0] = 1
        for j in range(1, 2 * n + 1):
            matrix[k, j] = column[(k - j) % (2 * n)]
    for j in range(1, 2 * n + 1):
        matrix[2 * n, j] = 1

    try:
        inverse = ctx.inverse(matrix)
    except ZeroDivisionError as e:
        raise SplineNotUnique(f"SK 样条方程组奇异 (q={params.q}, β={params.beta}, n={n}, y={y})") from e
    cond = ctx.mnorm(matrix, 1) * ctx.mnorm(inverse, 1)
    if cond * ctx.eps > SINGULAR_LEVEL:
        raise SplineNotUnique(
            f"SK 样条方程组数值奇异 (cond≈{float(cond):.3e}, q={params.q}, β={params.beta}, n={n}, y={y})"
        )

    # 右端为 e_0，解即逆矩阵第一列
    alpha_mp = tuple(inverse[i, 0] for i in range(size))
    residual = ctx.zero
    for k in range(2 * n):
        value = alpha_mp[0] + ctx.fsum(alpha_mp[j] * column[(k - j) % (2 * n)] for j in range(1, size))
        residual = max(residual, abs(value - (1 if k == 0 else 0)))
    total = ctx.fsum(alpha_mp[1:])
    _logger.debug("SK 样条 n=%d: dps=%d, cond≈%.3e", n, dps, float(cond))

    return SplineSolution(
        alpha=np.array([float(a) for a in alpha_mp]),
        n=n,
        y=y,
        params=params,
        interp_residual=float(residual),
        sum_residual=float(abs(total)),
        condition_estimate=float(cond),
        dps=dps,
        alpha_mp=alpha_mp,
    )


def spline_eval(sol: SplineSolution, t: float) -> float:
    """α_0 + Σ α_k P_{q,β,1}(t - x_k)"""
    ctx = _context(sol.dps)
    step = ctx.pi / sol.n
    t_mp = ctx.mpf(t)
    terms = (
        sol.alpha_mp[j] * eval_poisson_integrated_mp(ctx, sol.params.q, sol.params.phase_beta, t_mp - j * step)
        for j in range(1, 2 * sol.n + 1)
    )
    return float(sol.alpha_mp[0] + ctx.fsum(terms))


def _bernoulli_mp(ctx, r):
    # 锯齿 B_1，r 先约化到 [0, 2π)
    r = ctx.fmod(r, 2 * ctx.pi)
    if r < 0:
        r += 2 * ctx.pi
    if r == 0:
        return ctx.zero
    return (ctx.pi - r) / 2


def spline_derivative(sol: SplineSolution, t: float) -> float:
    """任意点处的 (q,β)-导数 Σ α_k B_1(t - x_k)"""
    ctx = _context(sol.dps)
    step = ctx.pi / sol.n
    t_mp = ctx.mpf(t)
    return float(ctx.fsum(sol.alpha_mp[j] * _bernoulli_mp(ctx, t_mp - j * step) for j in range(1, 2 * sol.n + 1)))


def derivative_at_midpoints(sol: SplineSolution) -> np.ndarray:
    """
    区间 (x_k, x_{k+1}) 中点 t_k = (k + 1/2)π/n 处的导数值，k = 0..2n-1

    由 Σα_k = 0，导数在每个区间上为常数。
    """
    n = sol.n
    ctx = _context(sol.dps)
    step = ctx.pi / n
    values = []
    for k in range(2 * n):
        # t_k - x_j = (k - j + 1/2)π/n，约化到 (0, 2π)
        terms = (
            sol.alpha_mp[j] * (ctx.pi - ((k - j) % (2 * n) + ctx.mpf(0.5)) * step) / 2
            for j in range(1, 2 * n + 1)
        )
        values.append(float(ctx.fsum(terms)))
    return np.array(values)


def classify_signs(values: np.ndarray, zero_tol: float = DEFAULT_ZERO_TOL) -> SignPattern:
    """
    按 (-1)^k ε e_k 判定符号序列

    |d_k| ≤ zero_tol·max|d| 记为 0（e_k = 0），ε 由第一个非零值确定。
    """
    values = np.asarray(values, dtype=float)
    scale = float(np.max(np.abs(values))) if values.size else 0.0
    signs = np.where(np.abs(values) <= zero_tol * scale, 0, np.sign(values)).astype(int)
    parity = np.where(np.arange(values.size) % 2 == 0, 1, -1)
    nonzero = np.flatnonzero(signs)
    if nonzero.size == 0:
        epsilon, conforms = 1, False
    else:
        epsilon = int(signs[nonzero[0]] * parity[nonzero[0]])
        conforms = bool(np.all(signs[nonzero] == epsilon * parity[nonzero]))
    return SignPattern(
        signs=tuple(int(s) for s in signs),
        epsilon=epsilon,
        e=tuple(int(s != 0) for s in signs),
        conforms=conforms,
        zero_tolerance=zero_tol,
        values=tuple(float(v) for v in values),
    )


def check_Cy2n(
    params: KernelParams,
    n: int,
    y: Optional[float] = None,
    zero_tol: float = DEFAULT_ZERO_TOL,
    tol: float = DEFAULT_TOL,
) -> SignPattern:
    """
    检验 P_{q,β} ∈ C_{y,2n}

    Args:
        params: 核参数
        n: 正整数
        y: 平移，缺省时取 y0 = θ_nπ/n
        zero_tol: 判零的相对容差
        tol: 求 θ_n 的容差

    Returns:
        SignPattern
    """
    if y is None:
        y = solve_theta(params, n, tol).y0
    sol = build_fundamental_spline(params, n, y)
    return classify_signs(derivative_at_midpoints(sol), zero_tol)
