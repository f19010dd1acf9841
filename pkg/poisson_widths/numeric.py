"""
数值基础工具 - 级数截断策略、角度约化、补偿求和

所有级数都按"相对尾项"准则截断：在加入第 k 项后，若剩余尾项的上界
不超过 rel_tol × (已累加项的绝对值之和 + 最小正规数)，则停止。
累加使用 math.fsum（Shewchuk 无误差变换），结果与求和顺序无关。
"""

import logging
import math
import sys
from dataclasses import dataclass
from typing import Callable

import mpmath

from .errors import ParameterError, TruncationError

_logger = logging.getLogger(__name__)

TINY = sys.float_info.min

# 2π 的三段 Cody-Waite 拆分：_TWO_PI_1 只保留 33 位有效数字，k·_TWO_PI_1 精确
_TWO_PI_1 = math.ldexp(math.floor(math.ldexp(2.0 * math.pi, 30)), -30)
_TWO_PI_2 = 2.0 * math.pi - _TWO_PI_1
_TWO_PI_3 = 2.4492935982947064e-16
# k < 2^20 时 k·_TWO_PI_1 精确；更大的 |t| 改用 mpmath 约化
_SPLIT_LIMIT = math.ldexp(2.0 * math.pi, 20)


@dataclass(frozen=True)
class SeriesPolicy:
    """级数截断策略"""
    rel_tol: float = 1e-16
    max_terms: int = 1_000_000

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ParameterError(f"rel_tol 必须为正: {self.rel_tol}")
        if self.max_terms < 1:
            raise ParameterError(f"max_terms 必须为正整数: {self.max_terms}")

    def to_dict(self) -> dict:
        return {"rel_tol": self.rel_tol, "max_terms": self.max_terms}


DEFAULT_POLICY = SeriesPolicy()


def reduce_angle(t: float) -> float:
    """
    将弧度 t 约化到 (-π, π]

    |t| < 2^20·2π 时用三段常数约化，避免 t - 2πk 的抵消误差；
    更大的 |t| 在 mpmath 中按 log10|t| 加宽精度约化。
    """
    if -math.pi < t <= math.pi:
        return t
    if abs(t) >= _SPLIT_LIMIT:
        r = _reduce_mp(t)
    else:
        k = round(t / (2.0 * math.pi))
        r = ((t - k * _TWO_PI_1) - k * _TWO_PI_2) - k * _TWO_PI_3
    if r <= -math.pi:
        r += 2.0 * math.pi
    elif r > math.pi:
        r -= 2.0 * math.pi
    return r


def _reduce_mp(t: float) -> float:
    ctx = mpmath.MPContext()
    ctx.dps = 30 + int(math.log10(abs(t)))
    x = ctx.mpf(t)
    two_pi = 2 * ctx.pi
    return float(x - ctx.nint(x / two_pi) * two_pi)


def _mod2(u: float) -> float:
    r = math.fmod(u, 2.0)
    if r < 0.0:
        r += 2.0
    return r


def cospi(u: float) -> float:
    """cos(πu)，在半整数点精确为 0"""
    r = _mod2(u)
    if r == 0.5 or r == 1.5:
        return 0.0
    if r == 0.0:
        return 1.0
    if r == 1.0:
        return -1.0
    return math.cos(math.pi * r)


def sinpi(u: float) -> float:
    """sin(πu)，在整数点精确为 0"""
    r = _mod2(u)
    if r == 0.0 or r == 1.0:
        return 0.0
    if r == 0.5:
        return 1.0
    if r == 1.5:
        return -1.0
    return math.sin(math.pi * r)


def sum_series(
    term: Callable[[int], float],
    tail_bound: Callable[[int], float],
    policy: SeriesPolicy = DEFAULT_POLICY,
    name: str = "series",
    start: int = 0,
) -> float:
    """
    按截断策略对实级数求和

    Args:
        term: 第 k 项
        tail_bound: 加入第 k 项后剩余尾项绝对值的上界
        policy: 截断策略
        name: 级数名称（用于错误信息与日志）
        start: 起始下标

    Returns:
        补偿求和的结果
    """
    terms = []
    magnitude = 0.0
    for k in range(start, start + policy.max_terms):
        value = term(k)
        terms.append(value)
        magnitude += abs(value)
        if tail_bound(k) <= policy.rel_tol * (magnitude + TINY):
            _logger.debug("%s 截断于 %d 项", name, len(terms))
            return math.fsum(terms)
    raise TruncationError(name, policy.max_terms)


def sum_series_complex(
    term: Callable[[int], complex],
    tail_bound: Callable[[int], float],
    policy: SeriesPolicy = DEFAULT_POLICY,
    name: str = "series",
    start: int = 0,
) -> complex:
    """复级数版本的 sum_series，实部与虚部分别补偿求和"""
    re_terms = []
    im_terms = []
    magnitude = 0.0
    for k in range(start, start + policy.max_terms):
        value = term(k)
        re_terms.append(value.real)
        im_terms.append(value.imag)
        magnitude += abs(value)
        if tail_bound(k) <= policy.rel_tol * (magnitude + TINY):
            _logger.debug("%s 截断于 %d 项", name, len(re_terms))
            return complex(math.fsum(re_terms), math.fsum(im_terms))
    raise TruncationError(name, policy.max_terms)


def safe_pow(q: float, e: float) -> float:
    """q^e，下溢时返回 0.0 而不是抛出异常"""
    x = e * math.log(q)
    if x < -745.0:
        return 0.0
    return math.exp(x)
