"""
γ 误差预算 - λ、r、R、δ、z、s 以及 γ_1..γ_5，γ 总和界、γ_4 界、δ 界与正性条件的数值认证

所有 λ、r、R 都除去了公因子 q^n/n（缩放量 (n/q^n)·λ_{n-j} 为 O(1) 到适中的量），
γ 的各公式也改写成只出现这些缩放量。任何需要乘以 q^{-n} 的计算都限制在
n·ln(1/q) ≤ 200 的范围内，超出时抛出 RangeUnsupported。
"""

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from .errors import DegenerateSign, ParameterError, RangeUnsupported
from .kernels import KernelParams, eval_heat_poisson, validate_q
from .numeric import DEFAULT_POLICY, SeriesPolicy, cospi, reduce_angle, safe_pow, sinpi, sum_series, sum_series_complex
from .rootfind import DEFAULT_TOL, solve_theta
from .skspline import build_fundamental_spline, derivative_at_midpoints
from .thresholds import check_umova_z, lhs_new, rhs_condition

_logger = logging.getLogger(__name__)

DESK_SCALE_LOG = 200.0
DEGENERATE_SIN = 1e-13


@dataclass(frozen=True)
class ComplexValue:
    """复数值 re + i·im"""
    re: float
    im: float

    @classmethod
    def from_complex(cls, z: complex) -> "ComplexValue":
        return cls(z.real, z.imag)

    def to_complex(self) -> complex:
        return complex(self.re, self.im)

    def __abs__(self) -> float:
        return math.hypot(self.re, self.im)

    @property
    def arg(self) -> float:
        return math.atan2(self.im, self.re)

    def to_dict(self) -> dict:
        return {"re": self.re, "im": self.im}


@dataclass(frozen=True)
class GammaAux:
    """γ 计算的辅助量（全部为缩放量）"""
    delta: Tuple[float, ...]
    R: Tuple[float, ...]
    lambda_abs: Tuple[float, ...]
    r_arg: Tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "delta": list(self.delta),
            "R": list(self.R),
            "lambda_abs": list(self.lambda_abs),
            "r_arg": list(self.r_arg),
        }


@dataclass(frozen=True)
class GammaBreakdown:
    """一个 (n, k, y0) 上的 γ_1..γ_5"""
    gamma: Tuple[float, float, float, float, float]
    s: int
    y0: float
    k: int
    n: int
    params: KernelParams
    aux: GammaAux = field(repr=False)

    @property
    def total(self) -> float:
        return math.fsum(self.gamma)

    @property
    def abs_total(self) -> float:
        return math.fsum(abs(g) for g in self.gamma)

    def to_dict(self) -> dict:
        return {
            "q": self.params.q,
            "beta": self.params.beta,
            "n": self.n,
            "k": self.k,
            "y0": self.y0,
            "s": self.s,
            "gamma": list(self.gamma),
            "sum": self.total,
            "abs_sum": self.abs_total,
            "aux": self.aux.to_dict(),
        }


@dataclass(frozen=True)
class CertificateReport:
    """一个 (q, β, n) 点上完整的认证结果"""
    params: KernelParams
    n: int
    theta: float
    y0: float
    s: int
    sum_bound_premises: bool
    gamma_abs_sum: float
    gamma_sum_bound: float
    gamma4_max: float
    gamma4_bound: float
    delta_ok: bool
    positivity_min: float
    heat_bound: float

    @property
    def sum_bound_holds(self) -> Optional[bool]:
        if not self.sum_bound_premises:
            return None
        return self.gamma_abs_sum <= self.gamma_sum_bound

    @property
    def gamma4_holds(self) -> Optional[bool]:
        if self.n < 9:
            return None
        return self.gamma4_max < self.gamma4_bound

    @property
    def positive(self) -> bool:
        return self.positivity_min >= 0.0

    def to_dict(self) -> dict:
        return {
            "q": self.params.q,
            "beta": self.params.beta,
            "n": self.n,
            "theta": self.theta,
            "y0": self.y0,
            "s": self.s,
            "sum_bound_premises": self.sum_bound_premises,
            "gamma_abs_sum": self.gamma_abs_sum,
            "gamma_sum_bound": self.gamma_sum_bound,
            "sum_bound_holds": self.sum_bound_holds,
            "gamma4_max": self.gamma4_max,
            "gamma4_bound": self.gamma4_bound,
            "gamma4_holds": self.gamma4_holds,
            "delta_ok": self.delta_ok,
            "heat_bound": self.heat_bound,
            "positivity_min": self.positivity_min,
            "positive": self.positive,
        }


def check_envelope(q: float, n: int):
    """n·ln(1/q) ≤ 200，否则抛出 RangeUnsupported"""
    if -n * math.log(q) > DESK_SCALE_LOG:
        raise RangeUnsupported(q, n, DESK_SCALE_LOG)


def _check_args(params: KernelParams, n: int):
    if int(n) != n or n < 1:
        raise ParameterError(f"n 必须为正整数: {n}")
    check_envelope(params.q, n)


def _phase(params: KernelParams, n: int, y0: float) -> float:
    # (n·y0 - βπ/2)/π，以 π 为单位
    return n * y0 / math.pi - params.phase_beta / 2


def compute_s(params: KernelParams, n: int, y0: float) -> int:
    """(-1)^s = sign sin(n·y0 - βπ/2)"""
    value = sinpi(_phase(params, n, y0))
    if abs(value) <= DEGENERATE_SIN:
        raise DegenerateSign(f"sin(n·y0 - βπ/2) = {value:.3e} 过于接近 0")
    return 0 if value > 0.0 else 1


def _main_parts(q: float, n: int, j: int) -> Tuple[float, float]:
    # n q^{-j}/(n-j) 与 n q^j/(n+j)
    return n * safe_pow(q, -j) / (n - j), n * safe_pow(q, j) / (n + j)


def compute_r(
    params: KernelParams, n: int, j: int, y0: float, policy: SeriesPolicy = DEFAULT_POLICY
) -> Tuple[ComplexValue, ComplexValue, ComplexValue]:
    """
    缩放后的 (r^{(1)}, r^{(2)}, r^{(3)})，均乘以 n/q^n

    Args:
        params: 核参数
        n: 正整数
        j: 0 ≤ j ≤ n-1
        y0: 最大值点
        policy: 截断策略
    """
    _check_args(params, n)
    if not (0 <= j <= n - 1):
        raise ParameterError(f"j 必须位于 [0, n-1]: {j}")
    q = params.q
    s = compute_s(params, n, y0)
    sign = 1.0 - 2.0 * s
    q2n = safe_pow(q, 2 * n)
    w = n * y0 / math.pi
    shift = (params.phase_beta + 1.0) / 2

    def term(m):
        # (2m+1)n - j 一族从 m = 1 开始，(2m-1)n + j 一族从 m = 2 开始
        u = (2 * m + 1) * w - shift
        value = n * safe_pow(q, 2 * m * n - j) / ((2 * m + 1) * n - j) * complex(cospi(u), sinpi(u))
        if m >= 2:
            v = (2 * m - 1) * w - shift
            value += n * safe_pow(q, (2 * m - 2) * n + j) / ((2 * m - 1) * n + j) * complex(cospi(v), -sinpi(v))
        return value

    def tail(m):
        return (safe_pow(q, 2 * (m + 1) * n - j) + safe_pow(q, 2 * m * n + j)) / (1.0 - q2n)

    r1 = sum_series_complex(term, tail, policy, name="r1", start=1)
    a, b = _main_parts(q, n, j)
    phase = _phase(params, n, y0)
    cos_phase = cospi(phase)
    r2 = complex(0.0, (b - a) * cos_phase)
    sin_abs = abs(sinpi(phase))
    # |sin| - 1 = -cos²/(1 + |sin|)
    r3 = complex(sign * (a + b) * (-cos_phase * cos_phase / (1.0 + sin_abs)), 0.0)
    return ComplexValue.from_complex(r1), ComplexValue.from_complex(r2), ComplexValue.from_complex(r3)


def _r_total(params, n, j, y0, policy) -> complex:
    r1, r2, r3 = compute_r(params, n, j, y0, policy)
    return r1.to_complex() + r2.to_complex() + r3.to_complex()


def compute_lambda(
    params: KernelParams, n: int, j: int, y0: float, policy: SeriesPolicy = DEFAULT_POLICY
) -> ComplexValue:
    """(n/q^n)·λ_{n-j}(y0) = e^{-ijy0}((-1)^s(n q^{-j}/(n-j) + n q^j/(n+j)) + r_j)"""
    s = compute_s(params, n, y0)
    r = _r_total(params, n, j, y0, policy)
    a, b = _main_parts(params.q, n, j)
    value = cmath.exp(-1j * reduce_angle(j * y0)) * ((1.0 - 2.0 * s) * (a + b) + r)
    return ComplexValue.from_complex(value)


def _excess(c: float, r: complex) -> float:
    # |c + r| - |c|，c 为实数，避免相消
    modulus = abs(c + r)
    return (2.0 * c * r.real + abs(r) ** 2) / (modulus + abs(c))


def compute_R(
    params: KernelParams, n: int, j: int, y0: float, policy: SeriesPolicy = DEFAULT_POLICY
) -> float:
    """(n/q^n)·R_j = |λ̃| - n q^{-j}/(n-j) - n q^j/(n+j)"""
    s = compute_s(params, n, y0)
    a, b = _main_parts(params.q, n, j)
    return _excess((1.0 - 2.0 * s) * (a + b), _r_total(params, n, j, y0, policy))


def compute_delta(
    params: KernelParams, n: int, j: int, y0: float, policy: SeriesPolicy = DEFAULT_POLICY
) -> float:
    """δ_j = (n/q^n)|λ_{n-j}| cos(jπ/2n)/(q^{-j} + q^j) - 1，0 ≤ j ≤ ⌊√n⌋"""
    if not (0 <= j <= math.isqrt(n)):
        raise ParameterError(f"j 必须位于 [0, ⌊√n⌋]: {j}")
    modulus = abs(compute_lambda(params, n, j, y0, policy))
    q = params.q
    return modulus * math.cos(j * math.pi / (2 * n)) / (safe_pow(q, -j) + safe_pow(q, j)) - 1.0


def delta_bound(n: int, j: int) -> float:
    """|δ_j| 的上界 4j/(3(n-j))"""
    return 4.0 * j / (3.0 * (n - j))


@dataclass(frozen=True)
class _LambdaTable:
    s: int
    modulus: List[float]
    r: List[complex]
    R: List[float]
    delta: List[float]


def _lambda_table(params: KernelParams, n: int, y0: float, policy: SeriesPolicy) -> _LambdaTable:
    q = params.q
    s = compute_s(params, n, y0)
    sign = 1.0 - 2.0 * s
    root_n = math.isqrt(n)
    modulus, rs, big_r, delta = [], [], [], []
    for j in range(n):
        r = _r_total(params, n, j, y0, policy)
        a, b = _main_parts(q, n, j)
        c = sign * (a + b)
        mod = abs(c + r)
        modulus.append(mod)
        rs.append(r)
        big_r.append(_excess(c, r))
        if j <= root_n:
            delta.append(mod * math.cos(j * math.pi / (2 * n)) / (safe_pow(q, -j) + safe_pow(q, j)) - 1.0)
    return _LambdaTable(s, modulus, rs, big_r, delta)


def _gammas(params: KernelParams, n: int, k: int, y0: float, table: _LambdaTable, policy: SeriesPolicy):
    q = params.q
    root_n = math.isqrt(n)
    sign = 1.0 - 2.0 * table.s
    theta = reduce_angle(k * math.pi / n - math.pi / (2 * n) - y0)

    def cos_j(j):
        return math.cos(reduce_angle(j * theta))

    def c_j(j):
        return math.cos(j * math.pi / (2 * n))

    g1 = 2.0 * math.fsum(
        cos_j(j) / (table.modulus[j] * c_j(j)) for j in range(root_n + 1, n)
    )

    def z(j):
        rotated = table.r[j] * cmath.exp(1j * reduce_angle(j * theta))
        return rotated.real - sign * table.R[j] * cos_j(j)

    g2 = sign * math.fsum(
        [z(0) / table.modulus[0] ** 2]
        + [2.0 * z(j) / (table.modulus[j] ** 2 * c_j(j)) for j in range(1, n)]
    )
    r0 = table.R[0]
    g3 = -r0 / (2.0 * (2.0 + r0))
    g4 = -2.0 * math.fsum(
        table.delta[j] * cos_j(j) / (table.modulus[j] * c_j(j)) for j in range(1, min(root_n, n - 1) + 1)
    )

    def term(j):
        qj = safe_pow(q, j)
        return cos_j(j) * qj / (1.0 + qj * qj)

    def tail(j):
        return safe_pow(q, j + 1) / (1.0 - q)

    g5 = -2.0 * sum_series(term, tail, policy, name="gamma5", start=root_n + 1)
    return g1, g2, g3, g4, g5


def _breakdown(params, n, k, y0, table, policy) -> GammaBreakdown:
    gamma = _gammas(params, n, k, y0, table, policy)
    aux = GammaAux(
        delta=tuple(table.delta),
        R=tuple(table.R),
        lambda_abs=tuple(table.modulus),
        r_arg=tuple(cmath.phase(r) for r in table.r),
    )
    return GammaBreakdown(gamma, table.s, y0, k, n, params, aux)


def compute_gammas(
    params: KernelParams, n: int, k: int, y0: float, policy: SeriesPolicy = DEFAULT_POLICY
) -> GammaBreakdown:
    """
    导数表示式中的 γ_1..γ_5，t_k = kπ/n - π/(2n)

    Args:
        params: 核参数
        n: 正整数
        k: 1 ≤ k ≤ 2n
        y0: 最大值点 θ_nπ/n
        policy: 截断策略
    """
    _check_args(params, n)
    if not (1 <= k <= 2 * n):
        raise ParameterError(f"k 必须位于 [1, 2n]: {k}")
    table = _lambda_table(params, n, y0, policy)
    return _breakdown(params, n, k, y0, table, policy)


def all_gammas(
    params: KernelParams, n: int, y0: float, policy: SeriesPolicy = DEFAULT_POLICY
) -> List[GammaBreakdown]:
    """k = 1..2n 的全部 γ 分解，λ 表只计算一次"""
    _check_args(params, n)
    table = _lambda_table(params, n, y0, policy)
    return [_breakdown(params, n, k, y0, table, policy) for k in range(1, 2 * n + 1)]


def heat_lower_bound(q: float) -> float:
    """𝒫_q(x) 的下界，与 thresholds.rhs_condition 为同一表达式"""
    return rhs_condition(q)


def gamma_sum_bound(q: float, n: int) -> float:
    """Σ|γ_i| 的上界，即 n_q* 条件的左端"""
    return lhs_new(q, n)


def gamma4_bound(q: float, n: int) -> float:
    """(8/(3n - 7√n)) · q/(1-q)²"""
    q = validate_q(q)
    return 8.0 / (3.0 * n - 7.0 * math.sqrt(n)) * q / (1.0 - q) ** 2


def _y0(params: KernelParams, n: int, tol: float) -> Tuple[float, float]:
    root = solve_theta(params, n, tol)
    return root.theta, root.y0


def check_positivity(params: KernelParams, n: int, k: int, tol: float = DEFAULT_TOL) -> bool:
    """heat_lower_bound(q) + Σγ_i(k, y0) ≥ 0"""
    _check_args(params, n)
    _, y0 = _y0(params, n, tol)
    breakdown = compute_gammas(params, n, k, y0)
    return heat_lower_bound(params.q) + breakdown.total >= 0.0


def representation_residual(params: KernelParams, n: int, k: int, tol: float = DEFAULT_TOL) -> float:
    """
    样条导数与 γ 表示式之间的相对差

    D_formula = (-1)^{k+s+1}·π/(4nq^n)·(𝒫_q(t_k - y0) + Σγ)，
    表示式的 t_k = kπ/n - π/(2n) 对应 derivative_at_midpoints 中下标 k-1 的中点。
    """
    _check_args(params, n)
    if not (1 <= k <= 2 * n):
        raise ParameterError(f"k 必须位于 [1, 2n]: {k}")
    _, y0 = _y0(params, n, tol)
    sol = build_fundamental_spline(params, n, y0)
    spline_value = float(derivative_at_midpoints(sol)[k - 1])
    breakdown = compute_gammas(params, n, k, y0)
    return _relative_gap(spline_value, _formula_value(params, n, k, y0, breakdown))


def _formula_value(params, n, k, y0, breakdown: GammaBreakdown) -> float:
    t_k = k * math.pi / n - math.pi / (2 * n)
    sign = -1.0 if (k + breakdown.s + 1) % 2 else 1.0
    scale = math.pi / (4.0 * n * safe_pow(params.q, n))
    return sign * scale * (eval_heat_poisson(params.q, t_k - y0) + breakdown.total)


def _relative_gap(a: float, b: float) -> float:
    denom = max(abs(a), abs(b))
    if denom == 0.0:
        return 0.0
    return abs(a - b) / denom


def certify_point(params: KernelParams, n: int, tol: float = DEFAULT_TOL) -> CertificateReport:
    """
    在一个 (q, β, n) 点上运行完整的认证

    包括: 范围检查、θ_n、s、所有 k 的 γ 分解、γ 总和界、γ_4 界、δ 界与正性。
    """
    _check_args(params, n)
    theta, y0 = _y0(params, n, tol)
    breakdowns = all_gammas(params, n, y0)
    q = params.q
    heat = heat_lower_bound(q)
    premises = n >= 9 and check_umova_z(q, n)
    bound = gamma_sum_bound(q, n) if n >= 9 else math.inf
    g4_bound = gamma4_bound(q, n) if n >= 9 else math.inf
    deltas = breakdowns[0].aux.delta
    delta_ok = all(abs(deltas[j]) <= delta_bound(n, j) for j in range(1, len(deltas)) if j < n)
    report = CertificateReport(
        params=params,
        n=n,
        theta=theta,
        y0=y0,
        s=breakdowns[0].s,
        sum_bound_premises=premises,
        gamma_abs_sum=max(b.abs_total for b in breakdowns),
        gamma_sum_bound=bound,
        gamma4_max=max(abs(b.gamma[3]) for b in breakdowns),
        gamma4_bound=g4_bound,
        delta_ok=delta_ok,
        positivity_min=min(heat + b.total for b in breakdowns),
        heat_bound=heat,
    )
    _logger.debug("certify q=%s β=%s n=%d: %s", q, params.beta, n, report.to_dict())
    return report
