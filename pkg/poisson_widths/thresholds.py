"""
阈值计算 - 认证不等式 (n_q, n_q*)、n_{q,β} 分段表以及蕴含链谓词

左端关于 n 严格递减、右端与 n 无关，因此最小满足号码可以用
指数扩张 + 二分搜索求得。谓词在对数域中比较；n ≥ 2^50 时改用 mpmath，
保证大 n（q 接近 1 时 n_q* 可达 10^67 量级）下整数阈值仍然精确。
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Union

import mpmath
import networkx as nx
import numpy as np

from .errors import ParameterError
from .kernels import validate_q
from .numeric import safe_pow

_logger = logging.getLogger(__name__)

DEFAULT_CAP = 10_000_000
MIN_N = 9
# 超过该值后对数域谓词改用 mpmath
MP_SWITCH = 2 ** 50
SPLINE_Q_INTEGER = 0.2
SPLINE_Q_FRACTIONAL = 0.196881
# q ≤ 91/250 时 check_umova_z 对所有 n ≥ 9 成立
UNIFORM_Q = 91 / 250


class ThresholdKind(Enum):
    """n_q 使用 lhs_old，n_q* 使用 lhs_new"""
    NQ = "nq"
    NQ_STAR = "nq_star"


@dataclass(frozen=True)
class NotFound:
    """在搜索上限内没有找到满足条件的号码"""
    cap: int

    def to_dict(self) -> dict:
        return {"not_found": True, "cap": self.cap}


@dataclass(frozen=True)
class ThresholdResult:
    """n_q 或 n_q* 的搜索结果；n 为 None 表示 NotFound(cap)"""
    q: float
    kind: ThresholdKind
    n: Optional[int]
    lhs_at_n: float
    rhs: float
    cap: int

    @property
    def found(self) -> bool:
        return self.n is not None

    def as_value(self) -> Union[int, NotFound]:
        return self.n if self.n is not None else NotFound(self.cap)

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "kind": self.kind.value,
            "n": self.n,
            "found": self.found,
            "lhs_at_n": self.lhs_at_n,
            "rhs": self.rhs,
            "cap": self.cap,
        }


# ---------------------------------------------------------------------------
# 条件两端
# ---------------------------------------------------------------------------

def log_rhs_condition(q: float) -> float:
    """rhs_condition 的自然对数"""
    q = validate_q(q)
    first = 0.5 + 2.0 * q / ((1.0 + q * q) * (1.0 - q))
    return math.log(first) + 4.0 / (1.0 - q * q) * (math.log1p(-q) - math.log1p(q))


def rhs_condition(q: float) -> float:
    """
    (1/2 + 2q/((1+q²)(1-q))) · ((1-q)/(1+q))^{4/(1-q²)}

    在对数域中计算，q 接近 1 时不会溢出或提前下溢。
    """
    return math.exp(log_rhs_condition(q))


def _check_n(n: int):
    if int(n) != n or n < MIN_N:
        raise ParameterError(f"n 必须为不小于 {MIN_N} 的整数: {n}")


def lhs_old(q: float, n: int) -> float:
    """n_q 条件的左端: (43/(10(1-q)))q^{√n} + (160/(57(n-√n))) · q/(1-q)²"""
    q = validate_q(q)
    _check_n(n)
    root = math.sqrt(n)
    return 4.3 / (1.0 - q) * safe_pow(q, root) + 160.0 / (57.0 * (n - root)) * q / (1.0 - q) ** 2


def lhs_new(q: float, n: int) -> float:
    """n_q* 条件的左端，第二项取 min{160/(57(n-√n)), 8/(3n-7√n)}"""
    q = validate_q(q)
    _check_n(n)
    root = math.sqrt(n)
    branch = min(160.0 / (57.0 * (n - root)), 8.0 / (3.0 * n - 7.0 * root))
    return 4.3 / (1.0 - q) * safe_pow(q, root) + branch * q / (1.0 - q) ** 2


def branch_crossover() -> int:
    """
    8/(3n-7√n) < 160/(57(n-√n)) 成立的最小 n

    两边交叉乘得 24√n > 664，即 √n > 664/24。
    """
    return math.floor((664 / 24) ** 2) + 1


def _log_lhs_float(q: float, n: int, kind: ThresholdKind) -> float:
    root = math.sqrt(n)
    log_first = math.log(4.3 / (1.0 - q)) + root * math.log(q)
    log_old = math.log(160.0 / 57.0) - math.log(n - root)
    if kind is ThresholdKind.NQ_STAR:
        log_branch = min(log_old, math.log(8.0) - math.log(3.0 * n - 7.0 * root))
    else:
        log_branch = log_old
    log_second = math.log(q) - 2.0 * math.log1p(-q) + log_branch
    return float(np.logaddexp(log_first, log_second))


def _holds_mp(q: float, n: int, kind: ThresholdKind) -> bool:
    ctx = mpmath.MPContext()
    ctx.dps = len(str(n)) + 20
    q_mp = ctx.mpf(q)
    n_mp = ctx.mpf(n)
    root = ctx.sqrt(n_mp)
    first = 43 / (10 * (1 - q_mp)) * ctx.power(q_mp, root)
    branch = 160 / (57 * (n_mp - root))
    if kind is ThresholdKind.NQ_STAR:
        branch = min(branch, 8 / (3 * n_mp - 7 * root))
    lhs = first + branch * q_mp / (1 - q_mp) ** 2
    rhs = (ctx.mpf(1) / 2 + 2 * q_mp / ((1 + q_mp ** 2) * (1 - q_mp))) * ctx.power(
        (1 - q_mp) / (1 + q_mp), 4 / (1 - q_mp ** 2)
    )
    return lhs <= rhs


def condition_holds(q: float, n: int, kind: ThresholdKind) -> bool:
    """n_q 或 n_q* 的条件在 n 处是否成立"""
    q = validate_q(q)
    _check_n(n)
    if n >= MP_SWITCH:
        return _holds_mp(q, n, kind)
    return _log_lhs_float(q, n, kind) <= log_rhs_condition(q)


def _lhs(q: float, n: int, kind: ThresholdKind) -> float:
    if n >= MP_SWITCH:
        return math.exp(_log_lhs_float(q, n, kind))
    return lhs_new(q, n) if kind is ThresholdKind.NQ_STAR else lhs_old(q, n)


# ---------------------------------------------------------------------------
# 阈值搜索
# ---------------------------------------------------------------------------

def find_threshold(q: float, kind: ThresholdKind, cap: int = DEFAULT_CAP) -> ThresholdResult:
    """
    求满足条件的最小 n ≥ 9

    Args:
        q: 0 < q < 1
        kind: NQ 或 NQ_STAR
        cap: 搜索上限（≥ 9）

    Returns:
        ThresholdResult，超出上限时 n 为 None
    """
    q = validate_q(q)
    if cap < MIN_N:
        raise ParameterError(f"cap 必须不小于 {MIN_N}: {cap}")
    rhs = rhs_condition(q)

    def done(n):
        return ThresholdResult(q, kind, n, _lhs(q, n, kind), rhs, cap)

    if condition_holds(q, MIN_N, kind):
        return done(MIN_N)

    lo, hi = MIN_N, min(2 * MIN_N, cap)
    while not condition_holds(q, hi, kind):
        if hi >= cap:
            _logger.warning("%s 搜索在上限 %d 内未找到 (q=%s)", kind.value, cap, q)
            return ThresholdResult(q, kind, None, _lhs(q, cap, kind), rhs, cap)
        lo, hi = hi, min(2 * hi, cap)

    while hi - lo > 1:
        mid = (lo + hi) // 2
        if condition_holds(q, mid, kind):
            hi = mid
        else:
            lo = mid
    _logger.debug("%s(q=%s) = %d", kind.value, q, hi)
    return done(hi)


def spline_q_limit(beta: float) -> float:
    """q(β): 整数 β 取 0.2，否则取 0.196881"""
    if not math.isfinite(beta):
        raise ParameterError(f"beta 必须为有限实数: {beta}")
    return SPLINE_Q_INTEGER if beta == round(beta) else SPLINE_Q_FRACTIONAL


def n_q_beta(q: float, beta: float, cap: int = DEFAULT_CAP) -> Union[int, NotFound]:
    """
    n_{q,β}: q ≤ q(β) 时为 1，否则为 n_q*

    β 的整数性按 β == round(β) 精确判断。
    """
    q = validate_q(q)
    if q <= spline_q_limit(beta):
        return 1
    return find_threshold(q, ThresholdKind.NQ_STAR, cap).as_value()


# ---------------------------------------------------------------------------
# umova_z 条件与蕴含链
# ---------------------------------------------------------------------------

def check_umova_z(q: float, n: int) -> bool:
    """q^n/(1 - q^{2n}) ≤ 7q^{√n}/(37n²)，对数域比较"""
    q = validate_q(q)
    if int(n) != n or n < 1:
        raise ParameterError(f"n 必须为正整数: {n}")
    log_q = math.log(q)
    left = n * log_q - math.log1p(-math.exp(2 * n * log_q))
    right = math.log(7.0 / 37.0) + math.sqrt(n) * log_q - 2.0 * math.log(n)
    return left <= right


def n1_bound(q: float) -> float:
    """Pn1 的右端 (8q/(3(1-q)²))((1+q)/(1-q))³"""
    return 8.0 * q / (3.0 * (1.0 - q) ** 2) * ((1.0 + q) / (1.0 - q)) ** 3


def n2_bound(q: float) -> float:
    """Pn2 的右端 (9(1+q)/(4(1-q)))²"""
    return (9.0 * (1.0 + q) / (4.0 * (1.0 - q))) ** 2


def n1_n2_gap(q: float) -> float:
    """v(q) = Pn1 右端 - Pn2 右端，q > 91/250 时为正"""
    q = validate_q(q)
    return n1_bound(q) - n2_bound(q)


def log_inverse_q_lower_bound(q: float) -> float:
    """2(1-q)/(1+q)，严格小于 ln(1/q)"""
    q = validate_q(q)
    return 2.0 * (1.0 - q) / (1.0 + q)


def implication_graph() -> nx.DiGraph:
    """
    蕴含链 P9 ⇒ Pn1 ⇒ Pn2 ⇒ Pz 的有向图

    每条边带有 q 的适用范围 (q_min, q_max]；q ≤ 91/250 时 Pz 无条件成立，
    用一条 P9 → Pz 的直接边表示。
    """
    graph = nx.DiGraph()
    graph.add_nodes_from(["P9", "Pn1", "Pn2", "Pz"])
    graph.add_edge("P9", "Pn1", q_min=0.0, q_max=1.0, label="P9⇒Pn1")
    graph.add_edge("Pn1", "Pn2", q_min=UNIFORM_Q, q_max=1.0, label="Pn1⇒Pn2")
    graph.add_edge("Pn2", "Pz", q_min=0.0, q_max=1.0, label="Pn2⇒Pz")
    graph.add_edge("P9", "Pz", q_min=0.0, q_max=UNIFORM_Q, label="P9⇒Pz (q≤91/250)")
    return graph


def active_implications(q: float, graph: Optional[nx.DiGraph] = None) -> nx.DiGraph:
    """在给定 q 下适用的蕴含边构成的子图"""
    if graph is None:
        graph = implication_graph()
    edges = [
        (u, v) for u, v, data in graph.edges(data=True)
        if data["q_min"] < q <= data["q_max"]
    ]
    return graph.edge_subgraph(edges).copy()


@dataclass(frozen=True)
class ImplicationReport:
    """一个 (q, n) 点上各谓词的真值及违反的蕴含"""
    q: float
    n: int
    predicates: Dict[str, bool]
    violations: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "n": self.n,
            "predicates": dict(self.predicates),
            "violations": list(self.violations),
            "ok": self.ok,
        }


def implication_suite(q: float, n: int) -> ImplicationReport:
    """
    计算 P9、Pn1、Pn2、Pz 并检查蕴含链

    Args:
        q: 0 < q < 1
        n: ≥ 9

    Returns:
        ImplicationReport，violations 为空表示没有观察到违反
    """
    q = validate_q(q)
    _check_n(n)
    predicates = {
        "P9": condition_holds(q, n, ThresholdKind.NQ_STAR),
        "Pn1": n > n1_bound(q),
        "Pn2": n > n2_bound(q),
        "Pz": check_umova_z(q, n),
    }
    active = active_implications(q)
    violations = [
        data["label"] for u, v, data in active.edges(data=True)
        if predicates[u] and not predicates[v]
    ]
    if (
        active.has_node("P9")
        and active.has_node("Pz")
        and nx.has_path(active, "P9", "Pz")
        and predicates["P9"]
        and not predicates["Pz"]
    ):
        violations.append("P9⇒Pz")
    if violations:
        _logger.warning("q=%s, n=%d 处蕴含被违反: %s", q, n, violations)
    return ImplicationReport(q, n, predicates, violations)


@dataclass(frozen=True)
class UniformCertificate:
    """q ≤ 91/250 时 umova_z 对所有 n ≥ 9 成立的数值证据"""
    xi_at_9: float
    decreasing: bool
    n_max: int

    @property
    def holds(self) -> bool:
        return self.decreasing and self.xi_at_9 < 0.0

    def to_dict(self) -> dict:
        return {
            "xi_at_9": self.xi_at_9,
            "decreasing": self.decreasing,
            "n_max": self.n_max,
            "holds": self.holds,
        }


def xi(n: float) -> float:
    """ξ(n) = (n - √n)ln(91/250) + 2 ln n - ln((7/37)(1 - (91/250)^{18}))"""
    return (
        (n - math.sqrt(n)) * math.log(UNIFORM_Q)
        + 2.0 * math.log(n)
        - math.log(7.0 / 37.0 * (1.0 - UNIFORM_Q ** 18))
    )


def uniform_umova_certificate(n_max: int = 10_000) -> UniformCertificate:
    """检查 ξ 在 9..n_max 上严格递减且 ξ(9) < 0"""
    values = np.array([xi(n) for n in range(MIN_N, n_max + 1)])
    decreasing = bool(np.all(np.diff(values) < 0.0))
    return UniformCertificate(float(values[0]), decreasing, n_max)
