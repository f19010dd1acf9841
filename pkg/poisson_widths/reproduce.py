"""
固定复现实验 - 阈值、分情形表、D3 行列式、平凡根以及渐近界扫描
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, List, Tuple

import click

from .cvd import counterexample_report
from .errors import PoissonWidthsError
from .kernels import KernelParams
from .report import Colors
from .rootfind import solve_theta
from .thresholds import ThresholdKind, find_threshold, implication_suite, n_q_beta, uniform_umova_certificate
from .widths import GAMMA_BOUND, asymptotic_gamma, best_approx_value, two_sided_bounds, width_report

_logger = logging.getLogger(__name__)

TRIVIAL_Q = tuple(round(0.1 * i, 1) for i in range(1, 10))
TRIVIAL_N = tuple(range(1, 33))
ASYMPTOTIC_Q = (0.1, 0.15, 0.19)
ASYMPTOTIC_BETA = (0.0, 0.5, 1.0, 1.7)
BRACKET_SLACK = 1e-12


@dataclass(frozen=True)
class CheckResult:
    """一项复现检查的结果"""
    name: str
    expected: Any
    actual: Any
    passed: bool

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "expected": self.expected,
            "actual": self.actual,
            "passed": self.passed,
        }


def _equal(name: str, expected: Any, actual: Any) -> CheckResult:
    return CheckResult(name, expected, actual, expected == actual)


def check_nq() -> CheckResult:
    return _equal("n_q(0.5)", 969, find_threshold(0.5, ThresholdKind.NQ).n)


def check_nq_star() -> CheckResult:
    return _equal("n_q*(0.5)", 963, find_threshold(0.5, ThresholdKind.NQ_STAR).n)


def check_case_table() -> CheckResult:
    """n_{q,β} 分情形表的几个点"""
    actual = {
        "n_q_beta(0.2, 3)": n_q_beta(0.2, 3.0),
        "certified(0.15, 0, 1)": width_report(KernelParams(0.15, 0.0), 1).certified,
        "certified(0.197, 0.5, 1)": width_report(KernelParams(0.197, 0.5), 1).certified,
        "certified(0.5, 0, 963)": width_report(KernelParams(0.5, 0.0), 963).certified,
        "certified(0.5, 0, 962)": width_report(KernelParams(0.5, 0.0), 962).certified,
    }
    expected = {
        "n_q_beta(0.2, 3)": 1,
        "certified(0.15, 0, 1)": True,
        "certified(0.197, 0.5, 1)": False,
        "certified(0.5, 0, 963)": True,
        "certified(0.5, 0, 962)": False,
    }
    return _equal("n_{q,β} 分情形表", expected, actual)


def _determinant_check(beta: float) -> CheckResult:
    report = counterexample_report(0.21, beta)
    lower, upper = report.reference_bounds()
    documented = report.reproduced_first()
    expected = {"first_below": lower, "second_above": upper, "not_cvd": True}
    if documented is not None:
        expected = {"first": documented, "second_above": upper, "not_cvd": True}
    return CheckResult(
        name=f"D3 符号 (q0=0.21, β={beta:g})",
        expected=expected,
        actual={
            "first": report.first.value,
            "second": report.second.value,
            "not_cvd": report.not_cvd,
            "reference_bound_met": report.reference_bound_met(),
        },
        passed=bool(report.matches_reference()) and report.not_cvd,
    )


def check_determinants_beta0() -> CheckResult:
    return _determinant_check(0.0)


def check_determinants_beta1() -> CheckResult:
    return _determinant_check(1.0)


def check_trivial_roots() -> CheckResult:
    """β = 0 时 θ = 1/2，β = 1 时 θ = 0，且宽度为 (4/π)arctan(q^n) 与 (4/π)artanh(q^n)"""
    worst_theta = 0.0
    worst_value = 0.0
    for q in TRIVIAL_Q:
        for n in TRIVIAL_N:
            qn = q ** n
            for beta, theta, closed in ((0.0, 0.5, math.atan(qn)), (1.0, 0.0, math.atanh(qn))):
                params = KernelParams(q, beta)
                worst_theta = max(worst_theta, abs(solve_theta(params, n).theta - theta))
                value = best_approx_value(params, n)
                expected = 4.0 / math.pi * closed
                worst_value = max(worst_value, abs(value - expected) / expected)
    return CheckResult(
        name="平凡根与闭式宽度",
        expected={"max_theta_error": 1e-12, "max_relative_error": 1e-12},
        actual={"max_theta_error": worst_theta, "max_relative_error": worst_value},
        passed=worst_theta <= 1e-12 and worst_value <= 1e-12,
    )


def check_asymptotic_bounds() -> CheckResult:
    """|γ_n| ≤ 16/(3π)，且 (π/4)·宽度落在双侧界内"""
    worst_gamma = 0.0
    outside: List[Tuple[float, float, int]] = []
    for q in ASYMPTOTIC_Q:
        for beta in ASYMPTOTIC_BETA:
            params = KernelParams(q, beta)
            start = n_q_beta(q, beta)
            for n in range(start, 33):
                worst_gamma = max(worst_gamma, abs(asymptotic_gamma(params, n)))
                scaled = math.pi / 4.0 * best_approx_value(params, n)
                lower, upper = two_sided_bounds(params, n)
                if not (lower * (1.0 - BRACKET_SLACK) <= scaled <= upper * (1.0 + BRACKET_SLACK)):
                    outside.append((q, beta, n))
    return CheckResult(
        name="渐近表示与双侧界",
        expected={"gamma_bound": GAMMA_BOUND, "outside": []},
        actual={"max_abs_gamma": worst_gamma, "outside": outside},
        passed=worst_gamma <= GAMMA_BOUND and not outside,
    )


def check_uniform_certificate() -> CheckResult:
    cert = uniform_umova_certificate()
    return CheckResult("q ≤ 91/250 的一致性证据", True, cert.to_dict(), cert.holds)


def check_implications() -> CheckResult:
    report = implication_suite(0.5, 963)
    return CheckResult("蕴含链 (q=0.5, n=963)", [], report.violations, report.ok)


CHECKS: Tuple[Callable[[], CheckResult], ...] = (
    check_nq,
    check_nq_star,
    check_case_table,
    check_determinants_beta0,
    check_determinants_beta1,
    check_trivial_roots,
    check_asymptotic_bounds,
    check_uniform_certificate,
    check_implications,
)


def _run_one(check: Callable[[], CheckResult]) -> CheckResult:
    try:
        return check()
    except PoissonWidthsError as e:
        _logger.warning("检查 %s 抛出异常: %s", check.__name__, e)
        return CheckResult(check.__name__, None, f"{type(e).__name__}: {e}", False)


def run_checks(threads: int = 1) -> List[CheckResult]:
    """按固定顺序返回所有检查结果"""
    if threads == 1:
        return [_run_one(c) for c in CHECKS]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(_run_one, CHECKS))


def all_passed(results: List[CheckResult]) -> bool:
    return all(r.passed for r in results)


def format_check(result: CheckResult) -> str:
    """PASS/FAIL 彩色单行"""
    if result.passed:
        badge = click.style("✅ PASS", fg=Colors.GREEN, bold=True)
    else:
        badge = click.style("❌ FAIL", fg=Colors.RED, bold=True)
    line = f"{badge}  {result.name}"
    if not result.passed:
        line += f"\n        期望: {result.expected}\n        实际: {result.actual}"
    return line
