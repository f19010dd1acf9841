"""
网格扫描 - 在 (q, β, n) 笛卡尔积上并行计算，按网格顺序输出行
"""

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from functools import partial
from typing import Any, Dict, List, Tuple

from .config import RunConfig
from .errors import PoissonWidthsError, RangeUnsupported, UnderflowError
from .gammacert import certify_point
from .kernels import KernelParams
from .rootfind import solve_theta
from .thresholds import ThresholdKind, find_threshold
from .widths import asymptotic_gamma, width_report

_logger = logging.getLogger(__name__)

SWEEP_FIELDS = {
    "width": ("q", "beta", "n", "theta", "value", "log_value", "gamma_n", "certified", "error"),
    "theta": ("q", "beta", "n", "theta", "residual", "error"),
    "threshold": ("q", "n_q", "n_q_star", "strict", "error"),
    "gamma": (
        "q", "beta", "n", "in_range", "s", "gamma_abs_sum", "gamma_sum_bound", "sum_bound_holds",
        "gamma4_max", "gamma4_holds", "delta_ok", "positivity_min", "positive", "error",
    ),
}


def grid_points(config: RunConfig) -> List[Tuple]:
    """扫描点，顺序为 q 最外层、n 最内层"""
    if config.target == "threshold":
        return [(q,) for q in config.grid_q]
    return list(itertools.product(config.grid_q, config.grid_beta, config.grid_n))


def _width_row(config: RunConfig, q: float, beta: float, n: int) -> Dict[str, Any]:
    params = KernelParams(q, beta)
    report = width_report(params, n, config.cap, config.tol)
    try:
        gamma_n = asymptotic_gamma(params, n, tol=config.tol)
    except UnderflowError:
        gamma_n = None
    return {
        "theta": report.theta.theta,
        "value": report.value,
        "log_value": report.log_value,
        "gamma_n": gamma_n,
        "certified": "unknown" if report.certified is None else report.certified,
    }


def _theta_row(config: RunConfig, q: float, beta: float, n: int) -> Dict[str, Any]:
    root = solve_theta(KernelParams(q, beta), n, config.tol)
    return {"theta": root.theta, "residual": root.residual}


def _threshold_row(config: RunConfig, q: float) -> Dict[str, Any]:
    nq = find_threshold(q, ThresholdKind.NQ, config.cap)
    nq_star = find_threshold(q, ThresholdKind.NQ_STAR, config.cap)
    strict = nq.n > nq_star.n if nq.found and nq_star.found else None
    return {"n_q": nq.n, "n_q_star": nq_star.n, "strict": strict}


def _gamma_row(config: RunConfig, q: float, beta: float, n: int) -> Dict[str, Any]:
    try:
        report = certify_point(KernelParams(q, beta), n, config.tol)
    except RangeUnsupported as e:
        return {"in_range": False, "error": f"RangeUnsupported: {e}"}
    data = report.to_dict()
    row = {key: data[key] for key in SWEEP_FIELDS["gamma"] if key in data}
    row["in_range"] = True
    return row


_ROW_BUILDERS = {
    "width": _width_row,
    "theta": _theta_row,
    "threshold": _threshold_row,
    "gamma": _gamma_row,
}


def _compute_row(config: RunConfig, point: Tuple) -> Dict[str, Any]:
    fields = SWEEP_FIELDS[config.target]
    row: Dict[str, Any] = dict.fromkeys(fields)
    row.update(zip(("q", "beta", "n"), point))
    try:
        row.update(_ROW_BUILDERS[config.target](config, *point))
    except PoissonWidthsError as e:
        _logger.debug("扫描点 %s 失败: %s", point, e)
        row["error"] = f"{type(e).__name__}: {e}"
    return {key: row[key] for key in fields}


def sweep(config: RunConfig) -> List[Dict[str, Any]]:
    """
    在网格上执行所选计算

    每行独立计算，失败的行在 error 列中给出原因，扫描继续。
    多线程执行时结果仍按网格顺序返回。

    Args:
        config: 已校验的 RunConfig（command 为 sweep）

    Returns:
        行列表，列顺序见 SWEEP_FIELDS
    """
    points = grid_points(config)
    _logger.debug("扫描 %s: %d 个点, %d 个线程", config.target, len(points), config.threads)
    worker = partial(_compute_row, config)
    if config.threads == 1:
        return [worker(p) for p in points]
    with ThreadPoolExecutor(max_workers=config.threads) as pool:
        return list(pool.map(worker, points))
