"""
命令行接口 - 使用Click框架
"""

import logging
import sys
from typing import Any, Callable, Dict, Optional, Sequence, Tuple

import click

from . import __version__
from .config import (
    DEFAULT_CAP,
    DEFAULT_TOL,
    OUTPUT_FORMATS,
    SWEEP_TARGETS,
    THREADS_ENV,
    RunConfig,
    parse_float_grid,
    parse_int_grid,
)
from .cvd import DEFAULT_Q0, counterexample_report
from .errors import ParameterError, PoissonWidthsError, UnderflowError
from .gammacert import all_gammas, certify_point, compute_gammas
from .kernels import KernelParams
from .report import Colors, emit
from .reproduce import all_passed, format_check, run_checks
from .rootfind import solve_theta
from .skspline import DEFAULT_ZERO_TOL, build_fundamental_spline, classify_signs, derivative_at_midpoints
from .sweep import SWEEP_FIELDS, sweep
from .thresholds import ThresholdKind, find_threshold, n_q_beta
from .widths import asymptotic_gamma, two_sided_bounds, width_by_dimension, width_report

_logger = logging.getLogger(__name__)

# (payload, CSV 表头, 是否成功)
Outcome = Tuple[Any, Optional[Sequence[str]], bool]


def print_banner():
    """打印工具横幅"""
    line = "═" * 59
    banner = f"""
    {line}
        📐 poisson-widths v{__version__}
        广义 Poisson 核卷积类的宽度计算
    {line}
    """
    click.echo(click.style(banner, fg=Colors.BLUE))


def _require(config: RunConfig, *names: str):
    missing = [f"--{name}" for name in names if getattr(config, name) is None]
    if missing:
        raise ParameterError(f"命令 {config.command} 需要 {', '.join(missing)}")


def _params(config: RunConfig) -> KernelParams:
    return KernelParams(config.q, config.beta)


# ---------------------------------------------------------------------------
# 各命令的计算
# ---------------------------------------------------------------------------

def _do_theta(config: RunConfig, options: Dict[str, Any]) -> Outcome:
    _require(config, "q", "n")
    return solve_theta(_params(config), config.n, config.tol).to_dict(), None, True


def _do_width(config: RunConfig, options: Dict[str, Any]) -> Outcome:
    _require(config, "q")
    params = _params(config)
    if options.get("m") is not None:
        report = width_by_dimension(params, options["m"], config.cap)
    else:
        _require(config, "n")
        report = width_report(params, config.n, config.cap, config.tol)
    payload = report.to_dict()
    try:
        payload["gamma_n"] = asymptotic_gamma(params, report.n, tol=config.tol)
        payload["bounds"] = list(two_sided_bounds(params, report.n))
    except UnderflowError as e:
        _logger.info("跳过渐近量: %s", e)
        payload["gamma_n"] = None
        payload["bounds"] = None
    return payload, None, True


def _do_threshold(config: RunConfig, options: Dict[str, Any]) -> Outcome:
    _require(config, "q")
    kind = options.get("kind", "both")
    if kind == "both":
        nq = find_threshold(config.q, ThresholdKind.NQ, config.cap)
        nq_star = find_threshold(config.q, ThresholdKind.NQ_STAR, config.cap)
        payload: Dict[str, Any] = {
            "q": config.q,
            "n_q": nq.n,
            "n_q_star": nq_star.n,
            "strict": nq.n > nq_star.n if nq.found and nq_star.found else None,
            "cap": config.cap,
        }
    else:
        result = find_threshold(config.q, ThresholdKind(kind), config.cap)
        payload = result.to_dict()
    if options.get("with_beta"):
        value = n_q_beta(config.q, config.beta, config.cap)
        payload["beta"] = config.beta
        payload["n_q_beta"] = value if isinstance(value, int) else value.to_dict()
    return payload, None, True


def _do_verify(config: RunConfig, options: Dict[str, Any]) -> Outcome:
    _require(config, "q", "n")
    params = _params(config)
    y = options.get("y")
    if y is None:
        y = solve_theta(params, config.n, config.tol).y0
    sol = build_fundamental_spline(params, config.n, y)
    pattern = classify_signs(derivative_at_midpoints(sol), options.get("zero_tol", DEFAULT_ZERO_TOL))
    payload = {
        "q": config.q,
        "beta": config.beta,
        "n": config.n,
        "y": y,
        "interp_residual": sol.interp_residual,
        "sum_residual": sol.sum_residual,
        "condition_estimate": sol.condition_estimate,
        "dps": sol.dps,
    }
    payload.update(pattern.to_dict())
    return payload, None, True


def _do_gamma(config: RunConfig, options: Dict[str, Any]) -> Outcome:
    _require(config, "q", "n")
    params = _params(config)
    root = solve_theta(params, config.n, config.tol)
    k = options.get("k")
    if k is not None:
        return compute_gammas(params, config.n, k, root.y0).to_dict(), None, True
    rows = [b.to_dict() for b in all_gammas(params, config.n, root.y0)]
    return rows, ("q", "beta", "n", "k", "y0", "s", "gamma", "sum", "abs_sum"), True


def _do_cvd(config: RunConfig, options: Dict[str, Any]) -> Outcome:
    q0 = DEFAULT_Q0 if config.q is None else config.q
    report = counterexample_report(q0, config.beta)
    return report.to_dict(), None, True


def _do_sweep(config: RunConfig, options: Dict[str, Any]) -> Outcome:
    return sweep(config), SWEEP_FIELDS[config.target], True


def _do_reproduce(config: RunConfig, options: Dict[str, Any]) -> Outcome:
    results = run_checks(config.threads)
    ok = all_passed(results)
    if config.output == "text":
        for result in results:
            click.echo(format_check(result))
        return None, None, ok
    payload = {"checks": [r.to_dict() for r in results], "all_passed": ok}
    if config.output == "csv":
        return payload["checks"], ("name", "passed", "expected", "actual"), ok
    return payload, None, ok


def _do_certify(config: RunConfig, options: Dict[str, Any]) -> Outcome:
    _require(config, "q", "n")
    return certify_point(_params(config), config.n, config.tol).to_dict(), None, True


_HANDLERS: Dict[str, Callable[[RunConfig, Dict[str, Any]], Outcome]] = {
    "theta": _do_theta,
    "width": _do_width,
    "threshold": _do_threshold,
    "verify-cy2n": _do_verify,
    "gamma-report": _do_gamma,
    "cvd-check": _do_cvd,
    "sweep": _do_sweep,
    "reproduce-paper": _do_reproduce,
    "certify": _do_certify,
}


def run(config: RunConfig, **options) -> int:
    """
    校验配置、分派到对应计算并输出报告

    Args:
        config: 运行配置
        options: 命令特有的选项（kind、k、y、m、zero_tol 等）

    Returns:
        退出码，0 表示成功，1 表示检查未通过

    Raises:
        ParameterError: 配置无效
        PoissonWidthsError: 计算失败
    """
    config.validate()
    _logger.debug("运行 %s: %s", config.command, config.to_dict())
    payload, fields, ok = _HANDLERS[config.command](config, options)
    if payload is not None:
        emit(config.output, config.command, payload, fields)
    return 0 if ok else 1


def _invoke(config: RunConfig, **options):
    if config.output == "text":
        print_banner()
    try:
        code = run(config, **options)
    except ParameterError as e:
        raise click.UsageError(str(e))
    except PoissonWidthsError as e:
        click.echo(click.style(f"❌ {type(e).__name__}: {e}", fg=Colors.RED), err=True)
        sys.exit(1)
    if code:
        sys.exit(code)


# ---------------------------------------------------------------------------
# 选项
# ---------------------------------------------------------------------------

_Q_TYPE = click.FloatRange(0.0, 1.0, min_open=True, max_open=True)


def _option_list(*, q_required: bool = False, with_n: bool = True):
    options = [
        click.option('--q', 'q', type=_Q_TYPE, default=None, required=q_required, help='核参数 q，0 < q < 1'),
        click.option('--beta', 'beta', type=float, default=0.0, show_default=True, help='相移参数 β'),
    ]
    if with_n:
        options.append(click.option('--n', 'n', type=click.IntRange(min=1), default=None, help='正整数 n'))
    options.extend([
        click.option('--tol', type=click.FloatRange(min=0.0, min_open=True), default=DEFAULT_TOL,
                     show_default=True, help='θ 求根容差'),
        click.option('--cap', type=click.IntRange(min=9), default=DEFAULT_CAP, show_default=True,
                     help='阈值搜索上限'),
        click.option('--output', '-o', type=click.Choice(OUTPUT_FORMATS), default='json', show_default=True,
                     help='输出格式'),
        click.option('--threads', type=click.IntRange(min=1), default=1, envvar=THREADS_ENV, show_default=True,
                     help=f'线程数（环境变量 {THREADS_ENV}）'),
    ])
    return options


def common_options(q_required: bool = False, with_n: bool = True):
    """所有计算命令共用的选项"""
    def decorator(func):
        for option in reversed(_option_list(q_required=q_required, with_n=with_n)):
            func = option(func)
        return func
    return decorator


def _config(command: str, **kwargs) -> RunConfig:
    return RunConfig(command=command, **kwargs)


@click.group()
@click.version_option(version=__version__, prog_name='poisson-widths')
@click.option('--verbose', '-v', is_flag=True, help='输出调试日志')
def cli(verbose: bool):
    """广义 Poisson 核卷积类的宽度计算 - θ 根、宽度、阈值、SK 样条与 CVD 检验"""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format='%(levelname)s %(name)s: %(message)s',
        stream=sys.stderr,
    )


@cli.command()
@common_options(q_required=True)
def theta(q, beta, n, tol, cap, output, threads):
    """求 θ 方程在 [0,1) 上的唯一根 θ_n

    示例:
        poisson-widths theta --q 0.3 --beta 0 --n 7
    """
    _invoke(_config('theta', q=q, beta=beta, n=n, tol=tol, cap=cap, output=output, threads=threads))


@cli.command()
@common_options(q_required=True)
@click.option('--m', 'm', type=click.IntRange(min=1), default=None, help='按维数 m 计算 d_m（取 n = ⌈m/2⌉）')
def width(q, beta, n, tol, cap, output, threads, m):
    """宽度与最佳逼近值，以及是否被认证

    示例:
        poisson-widths width --q 0.5 --beta 0 --n 963
        poisson-widths width --q 0.15 --m 7 -o text
    """
    _invoke(_config('width', q=q, beta=beta, n=n, tol=tol, cap=cap, output=output, threads=threads), m=m)


@cli.command()
@common_options(q_required=True, with_n=False)
@click.option('--kind', type=click.Choice(['nq', 'nqstar', 'nq_star', 'both']), default='both', show_default=True,
              help='阈值种类')
@click.option('--with-beta', is_flag=True, help='同时给出 n_{q,β}')
def threshold(q, beta, tol, cap, output, threads, kind, with_beta):
    """求 n_q、n_q* 阈值

    示例:
        poisson-widths threshold --q 0.5 --kind nqstar
    """
    kind = 'nq_star' if kind == 'nqstar' else kind
    _invoke(_config('threshold', q=q, beta=beta, tol=tol, cap=cap, output=output, threads=threads),
            kind=kind, with_beta=with_beta)


@cli.command('verify-cy2n')
@common_options(q_required=True)
@click.option('--y', 'y', type=float, default=None, help='平移 y，缺省为 y0 = θ_nπ/n')
@click.option('--zero-tol', type=float, default=DEFAULT_ZERO_TOL, show_default=True, help='判零的相对容差')
def verify_cy2n(q, beta, n, tol, cap, output, threads, y, zero_tol):
    """构造基本 SK 样条并检验 C_{y,2n} 符号条件

    示例:
        poisson-widths verify-cy2n --q 0.15 --beta 0.7 --n 6
    """
    _invoke(_config('verify-cy2n', q=q, beta=beta, n=n, tol=tol, cap=cap, output=output, threads=threads),
            y=y, zero_tol=zero_tol)


@cli.command('gamma-report')
@common_options(q_required=True)
@click.option('--k', 'k', type=click.IntRange(min=1), default=None, help='只计算一个 k（1..2n）')
def gamma_report(q, beta, n, tol, cap, output, threads, k):
    """y0 处的 γ_1..γ_5 分解

    示例:
        poisson-widths gamma-report --q 0.3 --n 36 --k 1
    """
    _invoke(_config('gamma-report', q=q, beta=beta, n=n, tol=tol, cap=cap, output=output, threads=threads), k=k)


@cli.command('cvd-check')
@common_options(with_n=False)
def cvd_check(q, beta, tol, cap, output, threads):
    """在两组节点上计算 D3，检验 CVD 性质的反例

    示例:
        poisson-widths cvd-check --q 0.21 --beta 0
    """
    _invoke(_config('cvd-check', q=q, beta=beta, tol=tol, cap=cap, output=output, threads=threads))


@cli.command('sweep')
@common_options(with_n=False)
@click.option('--what', 'target', type=click.Choice(SWEEP_TARGETS), default='width', show_default=True,
              help='扫描的计算')
@click.option('--grid-q', required=True, help='q 网格，a:b:step 或逗号列表')
@click.option('--grid-beta', default='0', show_default=True, help='β 网格，a:b:step 或逗号列表')
@click.option('--grid-n', default=None, help='n 网格，a:b 或逗号列表')
def sweep_command(q, beta, tol, cap, output, threads, target, grid_q, grid_beta, grid_n):
    """在 (q, β, n) 网格上批量计算

    示例:
        poisson-widths sweep --what width --grid-q 0.1:0.9:0.1 --grid-beta 0,1 --grid-n 1:16 -o csv
        poisson-widths sweep --what threshold --grid-q 0.4925:0.6:0.0125
    """
    try:
        config = _config(
            'sweep',
            beta=beta,
            tol=tol,
            cap=cap,
            output=output,
            threads=threads,
            target=target,
            grid_q=parse_float_grid(grid_q),
            grid_beta=parse_float_grid(grid_beta),
            grid_n=parse_int_grid(grid_n) if grid_n else (),
        )
    except ParameterError as e:
        raise click.UsageError(str(e))
    _invoke(config)


@cli.command('reproduce-paper')
@click.option('--output', '-o', type=click.Choice(OUTPUT_FORMATS), default='text', show_default=True,
              help='输出格式')
@click.option('--threads', type=click.IntRange(min=1), default=1, envvar=THREADS_ENV, show_default=True,
              help=f'线程数（环境变量 {THREADS_ENV}）')
def reproduce_paper(output, threads):
    """运行固定的复现检查，全部通过时退出码为 0

    示例:
        poisson-widths reproduce-paper
    """
    _invoke(_config('reproduce-paper', output=output, threads=threads))


@cli.command()
@common_options(q_required=True)
def certify(q, beta, n, tol, cap, output, threads):
    """在一个 (q, β, n) 点上运行完整的 γ 预算认证

    示例:
        poisson-widths certify --q 0.3 --n 36
    """
    _invoke(_config('certify', q=q, beta=beta, n=n, tol=tol, cap=cap, output=output, threads=threads))


def main():
    """主入口"""
    cli()


if __name__ == '__main__':
    main()
