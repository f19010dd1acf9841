"""
运行配置 - 由命令行选项组装并校验
"""

import os
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .errors import ParameterError

THREADS_ENV = "WIDTHS_THREADS"
DEFAULT_TOL = 1e-12
DEFAULT_CAP = 10_000_000
OUTPUT_FORMATS = ("json", "csv", "text")
COMMANDS = (
    "theta",
    "width",
    "threshold",
    "verify-cy2n",
    "gamma-report",
    "cvd-check",
    "sweep",
    "reproduce-paper",
    "certify",
)
SWEEP_TARGETS = ("width", "theta", "threshold", "gamma")


def default_threads() -> int:
    """WIDTHS_THREADS 环境变量，缺省为 1"""
    value = os.environ.get(THREADS_ENV)
    if not value:
        return 1
    try:
        threads = int(value)
    except ValueError:
        raise ParameterError(f"{THREADS_ENV} 必须为正整数: {value!r}") from None
    if threads < 1:
        raise ParameterError(f"{THREADS_ENV} 必须为正整数: {value!r}")
    return threads


def _floats(parts, text):
    try:
        return [float(p) for p in parts]
    except ValueError as e:
        raise ParameterError(f"无法解析网格 {text!r}: {e}") from e


def _ints(parts, text):
    try:
        return [int(p) for p in parts]
    except ValueError as e:
        raise ParameterError(f"无法解析整数网格 {text!r}: {e}") from e


def parse_float_grid(text: str) -> Tuple[float, ...]:
    """
    解析实数网格

    支持 "a:b:step"（含端点）和逗号列表 "0,0.5,1" 两种写法。
    """
    text = text.strip()
    if ":" not in text:
        return tuple(_floats([p for p in text.split(",") if p.strip()], text))
    parts = _floats(text.split(":"), text)
    if len(parts) != 3:
        raise ParameterError(f"网格格式应为 a:b:step: {text!r}")
    start, stop, step = parts
    if step <= 0 or stop < start:
        raise ParameterError(f"网格需要 step > 0 且 b ≥ a: {text!r}")
    count = int(round((stop - start) / step)) + 1
    values = np.round(start + step * np.arange(count), 12)
    return tuple(float(v) for v in values if v <= stop + step * 1e-9)


def parse_int_grid(text: str) -> Tuple[int, ...]:
    """解析整数网格 "a:b"（含端点）或逗号列表"""
    text = text.strip()
    if ":" not in text:
        return tuple(_ints([p for p in text.split(",") if p.strip()], text))
    parts = _ints(text.split(":"), text)
    if len(parts) != 2 or parts[1] < parts[0]:
        raise ParameterError(f"整数网格格式应为 a:b 且 b ≥ a: {text!r}")
    return tuple(range(parts[0], parts[1] + 1))


@dataclass
class RunConfig:
    """一次命令行调用的完整配置"""
    command: str
    q: Optional[float] = None
    beta: float = 0.0
    n: Optional[int] = None
    grid_q: Tuple[float, ...] = ()
    grid_beta: Tuple[float, ...] = (0.0,)
    grid_n: Tuple[int, ...] = ()
    output: str = "json"
    tol: float = DEFAULT_TOL
    cap: int = DEFAULT_CAP
    threads: int = field(default_factory=default_threads)
    target: str = "width"

    def validate(self) -> "RunConfig":
        """检查各字段，违反时抛出 ParameterError（命令行映射为用法错误）"""
        errors: List[str] = []
        if self.command not in COMMANDS:
            errors.append(f"未知命令: {self.command}")
        if self.output not in OUTPUT_FORMATS:
            errors.append(f"输出格式必须是 {'/'.join(OUTPUT_FORMATS)}: {self.output}")
        if self.q is not None and not (0.0 < self.q < 1.0):
            errors.append(f"q 必须满足 0 < q < 1: {self.q}")
        if self.n is not None and self.n < 1:
            errors.append(f"n 必须为正整数: {self.n}")
        if not self.tol > 0:
            errors.append(f"tol 必须为正: {self.tol}")
        if self.cap < 9:
            errors.append(f"cap 必须不小于 9: {self.cap}")
        if self.threads < 1:
            errors.append(f"threads 必须为正整数: {self.threads}")
        if self.command == "sweep":
            if self.target not in SWEEP_TARGETS:
                errors.append(f"sweep 目标必须是 {'/'.join(SWEEP_TARGETS)}: {self.target}")
            if not self.grid_q:
                errors.append("sweep 需要非空的 --grid-q")
            if self.target != "threshold" and not self.grid_n:
                errors.append("sweep 需要非空的 --grid-n")
            bad_q = [q for q in self.grid_q if not (0.0 < q < 1.0)]
            if bad_q:
                errors.append(f"网格中的 q 必须满足 0 < q < 1: {bad_q}")
            bad_n = [n for n in self.grid_n if n < 1]
            if bad_n:
                errors.append(f"网格中的 n 必须为正整数: {bad_n}")
        if errors:
            raise ParameterError("; ".join(errors))
        return self

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "q": self.q,
            "beta": self.beta,
            "n": self.n,
            "grid_q": list(self.grid_q),
            "grid_beta": list(self.grid_beta),
            "grid_n": list(self.grid_n),
            "output": self.output,
            "tol": self.tol,
            "cap": self.cap,
            "threads": self.threads,
            "target": self.target,
        }
