"""
Poisson Widths
广义 Poisson 核卷积类的宽度、最佳逼近与认证阈值的数值计算
"""

__version__ = "1.0.0"
__author__ = "Galaxy"

from .errors import PoissonWidthsError
from .kernels import KernelParams
from .rootfind import ThetaRoot, solve_theta
from .thresholds import ThresholdKind, find_threshold, n_q_beta
from .widths import WidthReport, best_approx_value, width_report

__all__ = [
    "PoissonWidthsError",
    "KernelParams",
    "ThetaRoot",
    "solve_theta",
    "ThresholdKind",
    "find_threshold",
    "n_q_beta",
    "WidthReport",
    "best_approx_value",
    "width_report",
]
