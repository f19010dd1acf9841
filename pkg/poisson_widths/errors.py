"""
异常定义 - 所有计算错误的统一层次结构
"""

import math


class PoissonWidthsError(Exception):
    """poisson-widths 所有异常的基类"""


class ParameterError(PoissonWidthsError, ValueError):
    """参数超出定义域（例如 q ∉ (0,1)）"""


class TruncationError(PoissonWidthsError):
    """级数在 max_terms 项内未满足截断条件"""

    def __init__(self, name: str, max_terms: int):
        super().__init__(f"级数 {name} 在 {max_terms} 项内未收敛")
        self.name = name
        self.max_terms = max_terms


class NoSignChange(PoissonWidthsError):
    """扫描网格上没有找到 θ 方程的变号区间"""


class AmbiguousRoot(PoissonWidthsError):
    """扫描网格上找到多于一个变号区间"""

    def __init__(self, brackets):
        super().__init__(f"θ 方程在 [0,1) 上有 {len(brackets)} 个变号区间: {brackets}")
        self.brackets = list(brackets)


class RootNotConverged(PoissonWidthsError):
    """二分结束时缩放残差仍超过 10·tol"""

    def __init__(self, theta: float, scaled_residual: float, tol: float):
        super().__init__(f"θ = {theta!r} 处缩放残差 {scaled_residual:.3e} 超过 10·tol = {10 * tol:.3e}")
        self.theta = theta
        self.scaled_residual = scaled_residual
        self.tol = tol


class UnderflowError(PoissonWidthsError):
    """q^n 在 binary64 中不可表示"""


class SplineNotUnique(PoissonWidthsError):
    """基本 SK 样条的线性方程组数值奇异"""


class DegenerateSign(PoissonWidthsError):
    """sin(n y0 - βπ/2) 过于接近 0，s 无定义"""


class RangeUnsupported(PoissonWidthsError):
    """参数点超出桌面规模范围 n·ln(1/q) ≤ 200"""

    def __init__(self, q: float, n: int, limit: float):
        super().__init__(f"n·ln(1/q) = {-n * math.log(q):.3f} 超出上限 {limit} (q={q}, n={n})")
        self.q = q
        self.n = n
        self.limit = limit


class AllZeros(PoissonWidthsError, ValueError):
    """符号变化计数的输入向量全为零"""


class DimensionMismatch(PoissonWidthsError, ValueError):
    """行列式节点向量维数不一致或不是奇数"""
