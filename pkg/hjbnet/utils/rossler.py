"""
Rössler 振子向量场

第三式采用 ẋ³ = b·x¹ + x³(x¹ − c) 的形式（误差动力学与此形式一致）。
所有函数对最后一维长度为 3 的数组逐行计算，可一次处理整个网络。
输入矩阵 B 取单位阵：每个控制分量直接加到对应的状态方程上。
"""

import numpy as np

from ..exceptions import InvalidStateError
from ..models.params import RosslerParams


def ensure_finite(values: np.ndarray, name: str = "state") -> np.ndarray:
    """转换为 float64 数组并检查有限性"""
    array = np.asarray(values, dtype=np.float64)
    if array.shape[-1:] != (3,):
        raise InvalidStateError(f"{name} 的最后一维必须为 3，实际形状 {array.shape}")
    if not np.all(np.isfinite(array)):
        raise InvalidStateError(f"{name} 含有非有限值")
    return array


def rossler_field(s: np.ndarray, p: RosslerParams) -> np.ndarray:
    """
    Rössler 向量场

    Args:
        s: 状态，形状 (..., 3)
        p: 振子常数

    Returns:
        (−x2−x3, x1+a·x2, b·x1+x3·(x1−c))
    """
    s = ensure_finite(s)
    return field_unchecked(s, p)


def field_unchecked(s: np.ndarray, p: RosslerParams) -> np.ndarray:
    # 积分内循环使用，不做有限性检查（由积分器逐步检查）
    x1 = s[..., 0]
    x2 = s[..., 1]
    x3 = s[..., 2]
    out = np.empty_like(s)
    out[..., 0] = -x2 - x3
    out[..., 1] = x1 + p.a * x2
    out[..., 2] = p.b * x1 + x3 * (x1 - p.c)
    return out


def controlled_field(s: np.ndarray, p: RosslerParams, u: np.ndarray) -> np.ndarray:
    """受控节点：rossler_field(s) + u"""
    s = ensure_finite(s)
    u = ensure_finite(u, "control")
    return field_unchecked(s, p) + u


def error_field(e: np.ndarray, xj: np.ndarray, p: RosslerParams, u_pair: np.ndarray) -> np.ndarray:
    """
    节点对 (i, j) 的误差动力学，e = x_i − x_j

    Args:
        e: 误差，形状 (..., 3)
        xj: 参考节点 j 的状态
        p: 振子常数
        u_pair: 作用在误差上的控制（u_i − u_j）

    Returns:
        (−e2−e3+u1, e1+a·e2+u2, b·e1 + xj1·e3 + xj3·e1 + e1·e3 − c·e3 + u3)
    """
    e = ensure_finite(e, "error")
    xj = ensure_finite(xj, "reference")
    u_pair = ensure_finite(u_pair, "control")
    return error_unchecked(e, xj, p) + u_pair


def error_unchecked(e: np.ndarray, xj: np.ndarray, p: RosslerParams) -> np.ndarray:
    e1 = e[..., 0]
    e2 = e[..., 1]
    e3 = e[..., 2]
    out = np.empty(np.broadcast(e, xj).shape, dtype=np.float64)
    out[..., 0] = -e2 - e3
    out[..., 1] = e1 + p.a * e2
    out[..., 2] = p.b * e1 + xj[..., 0] * e3 + xj[..., 2] * e1 + e1 * e3 - p.c * e3
    return out


def pair_error(si: np.ndarray, sj: np.ndarray) -> np.ndarray:
    """e_ij = s_i − s_j（满足 e_ij = −e_ji）"""
    return ensure_finite(si) - ensure_finite(sj)
