"""
定步长四阶 Runge-Kutta 积分
"""

from typing import Callable, Iterator, Tuple

import numpy as np

from ..exceptions import DivergenceError

Derivative = Callable[[float, np.ndarray], np.ndarray]


def rk4_step(f: Derivative, t: float, y: np.ndarray, h: float) -> np.ndarray:
    """经典 RK4 单步，返回新的状态数组（不修改 y）"""
    k1 = f(t, y)
    k2 = f(t + 0.5 * h, y + (0.5 * h) * k1)
    k3 = f(t + 0.5 * h, y + (0.5 * h) * k2)
    k4 = f(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def first_bad_node(y: np.ndarray) -> int:
    """返回第一个含非有限分量的节点编号（按最后一维长度 3 展平）"""
    bad = ~np.isfinite(y.reshape(-1, 3)).all(axis=1)
    return int(np.flatnonzero(bad)[0])


def iterate_rk4(f: Derivative, y0: np.ndarray, h: float, n_steps: int, t0: float = 0.0) -> Iterator[Tuple[int, float, np.ndarray]]:
    """
    逐步积分生成器

    每步之后产出 (步号, 时间, 状态)，步号从 1 开始；时间按 t0 + k·h 计算，
    避免累加误差。出现非有限状态时抛出 DivergenceError。
    """
    y = np.array(y0, dtype=np.float64)
    t = t0
    for k in range(1, n_steps + 1):
        y = rk4_step(f, t, y, h)
        t = t0 + k * h
        if not np.isfinite(y).all():
            raise DivergenceError(t, first_bad_node(y))
        yield k, t, y


def integrate(f: Derivative, y0: np.ndarray, h: float, n_steps: int, t0: float = 0.0) -> np.ndarray:
    """积分到终点并返回最终状态"""
    y = np.array(y0, dtype=np.float64)
    for _, _, y in iterate_rk4(f, y0, h, n_steps, t0):
        pass
    return y
