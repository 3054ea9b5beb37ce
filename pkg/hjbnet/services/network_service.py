"""
单网络服务
负责 N 个受控 Rössler 节点的初始化、积分和同步误差计算
"""

import logging
from typing import Optional, Tuple

import numpy as np
from scipy.spatial.distance import pdist

from ..exceptions import ConfigError
from ..models.configs import IntegrationSettings, NetworkConfig
from ..models.params import ControlWeights, RosslerParams
from ..models.results import (
    NetworkState,
    PerformanceAccumulator,
    SingleRunResult,
    SyncErrorSeries,
    TrajectoryBound,
)
from ..utils.hjb_control import PairWeights, build_pair_weights, network_control, network_cost
from ..utils.rk4 import iterate_rk4
from ..utils.rossler import ensure_finite, error_unchecked, field_unchecked

logger = logging.getLogger(__name__)


def draw_initial_states(rng: np.random.Generator, ic_range, shape: Tuple[int, ...]) -> np.ndarray:
    """按分量区间均匀抽取初值，shape 的最后一维为 3"""
    bounds = np.asarray(ic_range, dtype=np.float64)
    low, high = bounds[:, 0], bounds[:, 1]
    if np.any(low > high):
        raise ConfigError(f"无效的初值区间: {ic_range}")
    return rng.uniform(low, high, size=shape)


def init_network(cfg: NetworkConfig) -> NetworkState:
    """用配置中的种子生成 t=0 时的网络状态，相同种子得到相同初值"""
    rng = np.random.default_rng(cfg.seed)
    states = draw_initial_states(rng, cfg.ic_range, (cfg.n_nodes, 3))
    return NetworkState(t=0.0, states=states)


class NetworkField:
    """
    网络右端函数

    构造时展开权重，积分循环中反复调用时不再重复校验。
    """

    def __init__(self, cfg: NetworkConfig):
        self.params = cfg.params
        self.control_enabled = cfg.control_enabled
        self.weights: PairWeights = build_pair_weights(cfg.weights, cfg.n_nodes, cfg.adjacency)

    def __call__(self, t: float, states: np.ndarray) -> np.ndarray:
        derivative = field_unchecked(states, self.params)
        if self.control_enabled:
            derivative += network_control(states, self.weights)
        return derivative

    def cost(self, states: np.ndarray) -> float:
        return network_cost(states, self.weights, self.control_enabled)


def network_derivative(ns: NetworkState, cfg: NetworkConfig) -> np.ndarray:
    """所有节点的导数 controlled_field(s_i, params, u_i)，关闭控制时 u_i = 0"""
    states = ensure_finite(ns.states)
    if states.shape != (cfg.n_nodes, 3):
        raise ConfigError(f"状态形状 {states.shape} 与节点数 {cfg.n_nodes} 不一致")
    return NetworkField(cfg)(ns.t, states)


def sync_error(ns) -> float:
    """
    网络同步误差 e(t) = (1/N) Σ_{i≠j} ||x_i − x_j||

    对有序节点对求和，等于无序节点对之和的两倍。
    接受 NetworkState 或形状 (N, 3) 的数组。
    """
    states = np.asarray(ns.states if isinstance(ns, NetworkState) else ns, dtype=np.float64)
    n_nodes = states.shape[0]
    if n_nodes < 2:
        raise ConfigError(f"同步误差至少需要 2 个节点，当前 {n_nodes}")
    return float(2.0 * pdist(states).sum() / n_nodes)


def run_single(
    cfg: NetworkConfig,
    integration: Optional[IntegrationSettings] = None,
    initial_states: Optional[np.ndarray] = None,
) -> SingleRunResult:
    """
    定步长 RK4 积分单个网络

    每步按梯形公式累加 J 并更新轨迹界；每 sample_every 步（含 t=0）采样一次。

    Args:
        cfg: 网络配置
        integration: 积分设置，默认 t_end=200, h=0.01, sample_every=10
        initial_states: 可选的显式初值，默认由 init_network 生成
    """
    integration = integration or IntegrationSettings()
    field = NetworkField(cfg)
    if initial_states is None:
        y0 = init_network(cfg).states
    else:
        y0 = ensure_finite(initial_states, "initial_states").copy()
        if y0.shape != (cfg.n_nodes, 3):
            raise ConfigError(f"初值形状 {y0.shape} 与节点数 {cfg.n_nodes} 不一致")

    h = integration.h
    n_steps = integration.n_steps
    every = integration.sample_every
    n_samples = n_steps // every + 1

    times = np.empty(n_samples)
    samples = np.empty((n_samples, cfg.n_nodes, 3))
    errors = np.empty(n_samples)
    performance = PerformanceAccumulator()
    bound = TrajectoryBound.empty(cfg.n_nodes)

    times[0] = 0.0
    samples[0] = y0
    errors[0] = sync_error(y0)
    performance.add(field.cost(y0), h)
    bound.update(y0)

    logger.info(f"开始单网络积分: N={cfg.n_nodes}, 控制={'开' if cfg.control_enabled else '关'}, 步数={n_steps}")
    index = 1
    for k, t, y in iterate_rk4(field, y0, h, n_steps):
        performance.add(field.cost(y), h)
        bound.update(y)
        if k % every == 0:
            times[index] = t
            samples[index] = y
            errors[index] = sync_error(y)
            index += 1

    result = SingleRunResult(
        times=times,
        states=samples,
        errors=SyncErrorSeries(times=times, values=errors),
        performance=performance,
        bound=bound,
    )
    logger.info(f"单网络积分完成: e(t_end)={errors[-1]:.3e}, J={performance.J:.6g}")
    return result


def run_pair_error_system(
    params: RosslerParams,
    weights: ControlWeights,
    x_i0: np.ndarray,
    x_j0: np.ndarray,
    integration: Optional[IntegrationSettings] = None,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    两系统形式的对照积分

    同时积分参考节点 x_j 与误差 e = x_i − x_j。两节点网络中
    u_j = θ·e，误差上的控制为 u_i − u_j = −2θ·e。

    Returns:
        (采样时刻, x_j 采样, e 采样)
    """
    integration = integration or IntegrationSettings()
    theta = weights.theta
    y0 = np.stack([ensure_finite(x_j0, "x_j0"), ensure_finite(x_i0, "x_i0") - ensure_finite(x_j0, "x_j0")])

    def field(t: float, y: np.ndarray) -> np.ndarray:
        xj, e = y[0], y[1]
        out = np.empty_like(y)
        out[0] = field_unchecked(xj, params) + theta * e
        out[1] = error_unchecked(e, xj, params) - 2.0 * theta * e
        return out

    every = integration.sample_every
    n_samples = integration.n_steps // every + 1
    times = np.empty(n_samples)
    samples = np.empty((n_samples, 2, 3))
    times[0] = 0.0
    samples[0] = y0
    index = 1
    for k, t, y in iterate_rk4(field, y0, integration.h, integration.n_steps):
        if k % every == 0:
            times[index] = t
            samples[index] = y
            index += 1
    return times, samples[:, 0], samples[:, 1]
