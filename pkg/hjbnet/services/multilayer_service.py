"""
三层网络服务

三个网络各自带层内 HJB 控制，层间通过第一分量扩散耦合：
层 l 第一分量方程加上 ε_l (S^{l−1} + S^{l+1} − 2 S^l)。
另外提供联合误差 ξ = x + y − 2z 的残差检验与稳定性监测。
"""

import logging
from typing import Optional

import numpy as np
from scipy.integrate import trapezoid
from scipy.spatial.distance import pdist

from ..exceptions import ConfigError, UndefinedEstimateError
from ..models.configs import IntegrationSettings, MultilayerConfig
from ..models.params import RosslerParams
from ..models.results import (
    LAYER_PAIRS,
    CombinedError,
    MultilayerRunResult,
    MultilayerState,
    PerformanceAccumulator,
    StabilitySeries,
    StabilitySnapshot,
    TrajectoryBound,
)
from ..utils.hjb_control import build_pair_weights, network_control, network_cost
from ..utils.rk4 import iterate_rk4
from ..utils.rossler import ensure_finite, field_unchecked
from .network_service import draw_initial_states

logger = logging.getLogger(__name__)

# |ξ¹| 低于该值的样本不参与 L 的估计
XI_FLOOR = 1e-9


def init_multilayer(cfg: MultilayerConfig) -> MultilayerState:
    """
    生成三层初值

    一次抽取 (3, N, 3) 块，第一层与同种子的单网络初值逐位相同。
    """
    rng = np.random.default_rng(cfg.seed)
    states = draw_initial_states(rng, cfg.ic_range, (3, cfg.n_nodes, 3))
    return MultilayerState(t=0.0, states=states)


class MultilayerField:
    """三层网络右端函数，构造时展开各层权重"""

    def __init__(self, cfg: MultilayerConfig):
        self.params = cfg.params
        self.control_enabled = cfg.control_enabled
        self.eps = tuple(float(e) for e in cfg.eps)
        self.couple_all = cfg.couple_all_components
        self.layer_weights = [build_pair_weights(w, cfg.n_nodes, cfg.adjacency) for w in cfg.weights]

    def __call__(self, t: float, states: np.ndarray) -> np.ndarray:
        derivative = np.empty_like(states)
        for layer in range(3):
            derivative[layer] = field_unchecked(states[layer], self.params)
            if self.control_enabled:
                derivative[layer] += network_control(states[layer], self.layer_weights[layer])

        if any(self.eps):
            # 其余两层之和减去 2 倍本层 = 三层之和减去 3 倍本层
            total = states.sum(axis=0)
            for layer, eps in enumerate(self.eps):
                if eps == 0.0:
                    continue
                diffusion = total - 3.0 * states[layer]
                if self.couple_all:
                    derivative[layer] += eps * diffusion
                else:
                    derivative[layer, :, 0] += eps * diffusion[:, 0]
        return derivative

    def layer_costs(self, states: np.ndarray):
        return [network_cost(states[layer], self.layer_weights[layer], self.control_enabled) for layer in range(3)]


def multilayer_derivative(ms: MultilayerState, cfg: MultilayerConfig) -> np.ndarray:
    """全部 3N 个节点的导数，形状 (3, N, 3)"""
    states = ensure_finite(ms.states)
    if states.shape != (3, cfg.n_nodes, 3):
        raise ConfigError(f"状态形状 {states.shape} 与配置 (3, {cfg.n_nodes}, 3) 不一致")
    return MultilayerField(cfg)(ms.t, states)


def intra_errors(states: np.ndarray) -> np.ndarray:
    """
    各层同步误差，states 形状 (..., 3, N, 3)，返回 (..., 3)

    每层 (1/N) Σ_{i≠j} ||S_i − S_j||；单节点层误差为 0。
    """
    n_nodes = states.shape[-2]
    if n_nodes < 2:
        return np.zeros(states.shape[:-2])
    flat = states.reshape(-1, n_nodes, 3)
    values = np.array([2.0 * pdist(layer).sum() / n_nodes for layer in flat])
    return values.reshape(states.shape[:-2])


def inter_errors(states: np.ndarray) -> np.ndarray:
    """层间误差 (1/N) Σ_i ||S_i^l − S_i^m||，列顺序 (1,2), (1,3), (2,3)"""
    columns = [
        np.linalg.norm(states[..., a - 1, :, :] - states[..., b - 1, :, :], axis=-1).mean(axis=-1)
        for a, b in LAYER_PAIRS
    ]
    return np.stack(columns, axis=-1)


def run_multilayer(
    cfg: MultilayerConfig,
    integration: Optional[IntegrationSettings] = None,
    initial_states: Optional[np.ndarray] = None,
) -> MultilayerRunResult:
    """定步长 RK4 积分三层网络，每层单独累加性能指标 J"""
    integration = integration or IntegrationSettings()
    field = MultilayerField(cfg)
    if initial_states is None:
        y0 = init_multilayer(cfg).states
    else:
        y0 = ensure_finite(initial_states, "initial_states").copy()
        if y0.shape != (3, cfg.n_nodes, 3):
            raise ConfigError(f"初值形状 {y0.shape} 与配置 (3, {cfg.n_nodes}, 3) 不一致")

    h = integration.h
    n_steps = integration.n_steps
    every = integration.sample_every
    n_samples = n_steps // every + 1

    times = np.empty(n_samples)
    samples = np.empty((n_samples, 3, cfg.n_nodes, 3))
    performance = (PerformanceAccumulator(), PerformanceAccumulator(), PerformanceAccumulator())
    bound = TrajectoryBound.empty(3 * cfg.n_nodes)

    def record(y: np.ndarray) -> None:
        for acc, omega in zip(performance, field.layer_costs(y)):
            acc.add(omega, h)
        bound.update(y)

    times[0] = 0.0
    samples[0] = y0
    record(y0)

    logger.info(f"开始三层网络积分: N={cfg.n_nodes}, ε={cfg.eps}, 步数={n_steps}")
    index = 1
    for k, t, y in iterate_rk4(field, y0, h, n_steps):
        record(y)
        if k % every == 0:
            times[index] = t
            samples[index] = y
            index += 1

    result = MultilayerRunResult(
        times=times,
        states=samples,
        intra=intra_errors(samples),
        inter=inter_errors(samples),
        performance=performance,
        bound=bound,
    )
    logger.info(f"三层网络积分完成: 层内误差={result.intra[-1].tolist()}, 层间误差={result.inter[-1].tolist()}")
    return result


def combined_error(ms) -> CombinedError:
    """联合误差 ξ_i = x_i + y_i − 2 z_i 与非线性项 G_i = x³x¹ + y³y¹ − 2 z³z¹"""
    states = np.asarray(ms.states if isinstance(ms, MultilayerState) else ms, dtype=np.float64)
    x, y, z = states[..., 0, :, :], states[..., 1, :, :], states[..., 2, :, :]
    xi = x + y - 2.0 * z
    G = x[..., 2] * x[..., 0] + y[..., 2] * y[..., 0] - 2.0 * z[..., 2] * z[..., 0]
    return CombinedError(xi=xi, G=G)


def _common_eps(cfg: MultilayerConfig) -> float:
    eps1, eps2, eps3 = cfg.eps
    if not (eps1 == eps2 == eps3):
        raise ConfigError(f"联合误差分析要求三层耦合强度相同: ε={cfg.eps}")
    return float(eps1)


def _common_theta(cfg: MultilayerConfig) -> float:
    """三层共用的标量增益 θ；关闭控制时为 0"""
    if cfg.adjacency is not None:
        raise ConfigError("联合误差分析要求全连接均匀权重，不支持 adjacency")
    first = cfg.weights[0]
    if any(w.theta.tolist() != first.theta.tolist() for w in cfg.weights) or not first.is_uniform():
        raise ConfigError("联合误差分析要求三层使用相同且各分量一致的 θ")
    return float(first.theta[0]) if cfg.control_enabled else 0.0


def combined_error_rhs(xi: np.ndarray, G: np.ndarray, params: RosslerParams, theta: float, eps: float) -> np.ndarray:
    """
    联合误差方程右端

    ξ̇¹ = −ξ² − ξ³ − θΣ(ξ_i¹ − ξ_j¹) − 3εξ¹
    ξ̇² = ξ¹ + aξ² − θΣ(ξ_i² − ξ_j²)
    ξ̇³ = bξ¹ + G − cξ³ − θΣ(ξ_i³ − ξ_j³)
    """
    n_nodes = xi.shape[-2]
    diffusion = n_nodes * xi - xi.sum(axis=-2, keepdims=True)
    out = np.empty_like(xi)
    out[..., 0] = -xi[..., 1] - xi[..., 2] - 3.0 * eps * xi[..., 0]
    out[..., 1] = xi[..., 0] + params.a * xi[..., 1]
    out[..., 2] = params.b * xi[..., 0] + G - params.c * xi[..., 2]
    return out - theta * diffusion


def combined_error_residual(states: np.ndarray, dt: float, cfg: MultilayerConfig, order: int = 4) -> np.ndarray:
    """
    沿轨迹数值差分 dξ/dt 与联合误差方程右端之差

    Args:
        states: 等间隔采样的轨迹，形状 (采样数, 3, N, 3)
        dt: 采样间隔
        cfg: 三层网络配置（要求 ε 相同、θ 相同且均匀）
        order: 中心差分阶数，2 或 4

    Returns:
        每个节点在全部内部采样点与分量上的最大绝对残差，形状 (N,)
    """
    eps = _common_eps(cfg)
    theta = _common_theta(cfg)
    if order not in (2, 4):
        raise ConfigError(f"差分阶数只支持 2 或 4: {order}")
    states = np.asarray(states, dtype=np.float64)
    reach = order // 2
    if states.ndim != 4 or states.shape[0] < 2 * reach + 1:
        raise ConfigError(f"轨迹采样不足以做 {order} 阶中心差分: {states.shape}")

    ce = combined_error(states)
    xi = ce.xi
    if order == 2:
        derivative = (xi[2:] - xi[:-2]) / (2.0 * dt)
    else:
        derivative = (-xi[4:] + 8.0 * xi[3:-1] - 8.0 * xi[1:-3] + xi[:-4]) / (12.0 * dt)
    interior = slice(reach, xi.shape[0] - reach)
    rhs = combined_error_rhs(xi[interior], ce.G[interior], cfg.params, theta, eps)
    residual = np.abs(derivative - rhs)
    return residual.max(axis=(0, 2))


def stability_monitor(ms, cfg: MultilayerConfig, L: float) -> StabilitySnapshot:
    """
    联合误差稳定性监测量

    v_i = ½((ξ¹)² + (ξ²)² + (ξ³)²/b)，Q = diag(3ε − L/2, −a, c/b − L/2)，
    w_i = −λ_min(Q)·||ξ_i||²。
    """
    eps = _common_eps(cfg)
    if not np.isfinite(L) or L < 0:
        raise ConfigError(f"L 必须为非负有限数: {L}")
    p = cfg.params
    xi = combined_error(ms).xi
    v = 0.5 * (xi[..., 0] ** 2 + xi[..., 1] ** 2 + xi[..., 2] ** 2 / p.b)
    Q = np.diag([3.0 * eps - L / 2.0, -p.a, p.c / p.b - L / 2.0])
    lambda_min = float(np.min(np.diag(Q)))
    w = -lambda_min * np.sum(xi**2, axis=-1)
    return StabilitySnapshot(v=v, Q=Q, lambda_min=lambda_min, w=w, L=float(L))


def estimate_L(states: np.ndarray, params: RosslerParams) -> float:
    """
    经验界常数 L = max |G / (b·ξ¹)|

    只统计 |ξ¹| > 1e-9 的样本；没有有效样本时抛出 UndefinedEstimateError。
    """
    ce = combined_error(np.asarray(states, dtype=np.float64))
    xi1 = ce.xi[..., 0]
    valid = np.abs(xi1) > XI_FLOOR
    if not np.any(valid):
        raise UndefinedEstimateError("ξ¹ 在整条轨迹上为 0，无法估计 L")
    return float(np.max(np.abs(ce.G[valid] / (params.b * xi1[valid]))))


def stability_series(
    result: MultilayerRunResult, cfg: MultilayerConfig, L: Optional[float] = None
) -> StabilitySeries:
    """沿整条轨迹计算 v_i(t)、w_i(t) 与 ∫w dt；未给出 L 时用 estimate_L 估计"""
    if L is None:
        L = estimate_L(result.states, cfg.params)
    snapshot = stability_monitor(result.states, cfg, L)
    w_integral = trapezoid(snapshot.w, result.times, axis=0)
    return StabilitySeries(
        times=result.times,
        v=snapshot.v,
        w=snapshot.w,
        w_integral=np.atleast_1d(w_integral),
        lambda_min=snapshot.lambda_min,
        L=snapshot.L,
    )

