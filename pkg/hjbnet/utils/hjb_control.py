"""
HJB 最优反馈控制

闭式最优控制律 u_ij = −(λ/η)·e_ij，节点控制为对所有其他节点求和：
u_i = −Σ_j θ_ij (x_i − x_j)（吸引型扩散耦合）。
另外提供性能指标被积函数 Ω 与 Lyapunov 函数 V 的计算。
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..exceptions import ConfigError
from ..models.params import ControlWeights


@dataclass(frozen=True)
class PairWeights:
    """
    展开到节点对的权重

    uniform=True 时各数组形状为 (3,)（所有节点对相同）；
    否则为 (3, N, N) 的逐对逐分量表，表中为 0 的节点对不受控制。
    """

    n_nodes: int
    theta: np.ndarray
    lam: np.ndarray
    eta: np.ndarray
    alpha: np.ndarray
    uniform: bool

    @property
    def row_sums(self) -> np.ndarray:
        """Σ_j θ_ij^k，形状 (N, 3)"""
        if self.uniform:
            return np.broadcast_to(self.theta * (self.n_nodes - 1), (self.n_nodes, 3))
        return self.theta.sum(axis=2).T


def build_pair_weights(weights: ControlWeights, n_nodes: int, adjacency=None) -> PairWeights:
    """
    根据控制权重和可选的邻接权重表构造逐对权重

    Args:
        weights: 控制权重（标量或逐分量）
        n_nodes: 节点数
        adjacency: None 表示全连接均匀权重；(N, N) 或 (3, N, N) 表示 λ 的逐对缩放
    """
    lam = weights.lam_vector
    eta = weights.eta_vector
    if np.any(lam <= 0) or np.any(eta <= 0):
        raise ConfigError(f"控制权重必须为正数: lam={lam}, eta={eta}")
    if adjacency is None:
        theta = lam / eta
        return PairWeights(n_nodes, theta, lam, eta, weights.alpha_vector, True)

    table = np.asarray(adjacency, dtype=np.float64)
    if table.shape == (n_nodes, n_nodes):
        table = np.broadcast_to(table, (3, n_nodes, n_nodes))
    if table.shape != (3, n_nodes, n_nodes):
        raise ConfigError(f"邻接权重表形状错误: {table.shape}")
    table = table.copy()
    for k in range(3):
        np.fill_diagonal(table[k], 0.0)

    lam_t = lam[:, None, None] * table
    eta_t = np.broadcast_to(eta[:, None, None], table.shape).copy()
    theta_t = lam_t / eta_t
    if weights.alpha is None:
        alpha_t = theta_t
    else:
        alpha_t = weights.alpha_vector[:, None, None] * table
    return PairWeights(n_nodes, theta_t, lam_t, eta_t, alpha_t, False)


def pair_control(e: np.ndarray, w: ControlWeights) -> np.ndarray:
    """节点对最优控制 u_ij^k = −θ^k · e_ij^k"""
    theta = w.theta
    if np.any(theta <= 0) or not np.all(np.isfinite(theta)):
        raise ConfigError(f"无效的控制增益: {theta}")
    return -theta * np.asarray(e, dtype=np.float64)


def network_control(states: np.ndarray, pw: PairWeights) -> np.ndarray:
    """
    所有节点的控制输入，形状 (N, 3)

    u_i^k = −Σ_{j≠i} θ_ij^k (x_i^k − x_j^k)
    """
    if pw.uniform:
        total = states.sum(axis=0)
        return -pw.theta * (pw.n_nodes * states - total)
    # Σ_j θ_ij x_j，逐分量
    mixed = np.einsum("kij,jk->ik", pw.theta, states)
    return -(pw.row_sums * states - mixed)


def node_control(i: int, states: np.ndarray, w: ControlWeights, coupling=None) -> np.ndarray:
    """
    单个节点 i 的控制输入

    Args:
        i: 节点编号（0 起）
        states: 网络全部状态，形状 (N, 3)
        w: 控制权重
        coupling: 可选邻接权重表，默认全连接
    """
    states = np.asarray(states, dtype=np.float64)
    n_nodes = states.shape[0]
    if not 0 <= i < n_nodes:
        raise IndexError(f"节点编号越界: {i}（共 {n_nodes} 个节点）")
    pw = build_pair_weights(w, n_nodes, coupling)
    diffs = states[i] - states  # (N, 3)，第 i 行为 0
    if pw.uniform:
        return -pw.theta * diffs.sum(axis=0)
    return -np.einsum("kj,jk->k", pw.theta[:, i, :], diffs)


def cost_increment(errors: np.ndarray, controls: np.ndarray, w: ControlWeights) -> float:
    """
    性能指标被积函数 Ω = Σ_pairs Σ_k (α (e^k)² + η (u^k)²)

    Args:
        errors: 节点对误差，形状 (P, 3)
        controls: 对应的节点对控制，形状 (P, 3)
        w: 控制权重
    """
    errors = np.atleast_2d(np.asarray(errors, dtype=np.float64))
    controls = np.atleast_2d(np.asarray(controls, dtype=np.float64))
    if errors.size == 0:
        return 0.0
    return float(np.sum(w.alpha_vector * errors**2 + w.eta_vector * controls**2))


def network_cost(states: np.ndarray, pw: PairWeights, control_enabled: bool = True) -> float:
    """
    整个网络（有序节点对 i≠j）的 Ω

    节点对控制取 u_ij = −θ_ij e_ij；关闭控制时只剩状态惩罚项。
    """
    control_weight = pw.eta * pw.theta**2 if control_enabled else 0.0
    coeff = pw.alpha + control_weight
    if pw.uniform:
        centered = states - states.mean(axis=0)
        # Σ_{i≠j} (x_i − x_j)² = 2N Σ_i (x_i − x̄)²
        sq = 2.0 * pw.n_nodes * np.sum(centered**2, axis=0)
        return float(np.sum(coeff * sq))
    diffs = states.T[:, :, None] - states.T[:, None, :]
    return float(np.sum(coeff * diffs**2))


def lyapunov_value(errors: np.ndarray, w: ControlWeights) -> float:
    """V = Σ_pairs Σ_k λ^k (e^k)²，errors 形状 (P, 3)"""
    errors = np.atleast_2d(np.asarray(errors, dtype=np.float64))
    if errors.size == 0:
        return 0.0
    return float(np.sum(w.lam_vector * errors**2))


def network_lyapunov(states: np.ndarray, pw: PairWeights) -> float:
    """整个网络（有序节点对）的 V"""
    if pw.uniform:
        centered = states - states.mean(axis=0)
        sq = 2.0 * pw.n_nodes * np.sum(centered**2, axis=0)
        return float(np.sum(pw.lam * sq))
    diffs = states.T[:, :, None] - states.T[:, None, :]
    return float(np.sum(pw.lam * diffs**2))


def all_pair_errors(states: np.ndarray, ordered: bool = True) -> np.ndarray:
    """列出全部节点对误差，形状 (P, 3)"""
    states = np.asarray(states, dtype=np.float64)
    n_nodes = states.shape[0]
    if ordered:
        rows, cols = np.nonzero(~np.eye(n_nodes, dtype=bool))
    else:
        rows, cols = np.triu_indices(n_nodes, k=1)
    return states[rows] - states[cols]


def describe_weights(weights: ControlWeights, label: Optional[str] = None) -> str:
    prefix = f"{label}: " if label else ""
    return f"{prefix}λ={weights.lam}, η={weights.eta}, θ={weights.theta.tolist()}"
