"""
后处理服务
负责 Hilbert 瞬时相位、层内/层间误差统计、相位聚类计数和区域判定
"""

import logging
from typing import Optional, Tuple

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage
from scipy.signal import hilbert
from scipy.spatial.distance import squareform

from ..exceptions import ConfigError, UndefinedPhaseError
from ..models.configs import AnalysisSettings
from ..models.results import LAYER_PAIRS, LayerErrors, RegimeLabel
from .multilayer_service import inter_errors, intra_errors

logger = logging.getLogger(__name__)

MIN_PHASE_SAMPLES = 64


def hilbert_phase(series, amplitude_floor: float = 1e-9) -> np.ndarray:
    """
    瞬时相位（度）

    去均值后构造解析信号，相位取 atan2(虚部, 实部) 并映射到 (−180, 180]。
    解析信号幅值低于 amplitude_floor × 最大幅值的样本记为 NaN。

    Args:
        series: 等间隔采样的实信号，至少 64 个样本
        amplitude_floor: 相对幅值下限
    """
    signal = np.asarray(series, dtype=np.float64)
    if signal.ndim != 1 or signal.size < MIN_PHASE_SAMPLES:
        raise UndefinedPhaseError(f"相位计算至少需要 {MIN_PHASE_SAMPLES} 个样本，当前 {signal.size}")
    if not np.all(np.isfinite(signal)):
        raise UndefinedPhaseError("信号含有非有限值")
    centered = signal - signal.mean()
    if np.ptp(signal) == 0.0:
        raise UndefinedPhaseError("常数信号没有定义相位")

    analytic = hilbert(centered)
    phase = np.degrees(np.arctan2(analytic.imag, analytic.real))
    phase = np.where(phase <= -180.0, phase + 360.0, phase)
    amplitude = np.abs(analytic)
    return np.where(amplitude > amplitude_floor * amplitude.max(), phase, np.nan)


def window_slice(n_samples: int, window_fraction: float) -> slice:
    """运行末尾 window_fraction 比例的采样区间"""
    count = int(round(n_samples * window_fraction))
    if count < 1:
        raise ConfigError(f"统计窗口为空: 共 {n_samples} 个采样，窗口比例 {window_fraction}")
    return slice(n_samples - count, n_samples)


def phase_matrix(states: np.ndarray, window_fraction: float = 0.2, amplitude_floor: float = 1e-9) -> np.ndarray:
    """
    全部振子第一分量的相位序列（统计窗口内）

    在整条轨迹上做 Hilbert 变换后截取窗口，减小端点效应。

    Args:
        states: 三层轨迹，形状 (采样数, 3, N, 3)

    Returns:
        形状 (窗口采样数, 3N)，列按层、节点排列
    """
    states = np.asarray(states, dtype=np.float64)
    n_samples = states.shape[0]
    columns = states[..., 0].reshape(n_samples, -1)
    window = window_slice(n_samples, window_fraction)
    phases = np.full(columns.shape, np.nan)
    for k in range(columns.shape[1]):
        try:
            phases[:, k] = hilbert_phase(columns[:, k], amplitude_floor)
        except UndefinedPhaseError as e:
            logger.warning(f"振子 {k} 的相位无定义，记为 NaN: {e}")
    return phases[window]


def phase_snapshot(phases: np.ndarray) -> Tuple[int, np.ndarray]:
    """取窗口中间时刻的相位快照，返回 (窗口内下标, 相位)"""
    index = phases.shape[0] // 2
    return index, phases[index]


def layer_errors(states: np.ndarray, window_fraction: float = 0.2) -> LayerErrors:
    """
    窗口平均的层内误差与层间误差

    Args:
        states: 三层轨迹，形状 (采样数, 3, N, 3)
        window_fraction: 窗口占运行末尾的比例
    """
    states = np.asarray(states, dtype=np.float64)
    if states.ndim != 4 or states.shape[1] != 3:
        raise ConfigError(f"三层轨迹形状应为 (采样数, 3, N, 3)，实际 {states.shape}")
    window = states[window_slice(states.shape[0], window_fraction)]
    intra = intra_errors(window).mean(axis=0)
    inter = inter_errors(window).mean(axis=0)
    return LayerErrors(
        intra=(float(intra[0]), float(intra[1]), float(intra[2])),
        inter={pair: float(inter[k]) for k, pair in enumerate(LAYER_PAIRS)},
    )


def classify_regime(errors: LayerErrors, delta: float = 1e-3) -> RegimeLabel:
    """
    按层内、层间误差判定区域

    AllSync: 全部误差 < δ
    Sync13: 层内全同步，1、3 层同步，2 层与两者都不同步
    ChimeraLike: 1、3 层各自同步且相互同步，2 层内部无序
    ThreeClusters: 层内全同步，层间两两不同步
    """
    intra1, intra2, intra3 = errors.intra
    inter12 = errors.inter[(1, 2)]
    inter13 = errors.inter[(1, 3)]
    inter23 = errors.inter[(2, 3)]
    values = [intra1, intra2, intra3, inter12, inter13, inter23]
    if any(np.isnan(v) for v in values):
        return RegimeLabel.UNCLASSIFIED

    intra_sync = intra1 < delta and intra2 < delta and intra3 < delta
    if intra_sync and inter12 < delta and inter13 < delta and inter23 < delta:
        return RegimeLabel.ALL_SYNC
    if intra_sync and inter13 < delta and min(inter12, inter23) >= delta:
        return RegimeLabel.SYNC13
    if intra1 < delta and intra3 < delta and inter13 < delta and intra2 >= delta:
        return RegimeLabel.CHIMERA_LIKE
    if intra_sync and inter12 >= delta and inter13 >= delta and inter23 >= delta:
        return RegimeLabel.THREE_CLUSTERS
    return RegimeLabel.UNCLASSIFIED


def circular_distances(phases_deg: np.ndarray) -> np.ndarray:
    """两两圆周距离（度），返回 pdist 格式的压缩向量"""
    diff = np.abs(phases_deg[:, None] - phases_deg[None, :]) % 360.0
    square = np.minimum(diff, 360.0 - diff)
    np.fill_diagonal(square, 0.0)
    return squareform(square, checks=False)


def cluster_count(phases_deg, tolerance_deg: float = 5.0) -> int:
    """
    相位快照的簇数

    圆周距离上的单链接聚类，簇间距离大于容差即分开；NaN 相位不参与。
    """
    phases = np.asarray(phases_deg, dtype=np.float64).ravel()
    phases = phases[np.isfinite(phases)]
    if phases.size == 0:
        return 0
    if phases.size == 1:
        return 1
    tree = linkage(circular_distances(phases), method="single")
    labels = fcluster(tree, t=tolerance_deg, criterion="distance")
    return int(np.unique(labels).size)


def analyze_trajectory(states: np.ndarray, settings: Optional[AnalysisSettings] = None) -> dict:
    """
    对三层轨迹做完整后处理

    Returns:
        包含 layer_errors、regime、cluster_count、phases、snapshot 的字典
    """
    settings = settings or AnalysisSettings()
    errors = layer_errors(states, settings.window_fraction)
    regime = classify_regime(errors, settings.delta)
    phases = phase_matrix(states, settings.window_fraction, settings.amplitude_floor)
    snapshot_index, snapshot = phase_snapshot(phases)
    clusters = cluster_count(snapshot, settings.cluster_tolerance_deg)
    logger.info(f"区域判定: {regime.value}, 相位簇数: {clusters}")
    return {
        "layer_errors": errors,
        "regime": regime,
        "cluster_count": clusters,
        "phases": phases,
        "snapshot_index": snapshot_index,
        "snapshot": snapshot,
    }
