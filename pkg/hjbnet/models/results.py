"""
数值结果容器

积分产生的数组放在普通 dataclass 中（numpy 数组不适合放进 pydantic 模型），
summary() 负责转换为可写入 JSON 的字典。
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np


class RegimeLabel(str, Enum):
    """三层网络运行结束后的动力学区域"""

    ALL_SYNC = "AllSync"
    SYNC13 = "Sync13"
    CHIMERA_LIKE = "ChimeraLike"
    THREE_CLUSTERS = "ThreeClusters"
    UNCLASSIFIED = "Unclassified"

    @property
    def code(self) -> int:
        return REGIME_CODES[self]

    @classmethod
    def from_code(cls, code: int) -> "RegimeLabel":
        for label, value in REGIME_CODES.items():
            if value == code:
                return label
        raise ValueError(f"未知的区域编码: {code}")


REGIME_CODES: Dict[RegimeLabel, int] = {
    RegimeLabel.ALL_SYNC: 0,
    RegimeLabel.SYNC13: 1,
    RegimeLabel.CHIMERA_LIKE: 2,
    RegimeLabel.THREE_CLUSTERS: 3,
    RegimeLabel.UNCLASSIFIED: 4,
}

LAYER_PAIRS: Tuple[Tuple[int, int], ...] = ((1, 2), (1, 3), (2, 3))


@dataclass
class NetworkState:
    """单网络在某一时刻的状态，states 形状 (N, 3)"""

    t: float
    states: np.ndarray


@dataclass
class MultilayerState:
    """三层网络在某一时刻的状态，states 形状 (3, N, 3)，依次为 X、Y、Z"""

    t: float
    states: np.ndarray

    @property
    def n_nodes(self) -> int:
        return int(self.states.shape[1])


@dataclass
class TrajectoryBound:
    """每个节点状态范数的运行最大值 L_i 及全局最大值 L_max"""

    node_max: np.ndarray

    @classmethod
    def empty(cls, n_nodes: int) -> "TrajectoryBound":
        return cls(node_max=np.zeros(n_nodes, dtype=np.float64))

    @property
    def l_max(self) -> float:
        return float(self.node_max.max()) if self.node_max.size else 0.0

    def update(self, states: np.ndarray) -> None:
        norms = np.linalg.norm(states.reshape(-1, 3), axis=1)
        np.maximum(self.node_max, norms, out=self.node_max)


@dataclass
class PerformanceAccumulator:
    """性能指标 J = ∫Ω dt，按梯形公式逐步累加"""

    J: float = 0.0
    last_omega: Optional[float] = None

    def add(self, omega: float, h: float) -> None:
        if self.last_omega is not None:
            self.J += 0.5 * h * (self.last_omega + omega)
        self.last_omega = omega


@dataclass
class SyncErrorSeries:
    """同步误差时间序列 e(t)"""

    times: np.ndarray
    values: np.ndarray

    def time_to_sync(self, delta: float = 1e-3) -> Optional[float]:
        """e(t) 首次低于 δ 且此后一直保持的时刻；运行结束时仍未同步返回 None"""
        above = self.values >= delta
        if above.size == 0 or above[-1]:
            return None
        hits = np.flatnonzero(above)
        if hits.size == 0:
            return float(self.times[0])
        return float(self.times[hits[-1] + 1])

    def tail_mean(self, fraction: float) -> float:
        count = max(1, int(round(len(self.values) * fraction)))
        return float(np.mean(self.values[-count:]))


@dataclass
class SingleRunResult:
    """单网络运行结果"""

    times: np.ndarray
    states: np.ndarray  # (采样数, N, 3)
    errors: SyncErrorSeries
    performance: PerformanceAccumulator
    bound: TrajectoryBound

    def summary(self, delta: float = 1e-3) -> dict:
        return {
            "time_to_sync": self.errors.time_to_sync(delta),
            "final_error": float(self.errors.values[-1]),
            "J": self.performance.J,
            "L_max": self.bound.l_max,
            "samples": int(len(self.times)),
        }


@dataclass
class LayerErrors:
    """窗口平均的层内误差（三层）与层间误差（三对）"""

    intra: Tuple[float, float, float]
    inter: Dict[Tuple[int, int], float]

    def as_row(self) -> List[float]:
        return [*self.intra, *(self.inter[pair] for pair in LAYER_PAIRS)]

    def to_dict(self) -> dict:
        return {
            "intra": list(self.intra),
            "inter": {f"{a}{b}": self.inter[(a, b)] for a, b in LAYER_PAIRS},
        }


@dataclass
class MultilayerRunResult:
    """三层网络运行结果"""

    times: np.ndarray
    states: np.ndarray  # (采样数, 3, N, 3)
    intra: np.ndarray  # (采样数, 3)
    inter: np.ndarray  # (采样数, 3)，列顺序同 LAYER_PAIRS
    performance: Tuple[PerformanceAccumulator, PerformanceAccumulator, PerformanceAccumulator]
    bound: TrajectoryBound

    def layer_series(self, layer: int) -> SyncErrorSeries:
        return SyncErrorSeries(times=self.times, values=self.intra[:, layer])


@dataclass
class CombinedError:
    """三层联合误差 ξ = x + y − 2z 以及非线性项 G"""

    xi: np.ndarray  # (N, 3)
    G: np.ndarray  # (N,)


@dataclass
class StabilitySnapshot:
    """联合误差的稳定性监测量"""

    v: np.ndarray  # (N,)
    Q: np.ndarray  # (3, 3)
    lambda_min: float
    w: np.ndarray  # (N,)
    L: float


@dataclass
class StabilitySeries:
    """沿轨迹的 v_i(t)、w_i(t) 与 ∫w dt"""

    times: np.ndarray
    v: np.ndarray  # (采样数, N)
    w: np.ndarray  # (采样数, N)
    w_integral: np.ndarray  # (N,)
    lambda_min: float
    L: float


@dataclass
class SweepCell:
    """扫描网格中的一个格点"""

    weight: float
    eps2: float
    label: RegimeLabel
    errors: LayerErrors
    replicate_labels: List[RegimeLabel] = field(default_factory=list)


@dataclass
class SweepGrid:
    """扫描结果：cells[i][j] 对应 weight_values[i] × eps2_values[j]"""

    weight_values: np.ndarray
    eps2_values: np.ndarray
    cells: List[List[SweepCell]]

    def label_matrix(self) -> np.ndarray:
        return np.array([[cell.label.code for cell in row] for row in self.cells], dtype=int)

    def iter_cells(self):
        for row in self.cells:
            yield from row


@dataclass
class CircuitRunResult:
    """电路网络运行结果，电压形状 (采样数, 层数, N, 3)"""

    times: np.ndarray
    voltages: np.ndarray
    xi: float
    errors: List[SyncErrorSeries]

    @property
    def scaled_states(self) -> np.ndarray:
        """换算回无量纲状态 X = V / ξ"""
        return self.voltages / self.xi
