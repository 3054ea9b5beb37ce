"""
运行配置模型

ConfigDocument 是命令行读取的单一 JSON 配置文档，各段对应一种运行。
所有模型拒绝未知字段，防止键名拼写错误悄悄失效。
"""

from typing import List, Literal, Optional, Tuple

import numpy as np
from pydantic import Field, field_validator, model_validator

from .params import CircuitComponents, ControlWeights, FrozenModel, RosslerParams

Interval = Tuple[float, float]
DEFAULT_IC_RANGE: Tuple[Interval, Interval, Interval] = ((-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0))


def _normalize_ic_range(value):
    """接受单个区间（三个分量共用）或三个区间"""
    if value is None:
        return DEFAULT_IC_RANGE
    items = list(value)
    if len(items) == 2 and all(isinstance(v, (int, float)) for v in items):
        items = [tuple(items)] * 3
    if len(items) != 3:
        raise ValueError(f"ic_range 需要 1 个或 3 个区间: {value}")
    intervals = []
    for item in items:
        low, high = (float(v) for v in item)
        if not np.isfinite(low) or not np.isfinite(high) or low > high:
            raise ValueError(f"无效的初值区间: [{low}, {high}]")
        intervals.append((low, high))
    return tuple(intervals)


def _check_adjacency(adjacency, n_nodes: int):
    if adjacency is None:
        return
    table = np.asarray(adjacency, dtype=np.float64)
    if table.shape not in ((n_nodes, n_nodes), (3, n_nodes, n_nodes)):
        raise ValueError(f"adjacency 形状应为 ({n_nodes}, {n_nodes}) 或 (3, {n_nodes}, {n_nodes})，实际 {table.shape}")
    if not np.all(np.isfinite(table)) or np.any(table < 0):
        raise ValueError("adjacency 权重必须为非负有限数")


class IntegrationSettings(FrozenModel):
    """定步长 RK4 积分设置"""

    t_end: float = Field(default=200.0, gt=0, description="积分终止时间")
    h: float = Field(default=0.01, gt=0, description="步长")
    sample_every: int = Field(default=10, ge=1, description="每隔多少步采样一次")

    @property
    def n_steps(self) -> int:
        return max(1, int(round(self.t_end / self.h)))


class AnalysisSettings(FrozenModel):
    """后处理设置：同步阈值、统计窗口、相位聚类容差"""

    delta: float = Field(default=1e-3, gt=0, description="同步阈值 δ")
    window_fraction: float = Field(default=0.2, gt=0, le=1, description="统计窗口占运行末尾的比例")
    cluster_tolerance_deg: float = Field(default=5.0, gt=0, lt=180, description="相位聚类容差（度）")
    amplitude_floor: float = Field(default=1e-9, ge=0, description="解析信号幅值下限（相对最大幅值）")


class NetworkConfig(FrozenModel):
    """单个网络：N 个受控 Rössler 节点"""

    n_nodes: int = Field(default=50, ge=2, description="节点数 N")
    params: RosslerParams = Field(default_factory=RosslerParams)
    weights: ControlWeights = Field(default_factory=ControlWeights)
    control_enabled: bool = True
    seed: int = Field(default=0, ge=0)
    ic_range: Tuple[Interval, Interval, Interval] = DEFAULT_IC_RANGE
    adjacency: Optional[List] = Field(default=None, description="逐对（可逐分量）的 λ 缩放表，默认全连接")

    @field_validator("ic_range", mode="before")
    @classmethod
    def normalize_ic(cls, value):
        return _normalize_ic_range(value)

    @model_validator(mode="after")
    def validate_adjacency(self):
        _check_adjacency(self.adjacency, self.n_nodes)
        return self


class MultilayerConfig(FrozenModel):
    """三层网络：层内 HJB 控制，层间经第一分量扩散耦合"""

    n_nodes: int = Field(default=50, ge=1, description="每层节点数 N")
    params: RosslerParams = Field(default_factory=RosslerParams)
    weights: Tuple[ControlWeights, ControlWeights, ControlWeights] = Field(
        default_factory=lambda: (ControlWeights(), ControlWeights(), ControlWeights())
    )
    eps: Tuple[float, float, float] = Field(default=(0.0, 0.0, 0.0), description="层间耦合强度 ε₁, ε₂, ε₃")
    control_enabled: bool = True
    seed: int = Field(default=0, ge=0)
    ic_range: Tuple[Interval, Interval, Interval] = DEFAULT_IC_RANGE
    couple_all_components: bool = Field(default=False, description="层间耦合作用于全部分量（非默认模型）")
    adjacency: Optional[List] = None

    @field_validator("ic_range", mode="before")
    @classmethod
    def normalize_ic(cls, value):
        return _normalize_ic_range(value)

    @field_validator("eps")
    @classmethod
    def check_eps(cls, value):
        if any(e < 0 for e in value):
            raise ValueError(f"层间耦合强度不能为负数: {value}")
        return value

    @model_validator(mode="after")
    def validate_adjacency(self):
        _check_adjacency(self.adjacency, self.n_nodes)
        return self

    def layer_network(self, layer: int) -> NetworkConfig:
        """第 layer 层（0 起）对应的单网络配置，用于层间解耦时的逐层对照"""
        return NetworkConfig(
            n_nodes=max(self.n_nodes, 2),
            params=self.params,
            weights=self.weights[layer],
            control_enabled=self.control_enabled,
            seed=self.seed,
            ic_range=self.ic_range,
            adjacency=self.adjacency,
        )


class SweepSpec(FrozenModel):
    """二维参数扫描：第 1、3 层控制权重 λ^{1,3} × 第 2 层耦合 ε₂"""

    weight_start: float = Field(default=1.0, gt=0)
    weight_stop: float = Field(default=3.0, gt=0)
    weight_step: float = Field(default=0.1, gt=0)
    eta13: float = Field(default=10.0, gt=0)
    eps2_start: float = Field(default=0.0, ge=0)
    eps2_stop: float = Field(default=0.4, ge=0)
    eps2_step: float = Field(default=0.01, gt=0)
    lam2: float = Field(default=0.95, gt=0)
    eta2: float = Field(default=10.0, gt=0)
    eps1: float = Field(default=0.6, ge=0)
    eps3: float = Field(default=0.6, ge=0)
    n_nodes: int = Field(default=3, ge=1)
    seeds: int = Field(default=3, ge=1, description="每个格点的重复次数（多数表决）")
    base_seed: int = Field(default=0, ge=0)
    params: RosslerParams = Field(default_factory=RosslerParams)
    integration: IntegrationSettings = Field(default_factory=IntegrationSettings)
    analysis: AnalysisSettings = Field(default_factory=AnalysisSettings)

    @model_validator(mode="after")
    def check_axes(self):
        if self.weight_stop < self.weight_start:
            raise ValueError("权重轴为空: weight_stop < weight_start")
        if self.eps2_stop < self.eps2_start:
            raise ValueError("ε₂ 轴为空: eps2_stop < eps2_start")
        return self

    @staticmethod
    def _axis(start: float, stop: float, step: float) -> np.ndarray:
        count = int(round((stop - start) / step)) + 1
        return np.round(np.linspace(start, stop, count), 12)

    @property
    def weight_values(self) -> np.ndarray:
        return self._axis(self.weight_start, self.weight_stop, self.weight_step)

    @property
    def eps2_values(self) -> np.ndarray:
        return self._axis(self.eps2_start, self.eps2_stop, self.eps2_step)

    def cell_config(self, weight: float, eps2: float, seed: int) -> MultilayerConfig:
        """构造单个格点的三层网络配置"""
        outer = ControlWeights(lam=float(weight), eta=self.eta13)
        middle = ControlWeights(lam=self.lam2, eta=self.eta2)
        return MultilayerConfig(
            n_nodes=self.n_nodes,
            params=self.params,
            weights=(outer, middle, outer),
            eps=(self.eps1, float(eps2), self.eps3),
            seed=seed,
        )


class CircuitRunSettings(FrozenModel):
    """电路网络运行设置"""

    n_nodes: int = Field(default=3, ge=2, description="每个网络的电路节点数")
    n_layers: Literal[1, 3] = Field(default=1, description="1 为单个网络，3 为三层网络")
    eps: float = Field(default=0.0, ge=0, description="层间耦合强度")
    clamp: bool = Field(default=False, description="按电源轨截断电压")
    seed: int = Field(default=0, ge=0)
    horizon: float = Field(default=10.0, gt=0, description="等效性检验时长")


class ConfigDocument(FrozenModel):
    """命令行配置文档，各段可选"""

    kind: Optional[Literal["single", "multilayer", "sweep", "circuit"]] = None
    network: Optional[NetworkConfig] = None
    multilayer: Optional[MultilayerConfig] = None
    sweep: Optional[SweepSpec] = None
    circuit: Optional[CircuitComponents] = None
    circuit_run: Optional[CircuitRunSettings] = None
    integration: Optional[IntegrationSettings] = None
    analysis: Optional[AnalysisSettings] = None


class RunManifest(FrozenModel):
    """运行清单：足以原样复现一次运行"""

    command: str
    tool_version: str
    base_seed: int
    config: ConfigDocument
    inputs: List[str] = Field(default_factory=list, description="运行读取的输入文件")
    outputs: List[str] = Field(default_factory=list)
    wall_clock_seconds: float = 0.0
    environment: dict = Field(default_factory=dict)
