"""
模型参数 - 振子常数、HJB 控制权重和电路元件值

所有参数模型都是不可变的 pydantic 模型，拒绝未知字段和非有限数值。
"""

from typing import Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

Vector3 = Tuple[float, float, float]


class FrozenModel(BaseModel):
    """严格模式的基础模型：不可变、拒绝未知字段、拒绝 NaN/Inf"""

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)


class RosslerParams(FrozenModel):
    """Rössler 振子常数 a, b, c（第三式使用 b·x¹ 形式）"""

    a: float = Field(default=0.36, description="x² 的自反馈系数")
    b: float = Field(default=0.4, description="x¹ 对 x³ 的驱动系数")
    c: float = Field(default=4.5, description="x³ 的阈值系数")


class ControlWeights(FrozenModel):
    """
    HJB 最优控制权重

    lam、eta 可以是标量（三个分量共用）或三元组（逐分量）。
    theta = lam / eta 为反馈增益；alpha 为性能指标中的状态惩罚权重，
    未指定时取 lam / eta。
    """

    lam: Union[float, Vector3] = Field(default=1.0, description="λ：Lyapunov 函数权重")
    eta: Union[float, Vector3] = Field(default=10.0, description="η：控制能量权重")
    alpha: Optional[Union[float, Vector3]] = Field(default=None, description="α：状态惩罚权重")

    @field_validator("lam", "eta")
    @classmethod
    def check_positive(cls, value):
        values = value if isinstance(value, tuple) else (value,)
        if any(v <= 0 for v in values):
            raise ValueError(f"权重必须为正数: {value}")
        return value

    @field_validator("alpha")
    @classmethod
    def check_nonnegative(cls, value):
        if value is None:
            return value
        values = value if isinstance(value, tuple) else (value,)
        if any(v < 0 for v in values):
            raise ValueError(f"alpha 不能为负数: {value}")
        return value

    @property
    def lam_vector(self) -> np.ndarray:
        return np.broadcast_to(np.asarray(self.lam, dtype=np.float64), (3,)).copy()

    @property
    def eta_vector(self) -> np.ndarray:
        return np.broadcast_to(np.asarray(self.eta, dtype=np.float64), (3,)).copy()

    @property
    def theta(self) -> np.ndarray:
        """逐分量增益 θ^k = λ^k / η^k"""
        return self.lam_vector / self.eta_vector

    @property
    def alpha_vector(self) -> np.ndarray:
        if self.alpha is None:
            return self.theta
        return np.broadcast_to(np.asarray(self.alpha, dtype=np.float64), (3,)).copy()

    def is_uniform(self) -> bool:
        """三个分量权重是否完全相同"""
        theta = self.theta
        return bool(np.all(theta == theta[0]))


class CircuitComponents(FrozenModel):
    """
    电路元件值（单位：法拉、欧姆、伏特）

    R1..R11 与电容构成振子本体，R12..R15 与 Rin 构成控制器电桥。
    默认控制器电桥对应 θ = 0.2（λ=2, η=10）。
    """

    C1: float = Field(default=10e-9, gt=0)
    C2: float = Field(default=10e-9, gt=0)
    C3: float = Field(default=10e-9, gt=0)
    R1: float = Field(default=10e3, gt=0)
    R2: float = Field(default=10e3, gt=0)
    R3: float = Field(default=10e3, gt=0)
    R4: float = Field(default=10e3, gt=0)
    R5: float = Field(default=10e3, gt=0)
    R6: float = Field(default=27.8e3, gt=0)
    R7: float = Field(default=10e3, gt=0)
    R8: float = Field(default=10e3, gt=0)
    R9: float = Field(default=25e3, gt=0)
    R10: float = Field(default=2.22e3, gt=0)
    R11: float = Field(default=10e3, gt=0)
    # 控制器电桥电阻允许为 0（断开反馈支路）
    R12: float = Field(default=50e3, gt=0)
    R13: float = Field(default=10e3, ge=0)
    R14: float = Field(default=50e3, ge=0)
    R15: float = Field(default=10e3, ge=0)
    Rin: float = Field(default=10e3, gt=0)
    xi: float = Field(default=1e4, gt=0, description="电压缩放因子 V = ξX")
    multiplier_gain: Optional[float] = Field(default=None, gt=0, description="乘法器增益 (1/V)，默认 1/ξ")
    Up: float = Field(default=15.0, description="正电源轨")
    Un: float = Field(default=-15.0, description="负电源轨")

    @field_validator("Un")
    @classmethod
    def check_rails(cls, value, info):
        up = info.data.get("Up")
        if up is not None and value >= up:
            raise ValueError(f"负电源轨必须低于正电源轨: Un={value}, Up={up}")
        return value

    @property
    def multiplier(self) -> float:
        return self.multiplier_gain if self.multiplier_gain is not None else 1.0 / self.xi

    @property
    def capacitances(self) -> np.ndarray:
        return np.array([self.C1, self.C2, self.C3], dtype=np.float64)
