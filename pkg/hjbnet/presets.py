"""
预设配置模块 - 定义所有命名运行配置
每个预设是一份 ConfigDocument 字典，命令行通过 --preset 选择
"""

from enum import Enum
from typing import Dict

from .exceptions import ConfigError
from .models.configs import ConfigDocument


class PresetName(str, Enum):
    """预设名称枚举"""

    UNCONTROLLED = "uncontrolled"
    CONTROLLED = "controlled"
    WEIGHTS_SLOW = "weights-slow"
    WEIGHTS_MID = "weights-mid"
    WEIGHTS_FAST = "weights-fast"
    DECOUPLED_LAYERS = "decoupled-layers"
    REGIME_ALLSYNC = "regime-allsync"
    REGIME_THREE_CLUSTERS = "regime-three-clusters"
    SMALL_REGIME_ALLSYNC = "small-regime-allsync"
    SMALL_REGIME_THREE_CLUSTERS = "small-regime-three-clusters"
    # ε₁ = ε₃ = 0.6 平面上的其他工作点，实测均为 AllSync
    OUTER_COUPLED_EPS2_0125 = "outer-coupled-eps2-0.125"
    OUTER_COUPLED_EPS2_011 = "outer-coupled-eps2-0.11"
    OUTER_COUPLED_EPS2_0005 = "outer-coupled-eps2-0.005"
    SMALL_OUTER_COUPLED_EPS2_0115 = "small-outer-coupled-eps2-0.115"
    SMALL_OUTER_COUPLED_EPS2_0005 = "small-outer-coupled-eps2-0.005"
    PHASE_GRID = "phase-grid"
    PHASE_GRID_SMALL = "phase-grid-small"
    CIRCUIT_THETA_02 = "circuit-theta-0.2"
    CIRCUIT_THETA_05 = "circuit-theta-0.5"
    CIRCUIT_MULTILAYER = "circuit-multilayer"


def _single(lam: float = 1.0, eta: float = 10.0, control: bool = True) -> Dict:
    return {
        "kind": "single",
        "network": {"n_nodes": 50, "weights": {"lam": lam, "eta": eta}, "control_enabled": control},
    }


def _regime(eps2: float, lam13: float, n_nodes: int = 50, outer_eps: float = 0.6) -> Dict:
    """
    第 1、3 层权重 λ^{1,3}/10，第 2 层 0.95/10，ε₁ = ε₃ = outer_eps

    outer_eps = 0.6 时 1、3 层与第 2 层之差的衰减率至少为 ε₁ + 2ε₂ ≥ 0.6，
    三层总是完全同步；三簇需要把层间耦合全部关掉。
    """
    outer = {"lam": lam13, "eta": 10.0}
    return {
        "kind": "multilayer",
        "multilayer": {
            "n_nodes": n_nodes,
            "weights": [outer, {"lam": 0.95, "eta": 10.0}, outer],
            "eps": [outer_eps, eps2, outer_eps],
        },
    }


def _circuit(r12: float, r14: float) -> Dict:
    return {
        "kind": "circuit",
        "circuit": {"R12": r12, "R13": 10e3, "R14": r14, "R15": 10e3, "Rin": 10e3},
    }


# ========== 预设配置 ==========

PRESETS: Dict[PresetName, Dict] = {
    PresetName.UNCONTROLLED: _single(control=False),
    PresetName.CONTROLLED: _single(),
    PresetName.WEIGHTS_SLOW: _single(lam=1.0, eta=100.0),
    PresetName.WEIGHTS_MID: _single(lam=1.0, eta=10.0),
    PresetName.WEIGHTS_FAST: _single(lam=2.0, eta=10.0),
    PresetName.DECOUPLED_LAYERS: {
        "kind": "multilayer",
        "multilayer": {"n_nodes": 50, "eps": [0.0, 0.0, 0.0]},
    },
    PresetName.REGIME_ALLSYNC: _regime(0.4, 3.0),
    PresetName.REGIME_THREE_CLUSTERS: _regime(0.0, 1.0, outer_eps=0.0),
    PresetName.SMALL_REGIME_ALLSYNC: _regime(0.4, 3.0, n_nodes=3),
    PresetName.SMALL_REGIME_THREE_CLUSTERS: _regime(0.0, 1.0, n_nodes=3, outer_eps=0.0),
    PresetName.OUTER_COUPLED_EPS2_0125: _regime(0.125, 1.9),
    PresetName.OUTER_COUPLED_EPS2_011: _regime(0.11, 1.9),
    PresetName.OUTER_COUPLED_EPS2_0005: _regime(0.005, 1.0),
    PresetName.SMALL_OUTER_COUPLED_EPS2_0115: _regime(0.115, 2.6, n_nodes=3),
    PresetName.SMALL_OUTER_COUPLED_EPS2_0005: _regime(0.005, 1.0, n_nodes=3),
    PresetName.PHASE_GRID: {"kind": "sweep", "sweep": {"n_nodes": 50}},
    PresetName.PHASE_GRID_SMALL: {"kind": "sweep", "sweep": {"n_nodes": 3}},
    PresetName.CIRCUIT_THETA_02: _circuit(50e3, 50e3),
    PresetName.CIRCUIT_THETA_05: _circuit(20e3, 20e3),
    PresetName.CIRCUIT_MULTILAYER: {
        **_circuit(20e3, 20e3),
        "circuit_run": {"n_layers": 3, "eps": 0.5},
    },
}


def list_presets() -> Dict[str, str]:
    """预设名称到运行类型的映射"""
    return {name.value: payload["kind"] for name, payload in PRESETS.items()}


def get_preset(name: str) -> ConfigDocument:
    """按名称取预设配置，名称未知时抛出 ConfigError"""
    try:
        key = PresetName(name)
    except ValueError:
        raise ConfigError(f"未知的预设: {name}（可用: {', '.join(p.value for p in PresetName)}）") from None
    return ConfigDocument.model_validate(PRESETS[key])
