from .params import CircuitComponents, ControlWeights, RosslerParams
from .configs import (
    AnalysisSettings,
    CircuitRunSettings,
    ConfigDocument,
    IntegrationSettings,
    MultilayerConfig,
    NetworkConfig,
    RunManifest,
    SweepSpec,
)
from .results import RegimeLabel

__all__ = [
    "AnalysisSettings",
    "CircuitComponents",
    "CircuitRunSettings",
    "ConfigDocument",
    "ControlWeights",
    "IntegrationSettings",
    "MultilayerConfig",
    "NetworkConfig",
    "RegimeLabel",
    "RosslerParams",
    "RunManifest",
    "SweepSpec",
]
