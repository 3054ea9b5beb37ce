"""
命令行公共部分：配置解析、输出目录和运行清单

配置优先级：模型默认值 < --preset < --config 文件 < 命令行参数。
--manifest 直接使用清单中已解析的完整配置，只有 --out 可以覆盖。
"""

import argparse
import logging
import platform
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np
import scipy

from .. import __version__
from ..config import Settings, config_summary, get_run_dir
from ..exceptions import ConfigError
from ..models.configs import ConfigDocument, RunManifest
from ..presets import get_preset
from ..services.artifact_service import load_config_document, load_manifest, write_manifest

logger = logging.getLogger(__name__)


def add_common_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--preset", help="命名预设")
    parser.add_argument("--config", type=Path, help="JSON 配置文档")
    parser.add_argument("--manifest", type=Path, help="按运行清单重放")
    parser.add_argument("--out", type=Path, help="输出目录（默认 DATA_DIR/runs/<名称>）")
    parser.add_argument("--seed", type=int, help="随机种子")
    parser.add_argument("--log-level", help="日志级别（默认取 HJBNET_LOG_LEVEL）")


def add_integration_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--t-end", type=float, help="积分终止时间")
    parser.add_argument("--h", type=float, help="积分步长")
    parser.add_argument("--sample-every", type=int, help="采样间隔步数")


def integration_overrides(args: argparse.Namespace) -> Dict:
    return drop_none({"t_end": args.t_end, "h": args.h, "sample_every": args.sample_every})


def drop_none(values: Dict) -> Dict:
    return {key: value for key, value in values.items() if value is not None}


def deep_merge(base: Dict, override: Dict) -> Dict:
    """
    递归合并字典，override 中的值优先

    等长的字典列表（如三层权重）逐项合并，其余列表整体替换。
    """
    merged = dict(base)
    for key, value in override.items():
        current = merged.get(key)
        if isinstance(value, dict) and isinstance(current, dict):
            merged[key] = deep_merge(current, value)
        elif _dict_list(value) and _dict_list(current) and len(value) == len(current):
            merged[key] = [deep_merge(old, new) for old, new in zip(current, value)]
        else:
            merged[key] = value
    return merged


def _dict_list(value) -> bool:
    return isinstance(value, list) and all(isinstance(item, dict) for item in value)


@dataclass
class RunContext:
    """一次命令运行的解析结果"""

    command: str
    document: ConfigDocument
    run_dir: Path
    settings: Settings
    inputs: List[str] = field(default_factory=list)
    outputs: List[Path] = field(default_factory=list)
    started: float = field(default_factory=time.perf_counter)

    def output(self, name: str) -> Path:
        path = self.run_dir / name
        self.outputs.append(path)
        return path


def resolve_document(args: argparse.Namespace, kind: str, overrides: Dict) -> ConfigDocument:
    """按优先级合并预设、配置文件和命令行参数并校验"""
    data: Dict = {"kind": kind}
    if args.preset:
        preset = get_preset(args.preset)
        if preset.kind != kind:
            raise ConfigError(f"预设 {args.preset} 属于 {preset.kind} 运行，不能用于 {kind}")
        data = deep_merge(data, preset.model_dump(mode="json", exclude_none=True))
    if args.config:
        document = load_config_document(args.config)
        if document.kind is not None and document.kind != kind:
            raise ConfigError(f"配置文档类型 {document.kind} 与命令 {kind} 不符")
        data = deep_merge(data, document.model_dump(mode="json", exclude_unset=True))
    data = deep_merge(data, overrides)
    return ConfigDocument.model_validate(data)


def prepare_context(
    args: argparse.Namespace,
    settings: Settings,
    command: str,
    kind: str,
    build_overrides: Callable[[argparse.Namespace], Dict],
    default_name: Callable[[ConfigDocument], str],
) -> RunContext:
    """解析配置（或清单）并准备输出目录"""
    inputs: List[str] = []
    if args.manifest:
        manifest = load_manifest(args.manifest)
        if manifest.command != command:
            raise ConfigError(f"清单来自 {manifest.command} 命令，不能用 {command} 重放")
        document = manifest.config
        inputs = list(manifest.inputs)
        run_dir = args.out or Path(args.manifest).resolve().parent
        logger.info(f"按清单重放: {args.manifest}")
    else:
        document = resolve_document(args, kind, build_overrides(args))
        run_dir = args.out or get_run_dir(default_name(document), settings)
    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    return RunContext(command=command, document=document, run_dir=run_dir, settings=settings, inputs=inputs)


def finish_context(ctx: RunContext, document: ConfigDocument, base_seed: int) -> Path:
    """写入运行清单，document 应为补全默认值后的完整配置"""
    manifest = RunManifest(
        command=ctx.command,
        tool_version=__version__,
        base_seed=base_seed,
        config=document,
        inputs=ctx.inputs,
        outputs=[path.name for path in ctx.outputs],
        wall_clock_seconds=round(time.perf_counter() - ctx.started, 3),
        environment={
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            **config_summary(ctx.settings),
        },
    )
    path = write_manifest(ctx.run_dir, manifest)
    logger.info(f"运行完成，产物目录: {ctx.run_dir}")
    return path


def run_name(command: str, preset: Optional[str], seed: int) -> str:
    return f"{command}-{preset or 'custom'}-seed{seed}"
