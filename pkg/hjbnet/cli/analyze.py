"""
analyze 命令：对已有三层轨迹重新做后处理，不重新积分
"""

import argparse
import logging
from pathlib import Path

from ..config import Settings
from ..exceptions import ConfigError
from ..services.artifact_service import read_multilayer_trajectory, write_json
from .common import add_common_arguments, finish_context, prepare_context
from .multilayer import add_analysis_arguments, analysis_overrides, write_analysis

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("analyze", help="重新分析三层轨迹 CSV")
    add_common_arguments(parser)
    parser.add_argument("--trajectory", type=Path, help="multilayer 命令输出的 trajectory.csv")
    add_analysis_arguments(parser)
    parser.set_defaults(handler=run)


def build_overrides(args: argparse.Namespace) -> dict:
    return {"analysis": analysis_overrides(args)}


def run(args: argparse.Namespace, settings: Settings) -> None:
    ctx = prepare_context(
        args,
        settings,
        command="analyze",
        kind="multilayer",
        build_overrides=build_overrides,
        default_name=lambda doc: f"analyze-{Path(args.trajectory).resolve().parent.name}" if args.trajectory else "analyze",
    )
    if not ctx.inputs:
        if args.trajectory is None:
            raise ConfigError("analyze 需要 --trajectory 或 --manifest")
        ctx.inputs = [str(Path(args.trajectory).resolve())]
    document = ctx.document

    times, states = read_multilayer_trajectory(Path(ctx.inputs[0]))
    logger.info(f"读取轨迹: {ctx.inputs[0]}，{len(times)} 个采样，每层 {states.shape[2]} 个节点")
    summary = write_analysis(ctx, times, states, document.analysis)
    write_json(ctx.output("analysis.json"), summary)
    finish_context(ctx, document, 0)
