"""
sweep 命令：λ^{1,3} × ε₂ 相图扫描
"""

import argparse
import logging
from collections import Counter

from ..config import Settings
from ..services.artifact_service import write_json
from ..services.sweep_service import grid_export, run_sweep
from .common import add_common_arguments, drop_none, finish_context, integration_overrides, prepare_context, run_name
from .multilayer import analysis_overrides

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("sweep", help="二维参数扫描")
    add_common_arguments(parser)
    parser.add_argument("--t-end", type=float, help="每次运行的积分终止时间")
    parser.add_argument("--h", type=float, help="积分步长")
    parser.add_argument("--sample-every", type=int, help="采样间隔步数")
    parser.add_argument("--workers", type=int, help="进程数（默认 HJBNET_WORKERS）")
    parser.add_argument("--seeds", type=int, help="每个格点的重复次数")
    parser.add_argument("--n-nodes", type=int, help="每层节点数 N")
    parser.add_argument("--weight", type=float, nargs=3, metavar=("START", "STOP", "STEP"), help="λ^{1,3} 轴")
    parser.add_argument("--eps2", type=float, nargs=3, metavar=("START", "STOP", "STEP"), help="ε₂ 轴")
    parser.add_argument("--delta", type=float, help="同步阈值 δ")
    parser.add_argument("--window", type=float, help="统计窗口占运行末尾的比例")
    parser.add_argument("--tolerance", type=float, help="相位聚类容差（度）")
    parser.set_defaults(handler=run)


def build_overrides(args: argparse.Namespace) -> dict:
    sweep = drop_none({"n_nodes": args.n_nodes, "seeds": args.seeds, "base_seed": args.seed})
    if args.weight:
        sweep.update(dict(zip(("weight_start", "weight_stop", "weight_step"), args.weight)))
    if args.eps2:
        sweep.update(dict(zip(("eps2_start", "eps2_stop", "eps2_step"), args.eps2)))
    integration = integration_overrides(args)
    if integration:
        sweep["integration"] = integration
    analysis = analysis_overrides(args)
    if analysis:
        sweep["analysis"] = analysis
    return {"sweep": sweep}


def run(args: argparse.Namespace, settings: Settings) -> None:
    ctx = prepare_context(
        args,
        settings,
        command="sweep",
        kind="sweep",
        build_overrides=build_overrides,
        default_name=lambda doc: run_name("sweep", args.preset, doc.sweep.base_seed),
    )
    document = ctx.document
    spec = document.sweep
    workers = args.workers or settings.workers

    # 检查点不算作运行产物，重放时照常复用
    grid = run_sweep(spec, workers=workers, checkpoint_path=ctx.run_dir / "checkpoint.sqlite")
    grid_export(grid, ctx.output("grid.csv"))

    counts = Counter(cell.label.value for cell in grid.iter_cells())
    summary = {
        "weight_values": grid.weight_values.tolist(),
        "eps2_values": grid.eps2_values.tolist(),
        "label_counts": dict(sorted(counts.items())),
        "cells": len(grid.weight_values) * len(grid.eps2_values),
    }
    write_json(ctx.output("summary.json"), summary)
    finish_context(ctx, document, spec.base_seed)
    logger.info(f"扫描区域统计: {summary['label_counts']}")
