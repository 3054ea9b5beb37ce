"""
single 命令：单网络同步
"""

import argparse
import logging

from ..config import Settings
from ..services.artifact_service import write_error_series, write_json, write_single_trajectory
from ..services.network_service import run_single
from .common import (
    add_common_arguments,
    add_integration_arguments,
    drop_none,
    finish_context,
    integration_overrides,
    prepare_context,
    run_name,
)

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("single", help="单个受控网络")
    add_common_arguments(parser)
    add_integration_arguments(parser)
    parser.add_argument("--n-nodes", type=int, help="节点数 N")
    parser.add_argument("--lam", type=float, help="λ")
    parser.add_argument("--eta", type=float, help="η")
    parser.add_argument("--alpha", type=float, help="α（默认 λ/η）")
    parser.add_argument("--no-control", action="store_true", help="关闭控制")
    parser.add_argument("--delta", type=float, help="同步阈值 δ")
    parser.set_defaults(handler=run)


def build_overrides(args: argparse.Namespace) -> dict:
    network = drop_none({"n_nodes": args.n_nodes, "seed": args.seed})
    weights = drop_none({"lam": args.lam, "eta": args.eta, "alpha": args.alpha})
    if weights:
        network["weights"] = weights
    if args.no_control:
        network["control_enabled"] = False
    return {
        "network": network,
        "integration": integration_overrides(args),
        "analysis": drop_none({"delta": args.delta}),
    }


def run(args: argparse.Namespace, settings: Settings) -> None:
    ctx = prepare_context(
        args,
        settings,
        command="single",
        kind="single",
        build_overrides=build_overrides,
        default_name=lambda doc: run_name("single", args.preset, doc.network.seed),
    )
    document = ctx.document
    cfg = document.network
    result = run_single(cfg, document.integration)

    write_single_trajectory(ctx.output("trajectory.csv"), result)
    write_error_series(ctx.output("sync_error.csv"), result.times, result.errors.values)
    summary = result.summary(document.analysis.delta)
    write_json(ctx.output("summary.json"), summary)
    finish_context(ctx, document, cfg.seed)
    logger.info(f"单网络结果: {summary}")
