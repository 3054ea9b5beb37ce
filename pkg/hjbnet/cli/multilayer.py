"""
multilayer 命令：三层网络、区域判定与相位输出
"""

import argparse
import logging

import numpy as np

from ..config import Settings
from ..exceptions import ConfigError, UndefinedEstimateError
from ..models.configs import AnalysisSettings
from ..services.analysis_service import analyze_trajectory, window_slice
from ..services.artifact_service import (
    write_error_series,
    write_json,
    write_multilayer_trajectory,
    write_phase_series,
    write_phase_snapshot,
)
from ..services.multilayer_service import estimate_L, run_multilayer, stability_monitor
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

ERROR_COLUMNS = ("intra1", "intra2", "intra3", "inter12", "inter13", "inter23")


def register(subparsers) -> None:
    parser = subparsers.add_parser("multilayer", help="三层耦合网络")
    add_common_arguments(parser)
    add_integration_arguments(parser)
    parser.add_argument("--n-nodes", type=int, help="每层节点数 N")
    parser.add_argument("--eps", type=float, nargs=3, metavar=("EPS1", "EPS2", "EPS3"), help="层间耦合强度")
    parser.add_argument("--lam", type=float, nargs=3, metavar=("L1", "L2", "L3"), help="各层 λ")
    parser.add_argument("--eta", type=float, nargs=3, metavar=("E1", "E2", "E3"), help="各层 η")
    parser.add_argument("--no-control", action="store_true", help="关闭层内控制")
    parser.add_argument("--couple-all", action="store_true", help="层间耦合作用于全部分量（非默认模型）")
    add_analysis_arguments(parser)
    parser.set_defaults(handler=run)


def add_analysis_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--delta", type=float, help="同步阈值 δ")
    parser.add_argument("--window", type=float, help="统计窗口占运行末尾的比例")
    parser.add_argument("--tolerance", type=float, help="相位聚类容差（度）")


def analysis_overrides(args: argparse.Namespace) -> dict:
    return drop_none(
        {"delta": args.delta, "window_fraction": args.window, "cluster_tolerance_deg": args.tolerance}
    )


def build_overrides(args: argparse.Namespace) -> dict:
    multilayer = drop_none({"n_nodes": args.n_nodes, "seed": args.seed, "eps": args.eps})
    if args.lam or args.eta:
        # 只写入给出的分量，其余沿用预设或配置文件中的值
        lam = args.lam or [None] * 3
        eta = args.eta or [None] * 3
        multilayer["weights"] = [drop_none({"lam": l, "eta": e}) for l, e in zip(lam, eta)]
    if args.no_control:
        multilayer["control_enabled"] = False
    if args.couple_all:
        multilayer["couple_all_components"] = True
    return {
        "multilayer": multilayer,
        "integration": integration_overrides(args),
        "analysis": analysis_overrides(args),
    }


def write_analysis(ctx, times: np.ndarray, states: np.ndarray, settings: AnalysisSettings) -> dict:
    """写出相位序列、相位快照，返回区域判定摘要"""
    report = analyze_trajectory(states, settings)
    n_nodes = states.shape[2]
    window_times = times[window_slice(len(times), settings.window_fraction)]
    write_phase_series(ctx.output("phase_series.csv"), window_times, report["phases"], n_nodes)
    snapshot_time = float(window_times[report["snapshot_index"]])
    write_phase_snapshot(ctx.output("phase_snapshot.csv"), snapshot_time, report["snapshot"], n_nodes)
    return {
        "regime": report["regime"].value,
        "regime_code": report["regime"].code,
        "cluster_count": report["cluster_count"],
        "snapshot_time": snapshot_time,
        "layer_errors": report["layer_errors"].to_dict(),
    }


def stability_summary(result, cfg) -> dict:
    """三层耦合强度相同时给出 λ_min(Q) 与经验 L，否则为 null"""
    try:
        L = estimate_L(result.states, cfg.params)
    except UndefinedEstimateError as e:
        logger.warning(f"无法估计 L: {e}")
        return {"L": None, "lambda_min": None}
    try:
        snapshot = stability_monitor(result.states[-1], cfg, L)
    except ConfigError as e:
        logger.info(f"跳过稳定性监测: {e}")
        return {"L": L, "lambda_min": None}
    return {"L": L, "lambda_min": snapshot.lambda_min, "Q_diagonal": np.diag(snapshot.Q).tolist()}


def run(args: argparse.Namespace, settings: Settings) -> None:
    ctx = prepare_context(
        args,
        settings,
        command="multilayer",
        kind="multilayer",
        build_overrides=build_overrides,
        default_name=lambda doc: run_name("multilayer", args.preset, doc.multilayer.seed),
    )
    document = ctx.document
    cfg = document.multilayer
    result = run_multilayer(cfg, document.integration)

    write_multilayer_trajectory(ctx.output("trajectory.csv"), result)
    write_error_series(
        ctx.output("layer_errors.csv"),
        result.times,
        np.hstack([result.intra, result.inter]),
        ERROR_COLUMNS,
    )
    summary = write_analysis(ctx, result.times, result.states, document.analysis)
    summary.update(
        {
            "J": [acc.J for acc in result.performance],
            "L_max": result.bound.l_max,
            "time_to_sync": [result.layer_series(layer).time_to_sync(document.analysis.delta) for layer in range(3)],
            "stability": stability_summary(result, cfg),
        }
    )
    write_json(ctx.output("summary.json"), summary)
    finish_context(ctx, document, cfg.seed)
    logger.info(f"三层网络区域: {summary['regime']}, 相位簇数: {summary['cluster_count']}")
