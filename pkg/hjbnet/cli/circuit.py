"""
circuit-check 命令：元件值推导、等效性检验和电路网络同步
"""

import argparse
import json
import logging
import sys
from typing import Dict

import numpy as np

from ..config import Settings
from ..exceptions import ConfigError
from ..models.params import CircuitComponents
from ..services.artifact_service import write_error_series, write_json
from ..services.circuit_service import (
    TARGET_PARAMS,
    derive_gain,
    derive_params,
    equivalence_check,
    run_circuit_network,
)
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
    parser = subparsers.add_parser("circuit-check", help="电路模型检验")
    add_common_arguments(parser)
    add_integration_arguments(parser)
    parser.add_argument(
        "--set",
        dest="components",
        action="append",
        default=[],
        metavar="NAME=VALUE",
        help="覆盖元件值，例如 --set R12=20000（可重复）",
    )
    parser.add_argument("--n-nodes", type=int, help="每个网络的电路节点数")
    parser.add_argument("--layers", type=int, choices=(1, 3), help="网络层数")
    parser.add_argument("--eps", type=float, help="层间耦合强度")
    parser.add_argument("--clamp", action="store_true", help="按电源轨截断电压")
    parser.add_argument("--horizon", type=float, help="等效性检验时长")
    parser.set_defaults(handler=run)


def parse_components(items) -> Dict[str, float]:
    """解析 NAME=VALUE 形式的元件值"""
    values: Dict[str, float] = {}
    for item in items:
        name, sep, raw = item.partition("=")
        if not sep or not name.strip():
            raise ConfigError(f"元件值格式应为 NAME=VALUE: {item}")
        try:
            values[name.strip()] = float(raw)
        except ValueError:
            raise ConfigError(f"无法解析的元件值: {item}") from None
    return values


def build_overrides(args: argparse.Namespace) -> dict:
    run_settings = drop_none(
        {"n_nodes": args.n_nodes, "n_layers": args.layers, "eps": args.eps, "seed": args.seed, "horizon": args.horizon}
    )
    if args.clamp:
        run_settings["clamp"] = True
    return {
        "circuit": parse_components(args.components),
        "circuit_run": run_settings,
        "integration": integration_overrides(args),
        "analysis": {},
    }


def parameter_table(cc: CircuitComponents) -> list:
    derived = derive_params(cc)
    rows = []
    for name, value, target in zip(("a", "b", "c"), (derived.a, derived.b, derived.c), TARGET_PARAMS):
        rows.append({"name": name, "derived": value, "target": target, "relative_error": abs(value - target) / target})
    return rows


def run(args: argparse.Namespace, settings: Settings) -> None:
    ctx = prepare_context(
        args,
        settings,
        command="circuit-check",
        kind="circuit",
        build_overrides=build_overrides,
        default_name=lambda doc: run_name("circuit", args.preset, doc.circuit_run.seed),
    )
    document = ctx.document
    cc = document.circuit
    run_settings = document.circuit_run
    gain = derive_gain(cc)

    report = {
        "parameters": parameter_table(cc),
        "coefficients": derive_params(cc).to_dict(),
        "gain": gain.to_dict(),
    }
    if gain.balanced:
        report["equivalence"] = {
            "horizon": run_settings.horizon,
            "identical_parameters": equivalence_check(
                cc, horizon=run_settings.horizon, seed=run_settings.seed, inject_identical=True
            ),
            "component_values": equivalence_check(cc, horizon=run_settings.horizon, seed=run_settings.seed),
        }
    else:
        report["equivalence"] = None

    result = run_circuit_network(
        cc,
        n_nodes=run_settings.n_nodes,
        n_layers=run_settings.n_layers,
        eps=run_settings.eps,
        integration=document.integration,
        seed=run_settings.seed,
        clamp=run_settings.clamp,
    )
    delta = document.analysis.delta
    columns = [f"e{layer + 1}" for layer in range(run_settings.n_layers)]
    write_error_series(
        ctx.output("circuit_sync_error.csv"),
        result.times,
        np.column_stack([series.values for series in result.errors]),
        columns,
    )
    report["network"] = {
        "layers": run_settings.n_layers,
        "n_nodes": run_settings.n_nodes,
        "time_to_sync": [series.time_to_sync(delta) for series in result.errors],
        "final_error": [float(series.values[-1]) for series in result.errors],
    }

    write_json(ctx.output("report.json"), report)
    json.dump(report, sys.stdout, indent=2, ensure_ascii=False)
    sys.stdout.write("\n")
    finish_context(ctx, document, run_settings.seed)
