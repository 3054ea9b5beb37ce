"""
运行产物读写
负责 JSON（原子写入）、CSV（17 位有效数字）、运行清单和配置文档
"""

import csv
import json
import logging
import os
from pathlib import Path
from typing import Iterable, List, Sequence, Tuple, Union

import numpy as np

from ..exceptions import ArtifactIOError, ConfigError
from ..models.configs import ConfigDocument, RunManifest
from ..models.results import MultilayerRunResult, SingleRunResult

logger = logging.getLogger(__name__)

Cell = Union[str, int, float, np.floating, np.integer]


def format_number(value: Cell) -> str:
    """浮点数按 %.17g 输出（float64 可无损往返），整数和字符串原样输出"""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.17g" % float(value)
    return str(value)


def _to_jsonable(value):
    if isinstance(value, dict):
        return {str(k): _to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _to_jsonable(value.tolist())
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if np.isfinite(value) else None
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, Path):
        return str(value)
    return value


def write_json(path: Path, data) -> Path:
    """
    原子写入 JSON

    先写临时文件再 os.replace，写入中断不会留下半个文件。非有限浮点数写为 null。
    """
    path = Path(path)
    temp_file = path.with_suffix(path.suffix + ".tmp")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(temp_file, "w", encoding="utf-8") as f:
            json.dump(_to_jsonable(data), f, indent=2, ensure_ascii=False, sort_keys=True)
            f.write("\n")
        os.replace(temp_file, path)
    except OSError as e:
        if temp_file.exists():
            temp_file.unlink()
        raise ArtifactIOError(f"写入 JSON 失败: {path}: {e}") from e
    logger.debug(f"已写入 {path}")
    return path


def read_json(path: Path):
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except OSError as e:
        raise ArtifactIOError(f"读取 JSON 失败: {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"JSON 格式错误: {path}: {e}") from e


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Cell]]) -> Path:
    """写入带表头的 CSV，数值统一格式化"""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([format_number(v) for v in row])
    except OSError as e:
        raise ArtifactIOError(f"写入 CSV 失败: {path}: {e}") from e
    logger.debug(f"已写入 {path}")
    return path


def read_csv(path: Path) -> Tuple[List[str], List[List[str]]]:
    """读取 CSV，返回 (表头, 数据行)"""
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8", newline="") as f:
            reader = csv.reader(f)
            header = next(reader, None)
            rows = [row for row in reader if row]
    except OSError as e:
        raise ArtifactIOError(f"读取 CSV 失败: {path}: {e}") from e
    if header is None:
        raise ArtifactIOError(f"CSV 缺少表头: {path}")
    return header, rows


# ========== 轨迹文件 ==========


def single_trajectory_header(n_nodes: int) -> List[str]:
    return ["t"] + [f"n{i}_x{k}" for i in range(n_nodes) for k in (1, 2, 3)]


def write_single_trajectory(path: Path, result: SingleRunResult) -> Path:
    n_samples, n_nodes, _ = result.states.shape
    flat = result.states.reshape(n_samples, -1)
    rows = ([t, *values] for t, values in zip(result.times, flat))
    return write_csv(path, single_trajectory_header(n_nodes), rows)


def write_error_series(path: Path, times: np.ndarray, values: np.ndarray, columns: Sequence[str] = ("e",)) -> Path:
    values = np.asarray(values).reshape(len(times), -1)
    rows = ([t, *row] for t, row in zip(times, values))
    return write_csv(path, ["t", *columns], rows)


def multilayer_trajectory_header(n_nodes: int) -> List[str]:
    return ["t"] + [f"L{layer}_n{i}_x{k}" for layer in (1, 2, 3) for i in range(n_nodes) for k in (1, 2, 3)]


def write_multilayer_trajectory(path: Path, result: MultilayerRunResult) -> Path:
    n_samples, _, n_nodes, _ = result.states.shape
    flat = result.states.reshape(n_samples, -1)
    rows = ([t, *values] for t, values in zip(result.times, flat))
    return write_csv(path, multilayer_trajectory_header(n_nodes), rows)


def read_multilayer_trajectory(path: Path) -> Tuple[np.ndarray, np.ndarray]:
    """读取三层轨迹 CSV，返回 (时刻, 形状 (采样数, 3, N, 3) 的状态)"""
    header, rows = read_csv(path)
    width = len(header) - 1
    if header[0] != "t" or width <= 0 or width % 9 != 0:
        raise ConfigError(f"不是三层轨迹文件: {path}")
    n_nodes = width // 9
    if header != multilayer_trajectory_header(n_nodes):
        raise ConfigError(f"三层轨迹表头不匹配: {path}")
    try:
        data = np.array(rows, dtype=np.float64)
    except ValueError as e:
        raise ConfigError(f"三层轨迹含有无法解析的数值: {path}: {e}") from e
    if data.ndim != 2 or data.shape[1] != len(header):
        raise ConfigError(f"三层轨迹行宽不一致: {path}")
    return data[:, 0], data[:, 1:].reshape(-1, 3, n_nodes, 3)


def write_phase_series(path: Path, times: np.ndarray, phases: np.ndarray, n_nodes: int) -> Path:
    header = ["t"] + [f"L{layer}_n{i}" for layer in (1, 2, 3) for i in range(n_nodes)]
    rows = ([t, *row] for t, row in zip(times, phases))
    return write_csv(path, header, rows)


def write_phase_snapshot(path: Path, t: float, snapshot: np.ndarray, n_nodes: int) -> Path:
    rows = (
        [layer + 1, i, t, snapshot[layer * n_nodes + i]]
        for layer in range(3)
        for i in range(n_nodes)
    )
    return write_csv(path, ["layer", "node", "t", "phase_deg"], rows)


# ========== 配置文档与运行清单 ==========


def load_config_document(path: Path) -> ConfigDocument:
    """读取并校验配置文档；未知字段由 pydantic 拒绝"""
    data = read_json(path)
    if not isinstance(data, dict):
        raise ConfigError(f"配置文档必须是 JSON 对象: {path}")
    return ConfigDocument.model_validate(data)


def write_manifest(run_dir: Path, manifest: RunManifest) -> Path:
    return write_json(Path(run_dir) / "manifest.json", manifest.model_dump(mode="json"))


def load_manifest(path: Path) -> RunManifest:
    data = read_json(path)
    if not isinstance(data, dict):
        raise ConfigError(f"运行清单必须是 JSON 对象: {path}")
    return RunManifest.model_validate(data)
