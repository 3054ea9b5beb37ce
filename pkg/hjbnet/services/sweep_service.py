"""
参数扫描服务

在 λ^{1,3} × ε₂ 网格上运行三层网络并判定区域。每个格点按种子重复多次，
多数表决得到格点标签。完成的重复写入 SQLite 检查点，中断后可续跑。
"""

import hashlib
import logging
import math
import sqlite3
import threading
from collections import Counter
from concurrent.futures import ProcessPoolExecutor, as_completed
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from ..exceptions import ConfigError, DivergenceError
from ..models.configs import SweepSpec
from ..models.results import LAYER_PAIRS, LayerErrors, RegimeLabel, SweepCell, SweepGrid
from .analysis_service import classify_regime, layer_errors
from .artifact_service import read_csv, write_csv
from .multilayer_service import run_multilayer

logger = logging.getLogger(__name__)

GRID_HEADER = ["weight", "eps2", "regime_code", "intra1", "intra2", "intra3", "inter12", "inter13", "inter23"]

# (格点行, 格点列, 重复编号)
ReplicateKey = Tuple[int, int, int]
# (区域编码, 6 个误差)
ReplicateOutcome = Tuple[int, List[float]]
ProgressCallback = Callable[[int, int], None]


def cell_seed(base_seed: int, i: int, j: int, replicate: int) -> int:
    """由基础种子和格点下标派生互相独立的种子"""
    sequence = np.random.SeedSequence(base_seed, spawn_key=(i, j, replicate))
    return int(sequence.generate_state(1, dtype=np.uint32)[0])


def spec_fingerprint(spec: SweepSpec) -> str:
    return hashlib.sha256(spec.model_dump_json().encode("utf-8")).hexdigest()


def run_replicate(spec: SweepSpec, i: int, j: int, replicate: int) -> ReplicateOutcome:
    """
    运行一个格点的一次重复

    发散时标记为 Unclassified，误差记为 NaN，不中断整个扫描。
    """
    weight = float(spec.weight_values[i])
    eps2 = float(spec.eps2_values[j])
    seed = cell_seed(spec.base_seed, i, j, replicate)
    cfg = spec.cell_config(weight, eps2, seed)
    try:
        result = run_multilayer(cfg, spec.integration)
    except DivergenceError as e:
        logger.warning(f"格点 (λ={weight}, ε₂={eps2}) 第 {replicate} 次重复发散: {e}")
        return RegimeLabel.UNCLASSIFIED.code, [math.nan] * 6
    errors = layer_errors(result.states, spec.analysis.window_fraction)
    label = classify_regime(errors, spec.analysis.delta)
    return label.code, errors.as_row()


def _run_task(spec: SweepSpec, key: ReplicateKey) -> Tuple[ReplicateKey, ReplicateOutcome]:
    return key, run_replicate(spec, *key)


def majority_label(labels: List[RegimeLabel]) -> RegimeLabel:
    """多数表决，并列第一时返回 Unclassified"""
    if not labels:
        return RegimeLabel.UNCLASSIFIED
    ranked = Counter(labels).most_common()
    if len(ranked) > 1 and ranked[0][1] == ranked[1][1]:
        return RegimeLabel.UNCLASSIFIED
    return ranked[0][0]


def mean_errors(rows: List[List[float]]) -> LayerErrors:
    """各重复误差的平均，忽略发散重复；全部发散时为 NaN"""
    data = np.array(rows, dtype=np.float64).reshape(-1, 6)
    finite = data[np.all(np.isfinite(data), axis=1)]
    means = finite.mean(axis=0) if len(finite) else np.full(6, math.nan)
    return errors_from_row([float(v) for v in means])


class SweepCheckpoint:
    """
    扫描检查点

    每完成一次重复写入一行；记录 spec 指纹，换了 spec 的续跑会被拒绝。
    """

    def __init__(self, db_path: Path, fingerprint: str):
        self.db_path = Path(db_path)
        self.db_path.parent.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._init_db(fingerprint)

    def _connect(self) -> sqlite3.Connection:
        return sqlite3.connect(self.db_path)

    def _init_db(self, fingerprint: str) -> None:
        conn = self._connect()
        try:
            cursor = conn.cursor()
            cursor.execute("CREATE TABLE IF NOT EXISTS meta (key TEXT PRIMARY KEY, value TEXT NOT NULL)")
            cursor.execute("""
                CREATE TABLE IF NOT EXISTS replicates (
                    i INTEGER NOT NULL,
                    j INTEGER NOT NULL,
                    replicate INTEGER NOT NULL,
                    regime_code INTEGER NOT NULL,
                    intra1 REAL, intra2 REAL, intra3 REAL,
                    inter12 REAL, inter13 REAL, inter23 REAL,
                    PRIMARY KEY (i, j, replicate)
                )
            """)
            cursor.execute("SELECT value FROM meta WHERE key = 'fingerprint'")
            row = cursor.fetchone()
            if row is None:
                cursor.execute("INSERT INTO meta (key, value) VALUES ('fingerprint', ?)", (fingerprint,))
            elif row[0] != fingerprint:
                raise ConfigError(f"检查点 {self.db_path} 属于另一个扫描配置，请换一个输出目录或删除检查点")
            conn.commit()
        finally:
            conn.close()

    def load(self) -> Dict[ReplicateKey, ReplicateOutcome]:
        conn = self._connect()
        try:
            cursor = conn.cursor()
            cursor.execute(
                "SELECT i, j, replicate, regime_code, intra1, intra2, intra3, inter12, inter13, inter23 FROM replicates"
            )
            done = {}
            for row in cursor.fetchall():
                # SQLite 把 NaN 存为 NULL
                errors = [math.nan if v is None else float(v) for v in row[4:]]
                done[(row[0], row[1], row[2])] = (int(row[3]), errors)
            return done
        finally:
            conn.close()

    def record(self, key: ReplicateKey, outcome: ReplicateOutcome) -> None:
        code, errors = outcome
        values = [None if math.isnan(v) else v for v in errors]
        with self._lock:
            conn = self._connect()
            try:
                conn.execute(
                    "INSERT OR REPLACE INTO replicates VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?)",
                    (*key, code, *values),
                )
                conn.commit()
            finally:
                conn.close()


def run_sweep(
    spec: SweepSpec,
    workers: int = 1,
    checkpoint_path: Optional[Path] = None,
    progress: Optional[ProgressCallback] = None,
) -> SweepGrid:
    """
    运行整个扫描网格

    结果按格点下标汇总，与进程数和完成顺序无关。

    Args:
        spec: 扫描配置
        workers: 进程数，1 表示在当前进程内顺序运行
        checkpoint_path: 检查点文件，已完成的重复不再重算
        progress: 进度回调 (已完成, 总数)
    """
    if workers < 1:
        raise ConfigError(f"进程数必须至少为 1: {workers}")
    weights = spec.weight_values
    eps2_values = spec.eps2_values
    keys = [(i, j, r) for i in range(len(weights)) for j in range(len(eps2_values)) for r in range(spec.seeds)]

    checkpoint = SweepCheckpoint(checkpoint_path, spec_fingerprint(spec)) if checkpoint_path else None
    outcomes: Dict[ReplicateKey, ReplicateOutcome] = {}
    if checkpoint is not None:
        wanted = set(keys)
        outcomes = {key: value for key, value in checkpoint.load().items() if key in wanted}
        if outcomes:
            logger.info(f"从检查点恢复 {len(outcomes)}/{len(keys)} 次重复")
    pending = [key for key in keys if key not in outcomes]
    total = len(keys)

    def finish(key: ReplicateKey, outcome: ReplicateOutcome) -> None:
        outcomes[key] = outcome
        if checkpoint is not None:
            checkpoint.record(key, outcome)
        if progress is not None:
            progress(len(outcomes), total)
        logger.info(f"扫描进度: {len(outcomes)}/{total}")

    logger.info(f"开始扫描: {len(weights)}×{len(eps2_values)} 个格点，每格 {spec.seeds} 次重复，进程数 {workers}")
    if workers == 1 or len(pending) <= 1:
        for key in pending:
            finish(key, run_replicate(spec, *key))
    else:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            futures = [executor.submit(_run_task, spec, key) for key in pending]
            for future in as_completed(futures):
                key, outcome = future.result()
                finish(key, outcome)

    cells: List[List[SweepCell]] = []
    for i, weight in enumerate(weights):
        row = []
        for j, eps2 in enumerate(eps2_values):
            replicate = [outcomes[(i, j, r)] for r in range(spec.seeds)]
            labels = [RegimeLabel.from_code(code) for code, _ in replicate]
            row.append(
                SweepCell(
                    weight=float(weight),
                    eps2=float(eps2),
                    label=majority_label(labels),
                    errors=mean_errors([errors for _, errors in replicate]),
                    replicate_labels=labels,
                )
            )
        cells.append(row)
    logger.info("扫描完成")
    return SweepGrid(weight_values=weights, eps2_values=eps2_values, cells=cells)


def grid_export(grid: SweepGrid, path: Path) -> Path:
    """导出网格 CSV：weight, eps2, regime_code, 三个层内误差, 三个层间误差"""
    rows = ([cell.weight, cell.eps2, cell.label.code, *cell.errors.as_row()] for cell in grid.iter_cells())
    return write_csv(path, GRID_HEADER, rows)


def grid_read(path: Path) -> SweepGrid:
    """读回 grid_export 写出的文件"""
    header, rows = read_csv(path)
    if header != GRID_HEADER:
        raise ConfigError(f"网格文件表头不匹配: {header}")
    weights: List[float] = []
    eps2_values: List[float] = []
    parsed = []
    for row in rows:
        weight, eps2 = float(row[0]), float(row[1])
        if weight not in weights:
            weights.append(weight)
        if eps2 not in eps2_values:
            eps2_values.append(eps2)
        parsed.append((weight, eps2, RegimeLabel.from_code(int(row[2])), [float(v) for v in row[3:]]))
    if len(parsed) != len(weights) * len(eps2_values):
        raise ConfigError(f"网格文件行数 {len(parsed)} 与坐标轴 {len(weights)}×{len(eps2_values)} 不一致")

    cells = [[None] * len(eps2_values) for _ in weights]
    for weight, eps2, label, errors in parsed:
        cells[weights.index(weight)][eps2_values.index(eps2)] = SweepCell(
            weight=weight,
            eps2=eps2,
            label=label,
            errors=errors_from_row(errors),
        )
    return SweepGrid(weight_values=np.array(weights), eps2_values=np.array(eps2_values), cells=cells)


def errors_from_row(errors: List[float]) -> LayerErrors:
    """按 intra1..3, inter12, inter13, inter23 顺序构造 LayerErrors"""
    return LayerErrors(
        intra=(errors[0], errors[1], errors[2]),
        inter={pair: errors[3 + k] for k, pair in enumerate(LAYER_PAIRS)},
    )
