"""测试参数扫描服务"""

import math

import numpy as np
import pytest

from hjbnet.exceptions import ConfigError, DivergenceError
from hjbnet.models.configs import AnalysisSettings, IntegrationSettings, SweepSpec
from hjbnet.models.results import RegimeLabel
from hjbnet.services import sweep_service
from hjbnet.services.sweep_service import (
    GRID_HEADER,
    SweepCheckpoint,
    cell_seed,
    grid_export,
    grid_read,
    majority_label,
    mean_errors,
    run_replicate,
    run_sweep,
    spec_fingerprint,
)


def tiny_spec(**overrides) -> SweepSpec:
    values = dict(
        weight_start=1.0,
        weight_stop=2.0,
        weight_step=1.0,
        eps2_start=0.0,
        eps2_stop=0.1,
        eps2_step=0.1,
        n_nodes=2,
        seeds=1,
        integration=IntegrationSettings(t_end=1.0, h=0.01, sample_every=1),
        analysis=AnalysisSettings(window_fraction=0.2),
    )
    values.update(overrides)
    return SweepSpec(**values)


class TestSweepSpec:
    """测试扫描配置"""

    def test_axes(self):
        spec = SweepSpec()
        assert spec.weight_values[0] == 1.0
        assert spec.weight_values[-1] == 3.0
        assert len(spec.weight_values) == 21
        assert len(spec.eps2_values) == 41
        assert spec.eps2_values[12] == 0.12

    def test_empty_axis_rejected(self):
        with pytest.raises(ValueError):
            SweepSpec(weight_start=2.0, weight_stop=1.0)

    def test_cell_config(self):
        cfg = SweepSpec().cell_config(2.5, 0.1, seed=3)
        assert cfg.eps == (0.6, 0.1, 0.6)
        assert cfg.weights[0].theta.tolist() == pytest.approx([0.25] * 3)
        assert cfg.weights[1].theta.tolist() == pytest.approx([0.095] * 3)
        assert cfg.weights[0] == cfg.weights[2]
        assert cfg.seed == 3


class TestSeeds:
    """测试格点种子"""

    def test_deterministic(self):
        assert cell_seed(0, 1, 2, 0) == cell_seed(0, 1, 2, 0)

    def test_distinct_across_cells(self):
        seeds = {cell_seed(5, i, j, r) for i in range(4) for j in range(4) for r in range(3)}
        assert len(seeds) == 48

    def test_base_seed_changes_everything(self):
        assert cell_seed(0, 0, 0, 0) != cell_seed(1, 0, 0, 0)


class TestMajority:
    """测试多数表决"""

    def test_majority(self):
        labels = [RegimeLabel.ALL_SYNC, RegimeLabel.SYNC13, RegimeLabel.ALL_SYNC]
        assert majority_label(labels) == RegimeLabel.ALL_SYNC

    def test_tie(self):
        labels = [RegimeLabel.ALL_SYNC, RegimeLabel.SYNC13]
        assert majority_label(labels) == RegimeLabel.UNCLASSIFIED

    def test_empty(self):
        assert majority_label([]) == RegimeLabel.UNCLASSIFIED

    def test_mean_ignores_diverged(self):
        errors = mean_errors([[1.0] * 6, [math.nan] * 6, [3.0] * 6])
        assert errors.as_row() == [2.0] * 6

    def test_mean_all_diverged(self):
        assert all(math.isnan(v) for v in mean_errors([[math.nan] * 6]).as_row())


class TestRunReplicate:
    """测试单次重复"""

    def test_outcome(self):
        code, errors = run_replicate(tiny_spec(), 0, 1, 0)
        assert RegimeLabel.from_code(code) in RegimeLabel
        assert len(errors) == 6
        assert all(np.isfinite(errors))

    def test_divergence_is_unclassified(self, monkeypatch):
        def diverge(cfg, integration):
            raise DivergenceError(0.5, 1)

        monkeypatch.setattr(sweep_service, "run_multilayer", diverge)
        code, errors = run_replicate(tiny_spec(), 0, 0, 0)
        assert code == RegimeLabel.UNCLASSIFIED.code
        assert all(math.isnan(v) for v in errors)


class TestRunSweep:
    """测试整个扫描网格"""

    def test_grid_shape_and_export(self, tmp_path):
        grid = run_sweep(tiny_spec())
        assert grid.label_matrix().shape == (2, 2)
        path = grid_export(grid, tmp_path / "grid.csv")
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == ",".join(GRID_HEADER)
        assert len(lines) == 5

    def test_export_is_reproducible(self, tmp_path):
        spec = tiny_spec()
        first = grid_export(run_sweep(spec), tmp_path / "a.csv")
        second = grid_export(run_sweep(spec), tmp_path / "b.csv")
        assert first.read_bytes() == second.read_bytes()

    def test_read_back(self, tmp_path):
        grid = run_sweep(tiny_spec())
        path = grid_export(grid, tmp_path / "grid.csv")
        loaded = grid_read(path)
        assert np.array_equal(loaded.label_matrix(), grid.label_matrix())
        assert loaded.weight_values.tolist() == [1.0, 2.0]
        assert loaded.eps2_values.tolist() == [0.0, 0.1]
        assert grid_export(loaded, tmp_path / "again.csv").read_bytes() == path.read_bytes()

    def test_read_rejects_wrong_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b\n1,2\n", encoding="utf-8")
        with pytest.raises(ConfigError):
            grid_read(path)

    def test_majority_over_seeds(self):
        grid = run_sweep(tiny_spec(seeds=3, weight_stop=1.0, eps2_stop=0.0))
        cell = grid.cells[0][0]
        assert len(cell.replicate_labels) == 3
        assert cell.label == majority_label(cell.replicate_labels)

    def test_progress_callback(self):
        calls = []
        run_sweep(tiny_spec(), progress=lambda done, total: calls.append((done, total)))
        assert calls == [(1, 4), (2, 4), (3, 4), (4, 4)]

    def test_invalid_workers(self):
        with pytest.raises(ConfigError):
            run_sweep(tiny_spec(), workers=0)

    def test_process_pool_matches_sequential(self, tmp_path):
        """测试多进程与单进程结果逐字节一致"""
        spec = tiny_spec()
        sequential = grid_export(run_sweep(spec, workers=1), tmp_path / "seq.csv")
        parallel = grid_export(run_sweep(spec, workers=2), tmp_path / "par.csv")
        assert sequential.read_bytes() == parallel.read_bytes()


class TestCheckpoint:
    """测试检查点续跑"""

    def test_resume_skips_finished(self, tmp_path):
        spec = tiny_spec()
        db = tmp_path / "checkpoint.sqlite"
        first = run_sweep(spec, checkpoint_path=db)
        calls = []
        resumed = run_sweep(spec, checkpoint_path=db, progress=lambda done, total: calls.append(done))
        assert calls == []
        assert np.array_equal(first.label_matrix(), resumed.label_matrix())
        assert grid_export(first, tmp_path / "a.csv").read_bytes() == grid_export(resumed, tmp_path / "b.csv").read_bytes()

    def test_partial_checkpoint(self, tmp_path):
        spec = tiny_spec()
        db = tmp_path / "checkpoint.sqlite"
        checkpoint = SweepCheckpoint(db, spec_fingerprint(spec))
        checkpoint.record((0, 0, 0), run_replicate(spec, 0, 0, 0))
        calls = []
        run_sweep(spec, checkpoint_path=db, progress=lambda done, total: calls.append(done))
        assert calls == [2, 3, 4]

    def test_nan_survives_storage(self, tmp_path):
        checkpoint = SweepCheckpoint(tmp_path / "c.sqlite", "abc")
        checkpoint.record((0, 0, 0), (4, [math.nan, 1.0, 2.0, 3.0, 4.0, 5.0]))
        code, errors = checkpoint.load()[(0, 0, 0)]
        assert code == 4
        assert math.isnan(errors[0])
        assert errors[1:] == [1.0, 2.0, 3.0, 4.0, 5.0]

    def test_fingerprint_mismatch(self, tmp_path):
        db = tmp_path / "checkpoint.sqlite"
        run_sweep(tiny_spec(), checkpoint_path=db)
        with pytest.raises(ConfigError):
            run_sweep(tiny_spec(base_seed=1), checkpoint_path=db)
