"""测试命令行入口"""

import json

import pytest

from hjbnet.cli.circuit import parse_components
from hjbnet.cli.common import deep_merge
from hjbnet.cli.main import build_parser, main
from hjbnet.exceptions import ConfigError, DivergenceError, UndefinedEstimateError, UndefinedPhaseError

SMALL_SINGLE = ["single", "--n-nodes", "3", "--t-end", "2", "--seed", "7"]
SMALL_MULTILAYER = ["multilayer", "--n-nodes", "2", "--t-end", "5", "--sample-every", "1", "--eps", "0.6", "0.6", "0.6"]


def read_json(path):
    return json.loads(path.read_text(encoding="utf-8"))


class TestHelpers:
    """测试参数辅助函数"""

    def test_deep_merge(self):
        merged = deep_merge({"a": {"x": 1, "y": 2}, "b": 1}, {"a": {"y": 3}, "c": 4})
        assert merged == {"a": {"x": 1, "y": 3}, "b": 1, "c": 4}

    def test_deep_merge_list_of_dicts(self):
        """测试等长字典列表逐项合并，其他列表整体替换"""
        base = {"weights": [{"lam": 1, "eta": 10}, {"lam": 1, "eta": 20}], "eps": [0.6, 0.1, 0.6]}
        merged = deep_merge(base, {"weights": [{"lam": 2}, {}], "eps": [0.0, 0.0, 0.0]})
        assert merged["weights"] == [{"lam": 2, "eta": 10}, {"lam": 1, "eta": 20}]
        assert merged["eps"] == [0.0, 0.0, 0.0]

    def test_parse_components(self):
        assert parse_components(["R12=20000", " R14 =2e4"]) == {"R12": 20000.0, "R14": 20000.0}

    @pytest.mark.parametrize("item", ["R12", "=5", "R12=abc"])
    def test_parse_components_malformed(self, item):
        with pytest.raises(ConfigError):
            parse_components([item])

    def test_subcommands(self):
        parser = build_parser()
        for command in ("single", "multilayer", "sweep", "circuit-check", "analyze"):
            assert parser.parse_args([command]).command == command


class TestSingleCommand:
    """测试 single 命令"""

    def test_outputs(self, data_dir, tmp_path):
        out = tmp_path / "run"
        assert main([*SMALL_SINGLE, "--out", str(out)]) == 0
        for name in ("trajectory.csv", "sync_error.csv", "summary.json", "manifest.json"):
            assert (out / name).exists()
        manifest = read_json(out / "manifest.json")
        assert manifest["command"] == "single"
        assert manifest["base_seed"] == 7
        assert manifest["config"]["network"]["n_nodes"] == 3
        assert manifest["outputs"] == ["trajectory.csv", "sync_error.csv", "summary.json"]

    def test_same_seed_same_files(self, data_dir, tmp_path):
        assert main([*SMALL_SINGLE, "--out", str(tmp_path / "a")]) == 0
        assert main([*SMALL_SINGLE, "--out", str(tmp_path / "b")]) == 0
        for name in ("trajectory.csv", "sync_error.csv", "summary.json"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_default_run_directory(self, data_dir):
        assert main(SMALL_SINGLE) == 0
        assert (data_dir / "runs" / "single-custom-seed7" / "summary.json").exists()

    def test_manifest_replay(self, data_dir, tmp_path):
        assert main([*SMALL_SINGLE, "--out", str(tmp_path / "a")]) == 0
        assert main(["single", "--manifest", str(tmp_path / "a" / "manifest.json"), "--out", str(tmp_path / "b")]) == 0
        assert (tmp_path / "a" / "trajectory.csv").read_bytes() == (tmp_path / "b" / "trajectory.csv").read_bytes()

    def test_manifest_from_other_command(self, data_dir, tmp_path):
        assert main([*SMALL_SINGLE, "--out", str(tmp_path / "a")]) == 0
        code = main(["multilayer", "--manifest", str(tmp_path / "a" / "manifest.json"), "--out", str(tmp_path / "b")])
        assert code == 2

    def test_config_file_then_flags(self, data_dir, tmp_path):
        config = tmp_path / "cfg.json"
        config.write_text(json.dumps({"network": {"n_nodes": 4, "seed": 1}, "integration": {"t_end": 1.0}}), encoding="utf-8")
        assert main(["single", "--config", str(config), "--n-nodes", "2", "--out", str(tmp_path / "run")]) == 0
        resolved = read_json(tmp_path / "run" / "manifest.json")["config"]
        assert resolved["network"]["n_nodes"] == 2
        assert resolved["network"]["seed"] == 1
        assert resolved["integration"]["t_end"] == 1.0

    def test_preset_of_wrong_kind(self, data_dir, tmp_path):
        assert main(["single", "--preset", "regime-allsync", "--out", str(tmp_path / "run")]) == 2

    def test_unknown_config_key(self, data_dir, tmp_path):
        config = tmp_path / "cfg.json"
        config.write_text(json.dumps({"network": {"nodes": 4}}), encoding="utf-8")
        assert main(["single", "--config", str(config), "--out", str(tmp_path / "run")]) == 2

    def test_missing_config_file(self, data_dir, tmp_path):
        assert main(["single", "--config", str(tmp_path / "missing.json"), "--out", str(tmp_path / "run")]) == 4

    def test_nonpositive_weight(self, data_dir, tmp_path):
        assert main([*SMALL_SINGLE, "--eta", "0", "--out", str(tmp_path / "run")]) == 2


class TestMultilayerCommand:
    """测试 multilayer 与 analyze 命令"""

    def test_outputs_and_reanalysis(self, data_dir, tmp_path):
        run = tmp_path / "multi"
        assert main([*SMALL_MULTILAYER, "--out", str(run)]) == 0
        summary = read_json(run / "summary.json")
        assert set(summary) >= {"regime", "cluster_count", "layer_errors", "J", "L_max", "time_to_sync", "stability"}
        assert len(summary["J"]) == 3
        assert summary["stability"]["lambda_min"] is not None
        for name in ("trajectory.csv", "layer_errors.csv", "phase_series.csv", "phase_snapshot.csv"):
            assert (run / name).exists()

        again = tmp_path / "analysis"
        assert main(["analyze", "--trajectory", str(run / "trajectory.csv"), "--out", str(again)]) == 0
        analysis = read_json(again / "analysis.json")
        assert analysis["regime"] == summary["regime"]
        assert analysis["cluster_count"] == summary["cluster_count"]
        assert (again / "phase_snapshot.csv").read_bytes() == (run / "phase_snapshot.csv").read_bytes()
        assert read_json(again / "manifest.json")["inputs"] == [str((run / "trajectory.csv").resolve())]

    def test_unequal_eps_has_no_stability(self, data_dir, tmp_path):
        run = tmp_path / "multi"
        args = ["multilayer", "--n-nodes", "2", "--t-end", "2", "--sample-every", "1", "--eps", "0.6", "0.1", "0.6"]
        assert main([*args, "--out", str(run)]) == 0
        assert read_json(run / "summary.json")["stability"]["lambda_min"] is None

    def test_negative_eps(self, data_dir, tmp_path):
        assert main(["multilayer", "--eps", "-0.1", "0", "0", "--out", str(tmp_path / "run")]) == 2

    def test_analyze_needs_trajectory(self, data_dir, tmp_path):
        assert main(["analyze", "--out", str(tmp_path / "run")]) == 2

    def test_lam_flag_keeps_configured_eta(self, data_dir, tmp_path):
        """测试只给 --lam 时各层 η 沿用配置文件"""
        config = tmp_path / "cfg.json"
        layers = [{"lam": 1.0, "eta": 100.0}, {"lam": 1.0, "eta": 50.0}, {"lam": 1.0, "eta": 20.0}]
        config.write_text(json.dumps({"multilayer": {"n_nodes": 2, "weights": layers}}), encoding="utf-8")
        run = tmp_path / "multi"
        args = ["multilayer", "--config", str(config), "--lam", "2", "3", "4", "--t-end", "1", "--sample-every", "1"]
        assert main([*args, "--out", str(run)]) == 0
        weights = read_json(run / "manifest.json")["config"]["multilayer"]["weights"]
        assert [w["lam"] for w in weights] == [2.0, 3.0, 4.0]
        assert [w["eta"] for w in weights] == [100.0, 50.0, 20.0]

    def test_eta_flag_keeps_preset_lam(self, data_dir, tmp_path):
        run = tmp_path / "multi"
        args = ["multilayer", "--preset", "small-regime-allsync", "--eta", "5", "5", "5", "--t-end", "1", "--sample-every", "1"]
        assert main([*args, "--out", str(run)]) == 0
        weights = read_json(run / "manifest.json")["config"]["multilayer"]["weights"]
        assert [w["lam"] for w in weights] == [3.0, 0.95, 3.0]
        assert [w["eta"] for w in weights] == [5.0, 5.0, 5.0]


class TestSweepCommand:
    """测试 sweep 命令"""

    def test_small_grid(self, data_dir, tmp_path):
        run = tmp_path / "sweep"
        args = [
            "sweep", "--n-nodes", "2", "--weight", "1", "2", "1", "--eps2", "0", "0.1", "0.1",
            "--seeds", "1", "--t-end", "1", "--sample-every", "1", "--workers", "1", "--out", str(run),
        ]
        assert main(args) == 0
        assert len((run / "grid.csv").read_text(encoding="utf-8").splitlines()) == 5
        summary = read_json(run / "summary.json")
        assert summary["cells"] == 4
        assert sum(summary["label_counts"].values()) == 4


class TestCircuitCommand:
    """测试 circuit-check 命令"""

    def test_report(self, data_dir, tmp_path, capsys):
        run = tmp_path / "circuit"
        args = ["circuit-check", "--set", "R12=20000", "--set", "R14=20000", "--t-end", "2", "--horizon", "2"]
        assert main([*args, "--out", str(run)]) == 0
        report = read_json(run / "report.json")
        assert report["gain"]["theta"] == pytest.approx(0.5)
        assert report["equivalence"]["identical_parameters"] < 1e-8
        assert [row["name"] for row in report["parameters"]] == ["a", "b", "c"]
        assert json.loads(capsys.readouterr().out)["gain"]["theta"] == pytest.approx(0.5)

    def test_unbalanced_bridge_skips_equivalence(self, data_dir, tmp_path):
        run = tmp_path / "circuit"
        assert main(["circuit-check", "--set", "R15=20000", "--t-end", "1", "--out", str(run)]) == 0
        assert read_json(run / "report.json")["equivalence"] is None

    @pytest.mark.parametrize("item", ["R12=abc", "R12", "R12=-5", "R99=1"])
    def test_bad_component(self, data_dir, tmp_path, item):
        assert main(["circuit-check", "--set", item, "--out", str(tmp_path / "run")]) == 2


class TestExitCodes:
    """测试库异常到退出码的映射"""

    @pytest.mark.parametrize(
        "error, code",
        [
            (UndefinedEstimateError("没有可用样本"), 2),
            (UndefinedPhaseError("方差为零"), 2),
            (DivergenceError(0.5, node=1), 3),
        ],
    )
    def test_service_errors(self, data_dir, tmp_path, monkeypatch, error, code):
        def fail(*args, **kwargs):
            raise error

        monkeypatch.setattr("hjbnet.cli.single.run_single", fail)
        assert main([*SMALL_SINGLE, "--out", str(tmp_path / "run")]) == code
