"""测试运行产物读写"""

import json

import numpy as np
import pytest
from pydantic import ValidationError

from hjbnet.exceptions import ConfigError
from hjbnet.models.configs import ConfigDocument, IntegrationSettings, MultilayerConfig, RunManifest
from hjbnet.services.artifact_service import (
    format_number,
    load_config_document,
    load_manifest,
    read_csv,
    read_json,
    read_multilayer_trajectory,
    single_trajectory_header,
    write_csv,
    write_error_series,
    write_json,
    write_manifest,
    write_multilayer_trajectory,
)
from hjbnet.services.multilayer_service import run_multilayer


class TestFormatNumber:
    """测试数值格式"""

    def test_float_round_trip(self):
        value = 0.1 + 0.2
        assert float(format_number(value)) == value

    def test_integers_and_strings(self):
        assert format_number(3) == "3"
        assert format_number(np.int64(7)) == "7"
        assert format_number(True) == "1"
        assert format_number("x") == "x"

    def test_numpy_float(self):
        assert format_number(np.float64(0.5)) == "0.5"


class TestJson:
    """测试 JSON 读写"""

    def test_write_sorted_and_null(self, tmp_path):
        path = write_json(tmp_path / "out.json", {"b": float("nan"), "a": np.arange(2)})
        text = path.read_text(encoding="utf-8")
        assert text.index('"a"') < text.index('"b"')
        assert json.loads(text) == {"a": [0, 1], "b": None}

    def test_no_temp_file_left(self, tmp_path):
        write_json(tmp_path / "out.json", {"x": 1})
        assert [p.name for p in tmp_path.iterdir()] == ["out.json"]

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(ConfigError):
            read_json(path)


class TestCsv:
    """测试 CSV 读写"""

    def test_header_and_rows(self, tmp_path):
        path = write_csv(tmp_path / "t.csv", ["t", "e"], [[0.0, 1.5], [0.1, 2]])
        header, rows = read_csv(path)
        assert header == ["t", "e"]
        assert rows == [["0", "1.5"], ["0.10000000000000001", "2"]]

    def test_error_series_columns(self, tmp_path):
        path = write_error_series(tmp_path / "e.csv", np.array([0.0, 1.0]), np.zeros((2, 3)), ("a", "b", "c"))
        header, rows = read_csv(path)
        assert header == ["t", "a", "b", "c"]
        assert len(rows) == 2

    def test_single_header(self):
        assert single_trajectory_header(2) == ["t", "n0_x1", "n0_x2", "n0_x3", "n1_x1", "n1_x2", "n1_x3"]


class TestMultilayerTrajectory:
    """测试三层轨迹文件"""

    def test_round_trip(self, tmp_path):
        result = run_multilayer(MultilayerConfig(n_nodes=2), IntegrationSettings(t_end=0.5, h=0.01, sample_every=5))
        path = write_multilayer_trajectory(tmp_path / "trajectory.csv", result)
        times, states = read_multilayer_trajectory(path)
        assert np.array_equal(times, result.times)
        assert np.array_equal(states, result.states)

    def test_rejects_other_files(self, tmp_path):
        path = write_csv(tmp_path / "x.csv", ["t", "e"], [[0.0, 1.0]])
        with pytest.raises(ConfigError):
            read_multilayer_trajectory(path)


class TestConfigDocument:
    """测试配置文档与运行清单"""

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"network": {"n_nodes": 3, "lamda": 1.0}}), encoding="utf-8")
        with pytest.raises(ValidationError):
            load_config_document(path)

    def test_non_object_rejected(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text("[1, 2]", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_config_document(path)

    def test_valid_document(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"kind": "single", "network": {"n_nodes": 3}}), encoding="utf-8")
        document = load_config_document(path)
        assert document.network.n_nodes == 3
        assert document.multilayer is None

    def test_manifest_round_trip(self, tmp_path):
        manifest = RunManifest(
            command="single",
            tool_version="1.0.0",
            base_seed=7,
            config=ConfigDocument(kind="single", integration=IntegrationSettings(t_end=1.0)),
            outputs=["summary.json"],
        )
        write_manifest(tmp_path, manifest)
        assert load_manifest(tmp_path / "manifest.json") == manifest
