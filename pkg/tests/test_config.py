"""测试 config.py 中的路径与设置"""

from pathlib import Path

import pytest
from pydantic import ValidationError

from hjbnet import config


class TestConfigBaseDir:
    """测试 BASE_DIR 配置"""

    def test_base_dir_is_path(self):
        """测试 BASE_DIR 是 Path 对象"""
        assert isinstance(config.BASE_DIR, Path)

    def test_base_dir_is_absolute(self):
        """测试 BASE_DIR 是绝对路径"""
        assert config.BASE_DIR.is_absolute()

    def test_base_dir_contains_package(self):
        """测试 BASE_DIR 下有 hjbnet 包"""
        assert (config.BASE_DIR / "hjbnet" / "config.py").exists()

    def test_base_dir_follows_package_location(self):
        """测试 BASE_DIR 只由包所在位置决定"""
        assert config.BASE_DIR == Path(config.__file__).resolve().parent.parent


class TestConfigDataDir:
    """测试数据目录解析"""

    def test_default_data_dir(self, tmp_path, monkeypatch):
        """测试未设置环境变量时使用 BASE_DIR/data"""
        monkeypatch.delenv("HJBNET_DATA_DIR", raising=False)
        monkeypatch.setattr(config, "BASE_DIR", tmp_path)
        assert config.get_data_dir() == tmp_path / "data"
        assert (tmp_path / "data").is_dir()

    def test_env_overrides_data_dir(self, data_dir):
        """测试 HJBNET_DATA_DIR 环境变量生效且目录会被创建"""
        resolved = config.get_data_dir()
        assert resolved == data_dir.resolve()
        assert resolved.is_dir()

    def test_run_dir_under_data_dir(self, data_dir):
        """测试运行目录位于 DATA_DIR/runs 下"""
        run_dir = config.get_run_dir("single-test")
        assert run_dir.parent == data_dir.resolve() / "runs"
        assert run_dir.is_dir()


class TestSettings:
    """测试进程级设置"""

    def test_workers_from_env(self, monkeypatch):
        """测试 HJBNET_WORKERS 读取"""
        monkeypatch.setenv("HJBNET_WORKERS", "3")
        assert config.get_settings().workers == 3

    def test_invalid_workers_rejected(self, monkeypatch):
        """测试非法进程数被拒绝"""
        monkeypatch.setenv("HJBNET_WORKERS", "0")
        with pytest.raises(ValidationError):
            config.get_settings()

    def test_config_summary_keys(self, data_dir):
        """测试配置摘要字段"""
        summary = config.config_summary()
        assert set(summary) == {"base_dir", "data_dir", "workers", "log_level"}
        assert summary["data_dir"] == str(data_dir.resolve())
