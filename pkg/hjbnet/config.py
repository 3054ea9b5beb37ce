import os
import logging
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

logger = logging.getLogger(__name__)

load_dotenv()

# 仓库根目录：config.py 位于 hjbnet/config.py
BASE_DIR = Path(__file__).resolve().parent.parent


class Settings(BaseSettings):
    """进程级配置，优先读取环境变量（前缀 HJBNET_）和 .env 文件"""

    model_config = SettingsConfigDict(env_prefix="HJBNET_", env_file=".env", extra="ignore")

    data_dir: Optional[Path] = Field(default=None, description="运行产物根目录")
    workers: int = Field(default_factory=lambda: os.cpu_count() or 1, ge=1, description="扫描默认进程数")
    log_level: str = Field(default="INFO", description="默认日志级别")


def get_settings() -> Settings:
    """每次调用重新读取环境变量（run_simulator.py 会在导入后修改 HJBNET_DATA_DIR）"""
    return Settings()


def get_data_dir(settings: Optional[Settings] = None) -> Path:
    """
    获取数据目录

    优先使用环境变量 HJBNET_DATA_DIR，否则默认使用 <仓库>/data (开发环境)
    """
    settings = settings or get_settings()
    if settings.data_dir is not None:
        data_dir = Path(settings.data_dir).resolve()
    else:
        data_dir = BASE_DIR / "data"
        logger.debug(f"未设置 HJBNET_DATA_DIR 环境变量，使用默认路径: {data_dir}")

    data_dir.mkdir(parents=True, exist_ok=True)
    return data_dir


def get_run_dir(name: str, settings: Optional[Settings] = None) -> Path:
    """返回 DATA_DIR/runs/<name>，目录不存在时创建"""
    run_dir = get_data_dir(settings) / "runs" / name
    run_dir.mkdir(parents=True, exist_ok=True)
    return run_dir


def config_summary(settings: Optional[Settings] = None) -> dict:
    """导出配置信息摘要（写入运行清单）"""
    settings = settings or get_settings()
    return {
        "base_dir": str(BASE_DIR),
        "data_dir": str(get_data_dir(settings)),
        "workers": settings.workers,
        "log_level": settings.log_level,
    }
