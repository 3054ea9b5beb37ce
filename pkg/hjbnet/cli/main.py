"""
命令行主程序

子命令: single, multilayer, sweep, circuit-check, analyze
退出码: 0 成功，2 配置或输入数据无效，3 数值发散，4 读写错误
"""

import argparse
import logging
from typing import List, Optional

from pydantic import ValidationError

from .. import __version__
from ..config import get_settings
from ..exceptions import ConfigError, HJBNetError
from . import analyze, circuit, multilayer, single, sweep

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def configure_logging(level: str) -> None:
    """配置根日志器，输出到标准错误，标准输出只留给 JSON 报告"""
    numeric = logging.getLevelName(level.upper())
    if not isinstance(numeric, int):
        raise ConfigError(f"未知的日志级别: {level}")
    logging.basicConfig(
        level=numeric,
        format=LOG_FORMAT,
        handlers=[logging.StreamHandler()],
        force=True,  # 强制重新配置
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hjbnet", description="HJB 最优控制下的 Rössler 振子网络仿真")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for module in (single, multilayer, sweep, circuit, analyze):
        module.register(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        settings = get_settings()
        configure_logging(args.log_level or settings.log_level)
        args.handler(args, settings)
    except ValidationError as e:
        logger.error(f"配置校验失败:\n{e}")
        return ConfigError.exit_code
    except HJBNetError as e:
        logger.error(f"{type(e).__name__}: {e}", exc_info=e.exit_code == 1)
        return e.exit_code
    except OSError as e:
        logger.error(f"读写失败: {e}", exc_info=True)
        return 4
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
