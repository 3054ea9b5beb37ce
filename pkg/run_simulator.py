import os
import sys
import argparse
from pathlib import Path

# 添加当前目录到 sys.path，确保能导入 hjbnet 包
sys.path.append(os.path.dirname(os.path.abspath(__file__)))


def main():
    parser = argparse.ArgumentParser(description="hjbnet 仿真器入口", add_help=False)
    parser.add_argument("--data-dir", type=str, help="运行产物根目录")
    args, remaining = parser.parse_known_args()

    # 设置环境变量，供 hjbnet.config 使用
    # 注意：必须在导入 hjbnet 之前设置！
    if args.data_dir:
        data_path = Path(args.data_dir).resolve()
        try:
            data_path.mkdir(parents=True, exist_ok=True)
            os.environ["HJBNET_DATA_DIR"] = str(data_path)
        except OSError as e:
            sys.stderr.write(f"[hjbnet] 无法创建数据目录 {data_path}: {e}，使用默认目录\n")

    from hjbnet.cli.main import main as cli_main

    sys.exit(cli_main(remaining))


if __name__ == "__main__":
    main()
