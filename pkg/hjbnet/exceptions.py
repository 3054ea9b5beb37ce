"""
异常定义

每个异常类带有命令行退出码：0 成功，2 配置或输入数据无效，3 数值发散，4 读写错误。
基类的 1 只留给未归类的内部错误。
库代码只负责抛出，由 CLI 统一捕获并转换为退出码。
"""

from typing import Optional


class HJBNetError(Exception):
    """所有仿真错误的基类"""

    exit_code = 1


class ConfigError(HJBNetError, ValueError):
    """配置无效（权重、区间、前置条件等）"""

    exit_code = 2


class InvalidStateError(HJBNetError, ValueError):
    """向向量场传入了非有限状态"""

    exit_code = 3


class DivergenceError(HJBNetError, ArithmeticError):
    """积分过程中出现非有限状态，附带时间和节点编号"""

    exit_code = 3

    def __init__(self, t: float, node: Optional[int] = None, detail: str = ""):
        self.t = t
        self.node = node
        self.detail = detail
        where = f"节点 {node}" if node is not None else "未知节点"
        message = f"数值发散: t={t:.6g}, {where}"
        if detail:
            message = f"{message} ({detail})"
        super().__init__(message)

    def __reduce__(self):
        # 跨进程传递时按原参数重建
        return (self.__class__, (self.t, self.node, self.detail))


class UndefinedEstimateError(HJBNetError, ValueError):
    """没有可用样本，无法估计常数"""

    exit_code = 2


class UndefinedPhaseError(HJBNetError, ValueError):
    """信号方差为零，相位无定义"""

    exit_code = 2


class ArtifactIOError(HJBNetError, OSError):
    """运行产物读写失败"""

    exit_code = 4
