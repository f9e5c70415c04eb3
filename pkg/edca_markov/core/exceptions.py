from typing import Any, Optional


class EdcaModelError(Exception):
    """EDCA 分析引擎的基类异常"""
    pass


class ConfigError(EdcaModelError):
    """场景参数不合法时抛出"""
    pass


class ConfigParseError(ConfigError):
    """场景文件解析失败时抛出，携带出错的键名或行号"""

    def __init__(self, message: str, key: Optional[str] = None, line: Optional[int] = None):
        self.key = key
        self.line = line
        location = []
        if key is not None:
            location.append(f"key '{key}'")
        if line is not None:
            location.append(f"line {line}")
        suffix = f" ({', '.join(location)})" if location else ""
        super().__init__(f"{message}{suffix}")


class StateSpaceError(EdcaModelError):
    """状态空间或转移矩阵维度不一致时抛出"""
    pass


class SteadyStateError(EdcaModelError):
    """稳态求解失败（不收敛或残差过大）时抛出"""

    def __init__(self, message: str, residual: float = float("nan")):
        self.residual = residual
        super().__init__(f"{message} (residual={residual:.3e})")


class DegenerateZoneError(EdcaModelError):
    """竞争区间计算出现退化（归一化分母为 0）时抛出"""
    pass


class ConvergenceError(EdcaModelError):
    """不动点迭代在最大次数内没有收敛，携带最优迭代结果"""

    def __init__(self, message: str, best: Any = None, residual: float = float("nan")):
        self.best = best
        self.residual = residual
        super().__init__(f"{message} (residual={residual:.3e})")


class SimulationError(EdcaModelError):
    """离散事件仿真参数不合法或运行失败时抛出"""
    pass


class SweepError(EdcaModelError):
    """参数扫描定义不合法时抛出"""
    pass


class ArrivalDomainError(EdcaModelError, ValueError):
    """队列转移概率的参数超出定义域时抛出"""
    pass
