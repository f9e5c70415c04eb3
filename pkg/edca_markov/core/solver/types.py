"""
求解器相关的数据结构
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from edca_markov.core.dtmc.steady_state import SteadyState
from edca_markov.core.exceptions import ConfigError
from edca_markov.core.model_config.types import Scenario


@dataclass(frozen=True)
class DurationSet:
    """单个 AC 的各类状态持续时间（秒）"""
    aifs: float
    t_s: float
    t_c: float
    t_exc: float
    n_txop: int
    t_txop: float
    t_bs: float
    t_b: float
    txop_fallback: bool = False      # T_txop 的权重质量为 0，退化为 T_s
    p_busy: Optional[float] = None   # 空闲状态的 AC 在一个时隙里看到信道忙的概率，None 时取 p_c

    def __post_init__(self):
        for name in ("aifs", "t_s", "t_c", "t_exc", "t_txop", "t_bs", "t_b"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise ConfigError(f"duration {name} must be finite and positive, got {value}")
        if self.n_txop < 1:
            raise ConfigError(f"n_txop must be >= 1, got {self.n_txop}")
        if self.p_busy is not None and not 0.0 <= self.p_busy <= 1.0:
            raise ConfigError(f"p_busy must lie in [0, 1], got {self.p_busy}")

    def idle_busy(self, p_c: float) -> float:
        return p_c if self.p_busy is None else self.p_busy


@dataclass(frozen=True)
class SolveOptions:
    damping: float = 0.5
    tol: float = 1e-8
    max_iters: int = 500
    initial_tau: Optional[tuple[float, ...]] = None   # None 时取 2/(CW_min+2)
    keep_trace: bool = True

    def __post_init__(self):
        if not 0.0 < self.damping <= 1.0:
            raise ConfigError(f"damping must lie in (0, 1], got {self.damping}")
        if self.tol <= 0:
            raise ConfigError(f"tol must be > 0, got {self.tol}")
        if self.max_iters < 1:
            raise ConfigError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.initial_tau is not None and any(not 0.0 <= t <= 1.0 for t in self.initial_tau):
            raise ConfigError("initial_tau entries must lie in [0, 1]")


@dataclass(frozen=True)
class TraceRow:
    """一次不动点迭代的诊断记录"""
    iteration: int
    taus: tuple[float, ...]
    p_cs: tuple[float, ...]
    residual: float


@dataclass(frozen=True)
class SolvedModel:
    """
    不动点的解：下标与 scenario.acs 一致，未激活（flows=0）的 AC 对应 None / 0
    """
    scenario: Scenario
    taus: tuple[float, ...]
    p_cs: tuple[float, ...]
    durations: tuple[Optional[DurationSet], ...]
    steady_states: tuple[Optional[SteadyState], ...]
    iterations: int
    residual: float
    converged: bool
    trace: tuple[TraceRow, ...] = field(default=(), repr=False)

    def active(self) -> tuple[int, ...]:
        return self.scenario.active_indices
