from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from edca_markov.core.exceptions import SimulationError
from edca_markov.core.model_config.types import AcConfig, TrafficKind


@dataclass(frozen=True)
class ArrivalProcess:
    """
    到达过程；rate 为长期平均速率（packets/s），三种类型的平均负载相同。
    On/Off 在开启阶段内以 rate·(on+off)/on 的恒定间隔发包。
    """
    kind: TrafficKind
    rate: float
    on_mean: float = 1.5
    off_mean: float = 1.5

    def __post_init__(self):
        if self.rate < 0 or not np.isfinite(self.rate):
            raise SimulationError(f"arrival rate must be finite and >= 0, got {self.rate}")
        if self.on_mean <= 0 or self.off_mean <= 0:
            raise SimulationError("on/off mean durations must be > 0")

    @classmethod
    def for_ac(cls, ac: AcConfig) -> "ArrivalProcess":
        return cls(kind=ac.traffic, rate=ac.lam, on_mean=ac.on_mean, off_mean=ac.off_mean)

    @property
    def peak_rate(self) -> float:
        if self.kind == TrafficKind.ON_OFF:
            return self.rate * (self.on_mean + self.off_mean) / self.on_mean
        return self.rate


@dataclass
class StationState:
    station: int
    ac: int
    d: int                                      # 比最短 AIFS 多出的时隙数
    queue: deque = field(default_factory=deque)  # 各包的到达时间（ns）
    stage: int = 0
    counter: int = 0
    active: bool = False                        # 正在退避或后退避
    start_slot: int = 0                         # 本空闲期内开始计数的时隙
    tx_slot: int = 0                            # 本空闲期内计数到 0 的时隙
    last_change: int = 0                        # 队列长度上次变化的时刻（ns）


@dataclass
class AcSimStats:
    name: str = ""
    stations: int = 0
    generated: int = 0
    delivered: int = 0
    delivered_bits: int = 0
    successes: int = 0                          # 成功的信道接入（一个 TXOP 记一次）
    collisions: int = 0
    retry_drops: int = 0
    queue_drops: int = 0
    max_burst: int = 0                          # 单个 TXOP 内最多的交换次数
    delays_ns: list[int] = field(default_factory=list, repr=False)
    cw_draws: Counter = field(default_factory=Counter, repr=False)      # (stage, value) -> 次数
    queue_time_ns: Optional[np.ndarray] = field(default=None, repr=False)   # 按时间加权的队列长度直方图
    queued_at_end: int = 0

    @property
    def attempts(self) -> int:
        return self.successes + self.collisions

    @property
    def mean_delay(self) -> float:
        return float(np.mean(self.delays_ns)) * 1e-9 if self.delays_ns else 0.0

    @property
    def conserved(self) -> bool:
        return self.generated == self.delivered + self.retry_drops + self.queue_drops + self.queued_at_end


@dataclass
class SimStats:
    scenario: str
    seed: int
    duration: float
    data_rate: float
    per_ac: list[AcSimStats]
    idle_slots: int = 0
    busy_slots: int = 0
    elapsed: float = 0.0          # 最后一个忙时段可能越过 duration，记录实际结束时刻

    @property
    def idle_fraction(self) -> float:
        total = self.idle_slots + self.busy_slots
        return self.idle_slots / total if total else 1.0

    def throughput(self, i: int) -> float:
        """归一化吞吐量：负载比特在信道速率下所占的时间比例"""
        return self.per_ac[i].delivered_bits / (max(self.duration, self.elapsed) * self.data_rate)

    def collision_prob(self, i: int) -> float:
        ac = self.per_ac[i]
        return ac.collisions / ac.attempts if ac.attempts else 0.0

    def loss_ratio(self, i: int) -> float:
        ac = self.per_ac[i]
        return (ac.retry_drops + ac.queue_drops) / ac.generated if ac.generated else 0.0

    def queue_distribution(self, i: int) -> np.ndarray:
        hist = self.per_ac[i].queue_time_ns
        if hist is None or hist.sum() == 0:
            return np.zeros(0)
        return hist / hist.sum()

    @property
    def conserved(self) -> bool:
        return all(ac.conserved for ac in self.per_ac)
