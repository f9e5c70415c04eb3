from dataclasses import dataclass, field

import numpy as np

from edca_markov.core.exceptions import StateSpaceError


@dataclass(frozen=True, eq=False)
class DelayTable:
    """
    单个 AC 的时延递推表

    A[j][k] / A_d[j][k] 按阶段存放，长度为 W_j + 1；
    per_state 与 b_bar 按状态空间的下标排列。
    """
    access: tuple[np.ndarray, ...] = field(repr=False)
    access_drop: tuple[np.ndarray, ...] = field(repr=False)
    mean_access: float
    mean_access_drop: float
    mean_access_idle: float
    p_lr: float
    n_txop: int
    t_exc: float
    tail: dict[int, float] = field(repr=False)            # D(-1, -1, l)
    per_state: np.ndarray = field(repr=False)             # 在该状态到达的包的总时延，不接收到达的状态为 0
    b_bar: np.ndarray = field(repr=False)                 # 被接收的包到达时看到的状态分布

    def A(self, j: int, k: int) -> float:
        return float(self.access[j][k])

    def A_d(self, j: int, k: int) -> float:
        return float(self.access_drop[j][k])

    def tail_delay(self, l: int) -> float:
        return self.tail[l] if l > 0 else 0.0

    def D(self, j: int, k: int, l: int) -> float:
        """
        被标记的包在队列中排第 l 位（含队首）时的总时延；k < 0 时 TXOP 还剩 N + k 个交换
        """
        if l < 1:
            raise StateSpaceError(f"the tagged packet needs a queue position >= 1, got {l}")
        n = self.n_txop
        if k < 0:
            return min(n + k, l) * self.t_exc + self.tail_delay(l - n - k)
        return (
            (1.0 - self.p_lr) * (self.A(j, k) + min(n - 1, l - 1) * self.t_exc + self.tail_delay(l - n))
            + self.p_lr * (self.A_d(j, k) + self.tail_delay(l - 1))
        )


@dataclass(frozen=True)
class AcMetrics:
    index: int
    name: str
    active: bool
    tau: float = 0.0
    p_c: float = 0.0
    p_s: float = 0.0
    throughput: float = 0.0             # 归一化吞吐量 S_i
    throughput_bps: float = 0.0
    offered_bps: float = 0.0
    mean_access_delay: float = 0.0      # E[A]
    mean_idle_access_delay: float = 0.0 # E[A_idle]
    mean_drop_access_delay: float = 0.0 # E[A_d]
    mean_delay: float = 0.0             # E[D]
    plr: float = 0.0
    retry_drop_prob: float = 0.0        # p_c^r
    mean_queue_length: float = 0.0
    queue_distribution: tuple[float, ...] = ()
    n_txop: int = 1
    t_txop: float = 0.0


@dataclass(frozen=True)
class Metrics:
    scenario: str
    per_ac: tuple[AcMetrics, ...]
    total_throughput: float
    total_throughput_bps: float
    p_idle: float
    converged: bool = True
    iterations: int = 0
    residual: float = 0.0
