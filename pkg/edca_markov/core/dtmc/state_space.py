"""
三维状态 (j, k, l) 的枚举与下标映射

    j: 退避阶段 0..r-1
    k: 退避计数 0..W_j；j = 0 时还包括 TXOP 延续状态 -N..-1
    l: 队列长度 0..QS；l = 0 时只有 j = 0

排列顺序为 l 优先，其次 j，最后 k 升序。
"""
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from edca_markov.core.exceptions import StateSpaceError
from edca_markov.core.model_config.phy import cw_at_stage
from edca_markov.core.model_config.types import AcConfig

State = tuple[int, int, int]


@dataclass(frozen=True)
class StateSpace:
    windows: tuple[int, ...]      # W_j, j = 0..r-1
    n_txop: int
    queue_size: int
    block_start: dict[tuple[int, int], int] = field(repr=False, compare=False, hash=False)
    size: int = 0

    @property
    def retry_limit(self) -> int:
        return len(self.windows)

    def k_min(self, j: int) -> int:
        return -self.n_txop if j == 0 else 0

    @cached_property
    def table(self) -> np.ndarray:
        """
        稠密下标表 table[j, k + N, l]，不存在的组合为 -1

        转移矩阵的构造通过它做向量化的花式索引。
        """
        out = np.full((self.retry_limit, self.n_txop + max(self.windows) + 1, self.queue_size + 1), -1, dtype=np.int64)
        for (j, l), start in self.block_start.items():
            width = self.windows[j] - self.k_min(j) + 1
            first = self.k_min(j) + self.n_txop
            out[j, first:first + width, l] = np.arange(start, start + width)
        out.setflags(write=False)
        return out

    def idx(self, j: int, k, l):
        """状态下标，k 可以是整数或 numpy 数组"""
        k_arr = np.asarray(k)
        if (j, l) not in self.block_start or np.any(k_arr < self.k_min(j)) or np.any(k_arr > self.windows[j]):
            raise StateSpaceError(f"no state (j={j}, k={k}, l={l})")
        out = self.table[j, k_arr + self.n_txop, l]
        return int(out) if out.ndim == 0 else out

    def __len__(self) -> int:
        return self.size

    def __contains__(self, state: State) -> bool:
        j, k, l = state
        return (j, l) in self.block_start and self.k_min(j) <= k <= self.windows[j]

    def states(self) -> list[State]:
        out: list[State] = []
        for j, l in self.block_start:
            out.extend((j, k, l) for k in range(self.k_min(j), self.windows[j] + 1))
        return out

    @cached_property
    def coords(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """每个状态的 (j, k, l) 数组，便于向量化求和"""
        states = np.array(self.states(), dtype=np.int64)
        return states[:, 0], states[:, 1], states[:, 2]

    @property
    def region_counts(self) -> dict[str, int]:
        _, k, l = self.coords
        return {
            "postbackoff": int(np.sum((l == 0) & (k >= 0))),
            "backoff": int(np.sum((l >= 1) & (k >= 0))),
            "txop": int(np.sum(k < 0)),
        }


def enumerate_states(ac: AcConfig, n_txop: int) -> StateSpace:
    if n_txop < 1:
        raise StateSpaceError(f"N must be >= 1, got {n_txop}")
    windows = tuple(cw_at_stage(ac, j) for j in range(ac.retry_limit))
    block_start: dict[tuple[int, int], int] = {}
    offset = 0
    for l in range(ac.queue_size + 1):
        for j in range(ac.retry_limit if l >= 1 else 1):
            block_start[(j, l)] = offset
            k_min = -n_txop if j == 0 else 0
            offset += windows[j] - k_min + 1
    return StateSpace(windows=windows, n_txop=n_txop, queue_size=ac.queue_size,
                      block_start=block_start, size=offset)
