"""
从稳态分布中提取的量：发送概率 τ、状态停留时间、平均 TXOP 时长，以及调试用的三元组导出
"""
from pathlib import Path

import numpy as np
from scipy import sparse

from edca_markov.core.dtmc.state_space import StateSpace
from edca_markov.core.exceptions import SteadyStateError
from edca_markov.core.solver.types import DurationSet


def tau(b: np.ndarray, space: StateSpace, p_busy: float, rho: float) -> float:
    """
    任意退避 / 后退避时隙内发送的概率

    分母只统计 k >= 0 的状态，TXOP 延续状态不算一次竞争。
    空闲状态只有在信道空闲（概率 1 - p_busy）且有包到达时才立即发送。
    """
    _, k, l = space.coords
    contending = k >= 0
    denominator = float(b[contending].sum())
    if denominator <= 0.0:
        raise SteadyStateError("no probability mass on contention states")
    attempts = float(b[(k == 0) & (l >= 1)].sum())
    attempts += float(b[space.idx(0, 0, 0)]) * rho * (1.0 - p_busy)
    return attempts / denominator


def sojourn_times(space: StateSpace, durations: DurationSet, p_c: float, rho: float, t_slot: float) -> np.ndarray:
    """
    每个状态的平均停留时间，与转移规则使用的时长一致

    退避 / 后退避为 T_bs，发送尝试为 (1-p_c)·T_s + p_c·T_c，TXOP 内的交换为 T_exc，
    TXOP 结束状态不占时间。空闲状态以 p_busy 经历一个忙时隙，否则是一个空时隙或一次立即发送。
    """
    _, k, l = space.coords
    n = space.n_txop
    out = np.zeros(len(space))
    out[k >= 1] = durations.t_bs
    out[(k == 0) & (l >= 1)] = (1.0 - p_c) * durations.t_s + p_c * durations.t_c
    out[(k < 0) & (k > -n) & (l >= 1)] = durations.t_exc
    p_b = durations.idle_busy(p_c)
    out[space.idx(0, 0, 0)] = (1.0 - p_b) * ((1.0 - rho) * t_slot + rho * durations.t_s) \
        + p_b * durations.t_b
    return out


def mean_txop_duration(b: np.ndarray, space: StateSpace, durations: DurationSet) -> tuple[float, bool]:
    """
    平均 TXOP 时长

    TXOP 在 (0, -N, l) 时用尽，或在 (0, k, 0) 时因队列为空提前结束。
    返回 (T_txop, fallback)；权重为 0 时退化为 T_s 并置 fallback。
    """
    n = space.n_txop
    t_exc, t_s = durations.t_exc, durations.t_s
    exhausted = sum(float(b[space.idx(0, -n, l)]) for l in range(space.queue_size + 1))
    weight = exhausted
    total = exhausted * ((n - 1) * t_exc + t_s)
    for k in range(-n + 1, 0):
        mass = float(b[space.idx(0, k, 0)])
        weight += mass
        total += mass * ((-k - 1) * t_exc + t_s)
    if weight <= 0.0:
        return t_s, True
    return total / weight, False


def dump_triplets(space: StateSpace, matrix: sparse.spmatrix, path: Path | str):
    """
    以文本形式导出状态空间与转移矩阵

    格式：先是 "# state <id> <j> <k> <l>" 行，然后每个非零元一行 "<row> <col> <value>"
    """
    coo = sparse.coo_matrix(matrix)
    with open(path, "w", encoding="utf-8") as file:
        file.write(f"# states {len(space)} nnz {coo.nnz}\n")
        for i, (j, k, l) in enumerate(space.states()):
            file.write(f"# state {i} {j} {k} {l}\n")
        order = np.lexsort((coo.col, coo.row))
        for row, col, value in zip(coo.row[order], coo.col[order], coo.data[order]):
            file.write(f"{row} {col} {value:.17g}\n")
