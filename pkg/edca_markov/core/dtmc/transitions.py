"""
单个 AC 的 DTMC 转移矩阵

规则按状态类别组织：
  - 退避 / 后退避递减                    k >= 1
  - 发送尝试（成功、碰撞、重试上限丢弃）  k = 0, l >= 1
  - TXOP 延续与结束                      k < 0
  - 空闲状态                             (0, 0, 0)
缓存满（l = QS）时，退避中的发送成功或丢弃后队列确定地回到 QS-1，期间到达的包全部丢弃；
TXOP 内的交换按 p_st 转移，交换期间有包到达时队列仍为 QS。
"""
import numpy as np
from scipy import sparse

from edca_markov.core.dtmc.state_space import StateSpace, enumerate_states
from edca_markov.core.exceptions import StateSpaceError
from edca_markov.core.logger import logger
from edca_markov.core.model_config.arrivals import ArrivalKernel, rho
from edca_markov.core.model_config.types import AcConfig, PhyTiming
from edca_markov.core.solver.types import DurationSet

ROW_SUM_TOL = 1e-12


class _Triplets:
    """按广播规则累积 (row, col, value)，最后一次性转成 CSR"""

    def __init__(self):
        self.rows: list[np.ndarray] = []
        self.cols: list[np.ndarray] = []
        self.vals: list[np.ndarray] = []

    def add(self, rows, cols, vals):
        rows, cols, vals = np.broadcast_arrays(
            np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64), np.asarray(vals, dtype=float)
        )
        keep = vals != 0.0
        if not np.any(keep):
            return
        if np.any(rows[keep] < 0) or np.any(cols[keep] < 0):
            raise StateSpaceError("transition references a state outside the state space")
        self.rows.append(rows[keep].ravel())
        self.cols.append(cols[keep].ravel())
        self.vals.append(vals[keep].ravel())

    def to_csr(self, n: int) -> sparse.csr_matrix:
        if not self.rows:
            return sparse.csr_matrix((n, n))
        matrix = sparse.coo_matrix(
            (np.concatenate(self.vals), (np.concatenate(self.rows), np.concatenate(self.cols))),
            shape=(n, n),
        )
        # 重复的 (row, col) 在转换时累加
        return matrix.tocsr()


def _sent_rows(kernel: ArrivalKernel, t: float) -> np.ndarray:
    """发送一个包之后的队列分布；满缓存的行固定回到 QS-1"""
    st = np.array(kernel.st_matrix(t))
    qs = kernel.queue_size
    st[qs, :] = 0.0
    st[qs, qs - 1] = 1.0
    return st


def build_transition_matrix(
        ac: AcConfig,
        phy: PhyTiming,
        p_c: float,
        durations: DurationSet,
        kernel: ArrivalKernel,
        space: StateSpace | None = None,
) -> sparse.csr_matrix:
    """按转移规则构造行随机稀疏矩阵"""
    if not 0.0 <= p_c < 1.0:
        raise StateSpaceError(f"collision probability must lie in [0, 1), got {p_c}")
    if space is None:
        space = enumerate_states(ac, durations.n_txop)
    if space.n_txop != durations.n_txop or space.queue_size != kernel.queue_size:
        raise StateSpaceError(
            f"state space (N={space.n_txop}, QS={space.queue_size}) does not match "
            f"durations N={durations.n_txop} / kernel QS={kernel.queue_size}"
        )
    if space.retry_limit != ac.retry_limit:
        raise StateSpaceError("state space retry limit does not match the AC")

    qs = space.queue_size
    r = space.retry_limit
    n = space.n_txop
    w = space.windows
    table = space.table          # table[j, k + N, l]

    nt_bs = kernel.nt_matrix(durations.t_bs)
    nt_c = kernel.nt_matrix(durations.t_c)
    nt_b = kernel.nt_matrix(durations.t_b)
    nt_s = kernel.nt_matrix(durations.t_s)
    sent_s = _sent_rows(kernel, durations.t_s)
    sent_exc = kernel.st_matrix(durations.t_exc)
    p_arrival = rho(kernel, phy)

    trip = _Triplets()
    stage0 = n + np.arange(w[0] + 1)       # k = 0..W_0 在表中的位置

    for j, l in space.block_start:
        # 退避递减：(j, k, l) -> (j, k-1, l')，l' >= l
        ks = np.arange(1, w[j] + 1)
        trip.add(table[j, ks + n, l][:, None], table[j, ks - 1 + n, l:], nt_bs[l, l:][None, :])

        if l >= 1:
            row = table[j, n, l]
            lo = l - 1
            # 成功：进入 TXOP 第一个交换之后的状态 (0, -1, l')
            trip.add(row, table[0, n - 1, lo:], (1.0 - p_c) * sent_s[l, lo:])
            if j < r - 1:
                # 碰撞：下一阶段的计数在 [0, W_{j+1}] 上均匀
                width = w[j + 1] + 1
                trip.add(row, table[j + 1, n + np.arange(width), l:], p_c * nt_c[l, l:][None, :] / width)
            else:
                # 重试上限：丢弃当前包，回到阶段 0
                width = w[0] + 1
                trip.add(row, table[0, stage0, lo:], p_c * sent_s[l, lo:][None, :] / width)

        if j == 0:
            width = w[0] + 1
            if l == 0:
                # 队列空，TXOP 结束，不占用时间
                ks = np.arange(-n, 0)
                trip.add(table[0, ks + n, 0][:, None], table[0, stage0, 0][None, :], 1.0 / width)
            else:
                # TXOP 用尽，不占用时间
                trip.add(table[0, 0, l], table[0, stage0, l], 1.0 / width)
                # TXOP 内继续发送下一个包
                ks = np.arange(-n + 1, 0)
                if ks.size:
                    trip.add(table[0, ks + n, l][:, None], table[0, ks - 1 + n, l - 1:], sent_exc[l, l - 1:][None, :])

    # 空闲状态：包到达时信道忙则等待一个忙时隙后退避，否则立即发送
    idle = table[0, n, 0]
    width = w[0] + 1
    p_b = durations.idle_busy(p_c)
    trip.add(idle, idle, (1.0 - p_b) * (1.0 - p_arrival) + p_b * nt_b[0, 0])
    trip.add(idle, table[0, stage0, 1:], p_b / width * nt_b[0, 1:][None, :])
    trip.add(idle, table[0, n - 1, :], (1.0 - p_b) * p_arrival * nt_s[0, :])

    matrix = trip.to_csr(len(space))
    _check_stochastic(matrix)
    logger.debug(f"转移矩阵已构造: {len(space)} 个状态, {matrix.nnz} 个非零元")
    return matrix


def _check_stochastic(matrix: sparse.csr_matrix):
    sums = np.asarray(matrix.sum(axis=1)).ravel()
    deviation = np.abs(sums - 1.0)
    if deviation.size and deviation.max() > ROW_SUM_TOL:
        bad = int(np.argmax(deviation))
        raise StateSpaceError(f"row {bad} sums to {sums[bad]!r} (deviation {deviation[bad]:.3e})")
    if matrix.nnz and (matrix.data.min() < 0.0 or matrix.data.max() > 1.0 + ROW_SUM_TOL):
        raise StateSpaceError("transition probabilities outside [0, 1]")
