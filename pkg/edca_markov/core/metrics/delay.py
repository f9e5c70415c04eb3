"""
平均接入时延与总时延的递推计算

A(j, k)   从状态 (j, k, ·) 到队首包成功发送的时间，自底向上、自左向右递推
A_d(j, k) 同上，但以队首包被丢弃为条件
D(j, k, l) 被标记的包在队列中排第 l 位时的总时延

包在状态 (j, k, l) 的停留期间到达时排在第 l+1 位；缓存满时到达的包被丢弃，不计入平均。
"""
from dataclasses import replace

import numpy as np

from edca_markov.core.exceptions import ConfigError
from edca_markov.core.metrics.loss import time_share
from edca_markov.core.metrics.types import DelayTable
from edca_markov.core.solver.types import SolvedModel


def _recursion(windows: tuple[int, ...], t_bs: float, last: float, head) -> tuple[np.ndarray, ...]:
    """
    k = 0 的值由 head(下一阶段的均值) 给出，k >= 1 时逐个加 T_bs
    """
    r = len(windows)
    out: list[np.ndarray] = [np.empty(0)] * r
    for j in range(r - 1, -1, -1):
        first = last if j == r - 1 else head(float(out[j + 1].mean()))
        out[j] = first + t_bs * np.arange(windows[j] + 1)
    return tuple(out)


def access_delay_table(solved: SolvedModel, i: int) -> DelayTable:
    ac = solved.scenario.acs[i]
    dur = solved.durations[i]
    state = solved.steady_states[i]
    if dur is None or state is None:
        raise ConfigError(f"AC {i} is not active")
    space = state.space
    p_c = solved.p_cs[i]
    p_b = dur.idle_busy(p_c)
    p_lr = p_c ** ac.retry_limit

    access = _recursion(space.windows, dur.t_bs, dur.t_s,
                        lambda nxt: (1.0 - p_c) * dur.t_s + p_c * (nxt + dur.t_c))
    # 丢弃条件下的递推在 k = 0 处同样对下一阶段取均值
    access_drop = _recursion(space.windows, dur.t_bs, dur.t_c, lambda nxt: nxt + dur.t_c)
    mean_access = float(access[0].mean())
    mean_access_drop = float(access_drop[0].mean())
    # 空闲时到达：信道空闲则立即发送，否则等一个忙时隙再从阶段 0 退避
    mean_access_idle = dur.t_s * (1.0 - p_b) + (mean_access + dur.t_b) * p_b * (1.0 - p_lr)

    n = dur.n_txop
    tail: dict[int, float] = {}

    def d_tail(l: int) -> float:
        if l <= 0:
            return 0.0
        if l not in tail:
            if l == 1:
                tail[l] = mean_access * (1.0 - p_lr)
            else:
                tail[l] = (
                    (1.0 - p_lr) * (mean_access + min(n - 1, l - 1) * dur.t_exc + d_tail(l - n))
                    + p_lr * (mean_access_drop + d_tail(l - 1))
                )
        return tail[l]

    for l in range(1, space.queue_size + 1):
        d_tail(l)

    table = DelayTable(
        access=access,
        access_drop=access_drop,
        mean_access=mean_access,
        mean_access_drop=mean_access_drop,
        mean_access_idle=mean_access_idle,
        p_lr=p_lr,
        n_txop=n,
        t_exc=dur.t_exc,
        tail=dict(tail),
        per_state=np.zeros(len(space)),
        b_bar=np.zeros(len(space)),
    )

    share = time_share(solved, i)
    _, _, l_arr = space.coords
    accepted = (share > 0.0) & (l_arr < space.queue_size)
    per_state = np.zeros(len(space))
    for idx, (j, k, l) in enumerate(space.states()):
        if not accepted[idx]:
            continue
        if l == 0:
            # 后退避期间到达：总时延等于接入时延；(0,0,0) 为空闲状态
            per_state[idx] = mean_access_idle if k == 0 else access[0][k]
        else:
            per_state[idx] = table.D(j, k, l + 1)

    kept = float(share[accepted].sum())
    b_bar = np.where(accepted, share, 0.0) / kept if kept > 0.0 else np.zeros(len(space))
    return replace(table, per_state=per_state, b_bar=b_bar)


def total_delay(solved: SolvedModel, i: int, table: DelayTable | None = None) -> float:
    """E[D_i]，按被接收的包到达时看到的状态分布对时延取平均"""
    if table is None:
        table = access_delay_table(solved, i)
    return float(np.dot(table.per_state, table.b_bar))
