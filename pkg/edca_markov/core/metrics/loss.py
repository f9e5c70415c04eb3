"""
按时间加权的状态分布：DTMC 每一步的时长不同，泊松到达看到的是时间平均
"""
import numpy as np

from edca_markov.core.dtmc.measures import sojourn_times
from edca_markov.core.exceptions import ConfigError
from edca_markov.core.model_config.arrivals import ArrivalKernel, rho
from edca_markov.core.solver.types import SolvedModel


def _state(solved: SolvedModel, i: int):
    state = solved.steady_states[i]
    if state is None:
        raise ConfigError(f"AC {i} is not active")
    return state


def time_share(solved: SolvedModel, i: int) -> np.ndarray:
    """b 乘以各状态的平均停留时间后归一化，即 AC_i 处于每个状态的时间比例"""
    state, dur = _state(solved, i), solved.durations[i]
    ac, phy = solved.scenario.acs[i], solved.scenario.phy
    weights = state.b * sojourn_times(state.space, dur, solved.p_cs[i], rho(ArrivalKernel.for_ac(ac), phy), phy.t_slot)
    total = float(weights.sum())
    if total <= 0.0:
        raise ConfigError(f"AC {i}: steady state carries no time")
    return weights / total


def packet_loss_ratio(solved: SolvedModel, i: int) -> float:
    """
    队满丢包（到达时缓存已满）加上重试上限丢包（被接收的包以 p_c^r 丢弃）
    """
    state = _state(solved, i)
    _, _, l = state.space.coords
    full = float(time_share(solved, i)[l == state.space.queue_size].sum())
    p_lr = solved.p_cs[i] ** solved.scenario.acs[i].retry_limit
    return min(1.0, max(0.0, full + (1.0 - full) * p_lr))


def queue_distribution(solved: SolvedModel, i: int) -> np.ndarray:
    """Pr(l = l')，按时间比例统计；不占时间的状态不计入"""
    state = _state(solved, i)
    _, _, l = state.space.coords
    return np.bincount(l, weights=time_share(solved, i), minlength=state.space.queue_size + 1)


def mean_queue_length(solved: SolvedModel, i: int) -> float:
    dist = queue_distribution(solved, i)
    return float(np.dot(np.arange(dist.size), dist))
