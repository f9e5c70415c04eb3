"""
多个独立种子仿真结果的均值与 Student-t 置信区间
"""
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import stats as sp_stats

from edca_markov.core.exceptions import SimulationError
from edca_markov.core.sim.types import SimStats

SIM_METRICS = ("throughput", "throughput_bps", "mean_delay", "plr", "p_c", "mean_queue_length", "p_idle")


@dataclass(frozen=True)
class Interval:
    mean: float
    half_width: float
    runs: int

    @property
    def low(self) -> float:
        return self.mean - self.half_width

    @property
    def high(self) -> float:
        return self.mean + self.half_width

    def contains(self, value: float) -> bool:
        return self.low <= value <= self.high


def sim_metrics(stats: SimStats, i: int) -> dict[str, float]:
    """单次仿真中 AC i 的各项指标，键与解析结果的列名一致"""
    dist = stats.queue_distribution(i)
    throughput = stats.throughput(i)
    return {
        "throughput": throughput,
        "throughput_bps": throughput * stats.data_rate,
        "mean_delay": stats.per_ac[i].mean_delay,
        "plr": stats.loss_ratio(i),
        "p_c": stats.collision_prob(i),
        "mean_queue_length": float(np.dot(np.arange(len(dist)), dist)) if len(dist) else 0.0,
        "p_idle": stats.idle_fraction,
    }


def interval(values: Sequence[float], level: float = 0.95) -> Interval:
    data = np.asarray(values, dtype=float)
    if len(data) < 2:
        raise SimulationError(f"a confidence interval needs at least 2 runs, got {len(data)}")
    mean = float(np.mean(data))
    sem = float(sp_stats.sem(data))
    if sem == 0.0 or not np.isfinite(sem):
        return Interval(mean=mean, half_width=0.0, runs=len(data))
    low, _ = sp_stats.t.interval(level, len(data) - 1, loc=mean, scale=sem)
    return Interval(mean=mean, half_width=float(mean - low), runs=len(data))


def confidence(stats_list: Sequence[SimStats], level: float = 0.95) -> tuple[dict[str, Interval], ...]:
    """
    按 AC 汇总多次仿真：每个指标给出样本均值与 95% 半宽

    Raises:
        SimulationError: 少于 2 次运行，或各次运行的场景不一致
    """
    if len(stats_list) < 2:
        raise SimulationError(f"a confidence interval needs at least 2 runs, got {len(stats_list)}")
    n_acs = len(stats_list[0].per_ac)
    if any(len(s.per_ac) != n_acs for s in stats_list):
        raise SimulationError("runs in one confidence batch must share the same scenario")

    out: list[dict[str, Interval]] = []
    for i in range(n_acs):
        samples = [sim_metrics(s, i) for s in stats_list]
        out.append({name: interval([row[name] for row in samples], level) for name in SIM_METRICS})
    return tuple(out)
