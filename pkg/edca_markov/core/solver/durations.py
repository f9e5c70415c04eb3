"""
各 AC 的状态持续时间：T_s / T_c / T_exc / N 只依赖配置，
T_bs / T_b 依赖当前的 τ 与区间占用，T_txop 取上一轮迭代的稳态结果。
"""
from typing import Optional, Sequence

from edca_markov.core.exceptions import DegenerateZoneError
from edca_markov.core.logger import logger
from edca_markov.core.model_config.phy import (
    aifs_of, collision_duration, exchange_duration, success_duration, txop_packets,
)
from edca_markov.core.model_config.types import Scenario
from edca_markov.core.solver.types import DurationSet
from edca_markov.core.zones.layout import ZoneLayout
from edca_markov.core.zones.occupancy import ZoneOccupancy
from edca_markov.core.zones.outcomes import average_collision_prob, outcomes_by_zone, p_c_zone
from edca_markov.core.zones.slots import idle_busy_prob, mean_backoff_slot, mean_busy_slot


def static_durations(scenario: Scenario, i: int) -> tuple[float, float, float, float, int]:
    """(AIFS, T_s, T_c, T_exc, N)"""
    ac, phy, mode = scenario.acs[i], scenario.phy, scenario.access_mode
    return (
        aifs_of(ac, phy),
        success_duration(ac, phy, mode),
        collision_duration(ac, phy, mode),
        exchange_duration(ac, phy, mode),
        txop_packets(ac, phy, mode),
    )


def collision_probs(scenario: Scenario, layout: ZoneLayout, occ: ZoneOccupancy,
                    taus: Sequence[float]) -> tuple[float, ...]:
    """每个活跃 AC 的平均条件碰撞概率 p_c，未激活的 AC 为 0"""
    flows = [ac.flows for ac in scenario.acs]
    out = []
    for i, ac in enumerate(scenario.acs):
        if not ac.active:
            out.append(0.0)
            continue
        per_zone = {
            x: p_c_zone(layout, taus, flows, i, x, scenario.station_mode)
            for x in layout.zones_for(i)
        }
        out.append(average_collision_prob(occ, per_zone, layout, i))
    return tuple(out)


def compute_durations(
        scenario: Scenario,
        taus: Sequence[float],
        occ: ZoneOccupancy,
        t_txops: Optional[Sequence[float]] = None,
        txop_fallbacks: Optional[Sequence[bool]] = None,
) -> tuple[Optional[DurationSet], ...]:
    """
    Args:
        t_txops: 各 AC 的平均 TXOP 时长；None 时取 T_s
        txop_fallbacks: 对应 T_txop 是否为退化值，原样写入结果
    """
    layout = occ.layout
    flows = [ac.flows for ac in scenario.acs]
    static = [static_durations(scenario, i) for i in range(len(scenario.acs))]
    if t_txops is None:
        t_txops = [s[1] for s in static]
    if txop_fallbacks is None:
        txop_fallbacks = [False] * len(scenario.acs)

    out: list[Optional[DurationSet]] = []
    for i, ac in enumerate(scenario.acs):
        if not ac.active:
            out.append(None)
            continue
        aifs, t_s, t_c, t_exc, n_txop = static[i]
        outcomes = outcomes_by_zone(layout, taus, flows, i)
        t_bs = mean_backoff_slot(occ, outcomes, scenario.phy.t_slot, t_c, t_txops, layout, i)
        try:
            t_b = mean_busy_slot(occ, outcomes, t_c, t_txops, layout)
        except DegenerateZoneError:
            # 信道不可能忙时 T_b 只会乘以为 0 的忙概率
            logger.debug(f"AC {i}: 所有区间都不可能忙，T_b 取 T_c")
            t_b = t_c
        out.append(DurationSet(
            aifs=aifs, t_s=t_s, t_c=t_c, t_exc=t_exc, n_txop=n_txop,
            t_txop=t_txops[i], t_bs=t_bs, t_b=t_b, txop_fallback=txop_fallbacks[i],
            p_busy=min(1.0, max(0.0, idle_busy_prob(occ, outcomes, layout))),
        ))
    return tuple(out)


def channel_collision_duration(scenario: Scenario) -> float:
    """吞吐量分母中的碰撞时长：最长的帧，AIFS 取最短的 AIFS"""
    active = [scenario.acs[i] for i in scenario.active_indices]
    aifs_min = min(aifs_of(ac, scenario.phy) for ac in active)
    return max(collision_duration(ac, scenario.phy, scenario.access_mode, aifs=aifs_min) for ac in active)


