from typing import Mapping, Sequence

from edca_markov.core.exceptions import DegenerateZoneError
from edca_markov.core.zones.layout import ZoneLayout
from edca_markov.core.zones.occupancy import ZoneOccupancy
from edca_markov.core.zones.outcomes import SlotOutcomes


def _slot_length(o: SlotOutcomes, t_slot: float, t_c: float, t_txops: Sequence[float]) -> float:
    return o.p_idle * t_slot + o.p_col * t_c + sum(p * t_txops[i2] for i2, p in o.p_suc.items() if p > 0.0)


def mean_backoff_slot(occ: ZoneOccupancy, outcomes: Mapping[int, SlotOutcomes], t_slot: float, t_c: float,
                      t_txops: Sequence[float], layout: ZoneLayout, i: int) -> float:
    """
    两次退避计数递减之间的平均时间 T_bs

    分子对所有区间求和：AC_i 还在等待 AIFS_i 的区间同样会经过空闲或忙时隙。
    分母是 AC_i 可以计数的区间的占用概率之和，即 1 减去更早区间的占用概率。
    """
    scale = sum(occ.p_z[x] for x in layout.zones_for(i))
    if scale <= 0.0:
        raise DegenerateZoneError(f"AC {i}: zones it can count down in have zero occupancy")
    total = sum(_slot_length(outcomes[x], t_slot, t_c, t_txops) * occ.p_z[x] for x in layout.zones)
    return total / scale


def mean_busy_slot(occ: ZoneOccupancy, outcomes: Mapping[int, SlotOutcomes], t_c: float,
                   t_txops: Sequence[float], layout: ZoneLayout) -> float:
    """
    空闲状态下的 AC 观察到的忙时隙平均长度 T_b；只在可能忙的区间之间归一化

    Raises:
        DegenerateZoneError: 所有区间都不可能忙
    """
    busy_zones = [x for x in layout.zones if outcomes[x].p_idle < 1.0 and occ.p_z[x] > 0.0]
    scale = sum(occ.p_z[x] for x in busy_zones)
    if not busy_zones or scale <= 0.0:
        raise DegenerateZoneError("no contention zone can be busy")
    total = 0.0
    for x in busy_zones:
        o = outcomes[x]
        busy = o.p_busy
        slot = o.p_col / busy * t_c + sum(p / busy * t_txops[i2] for i2, p in o.p_suc.items() if p > 0.0)
        total += slot * occ.p_z[x]
    return total / scale


def idle_busy_prob(occ: ZoneOccupancy, outcomes: Mapping[int, SlotOutcomes], layout: ZoneLayout) -> float:
    """空闲状态的 AC_i 收到包时，当前时隙内有其他站点发送的概率（对所有区间按占用概率平均）"""
    return sum(outcomes[x].p_busy * occ.p_z[x] for x in layout.zones)
