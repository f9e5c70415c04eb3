"""
区间内的碰撞概率与时隙结果（空闲 / 某个 AC 成功 / 碰撞）
"""
from dataclasses import dataclass
from typing import Sequence

from edca_markov.core.exceptions import DegenerateZoneError
from edca_markov.core.model_config.types import StationMode
from edca_markov.core.zones.layout import ZoneLayout
from edca_markov.core.zones.occupancy import ZoneOccupancy, silent_product


@dataclass(frozen=True)
class SlotOutcomes:
    """观察者 AC_i 处于退避时，区间 x 内一个时隙的结果分布"""
    zone: int
    observer: int
    p_idle: float
    p_suc: dict[int, float]
    p_col: float

    @property
    def p_busy(self) -> float:
        return 1.0 - self.p_idle


def p_c_zone(layout: ZoneLayout, taus: Sequence[float], flows: Sequence[int], i: int, x: int,
             station_mode: StationMode = StationMode.HETEROGENEOUS) -> float:
    """AC_i 在区间 x 内发送时遭遇（外部或内部）碰撞的条件概率"""
    if layout.d[x] < layout.d[i]:
        raise DegenerateZoneError(f"AC {i} cannot transmit in zone {x} (d_i={layout.d[i]} > d_x={layout.d[x]})")
    members = layout.eligible(x)
    if station_mode == StationMode.MULTI_AC:
        # 其他站点的全部 AC 保持沉默，且本站更高优先级的 AC 不发送（虚拟碰撞）
        other_stations = 1.0
        for i2 in members:
            if flows[i2] > 1:
                other_stations *= (1.0 - taus[i2]) ** (flows[i2] - 1)
        own_higher = 1.0
        for i2 in range(i + 1, len(taus)):
            if layout.active[i2]:
                own_higher *= 1.0 - taus[i2]
        return 1.0 - other_stations * own_higher
    return 1.0 - silent_product(taus, flows, members, exclude_self=i)


def average_collision_prob(occ: ZoneOccupancy, per_zone: dict[int, float], layout: ZoneLayout, i: int) -> float:
    """按时隙占用概率对区间碰撞概率加权平均，只统计 AC_i 可以发送的时隙"""
    slots = range(layout.d[i] + 1, layout.w_min + 1)
    if len(slots) == 0:
        raise DegenerateZoneError(f"AC {i} has no backoff slot before W_min={layout.w_min} (d_i={layout.d[i]})")
    weight = sum(occ.b(n) for n in slots)
    if weight <= 0.0:
        raise DegenerateZoneError(f"zero occupancy over the slots of AC {i}")
    return sum(per_zone[layout.zone_of_slot(n)] * occ.b(n) for n in slots) / weight


def slot_outcome_probs(layout: ZoneLayout, taus: Sequence[float], flows: Sequence[int], i: int,
                       x: int) -> SlotOutcomes:
    """
    观察者自身不发送：d_i <= d_x 时观察者所在 AC 的站点数减一。
    某个 AC_{i'} 成功等价于它恰好一个站点发送、其余可竞争站点全部沉默。
    """
    members = layout.eligible(x)
    self_in = i if layout.d[i] <= layout.d[x] else None
    counts = {m: flows[m] - (1 if m == self_in else 0) for m in members}
    p_idle = silent_product(taus, flows, members, exclude_self=self_in)
    p_suc: dict[int, float] = {}
    for i2 in range(len(taus)):
        f = counts.get(i2, 0)
        if f <= 0:
            p_suc[i2] = 0.0
            continue
        rest = 1.0
        for m in members:
            if m != i2 and counts[m] > 0:
                rest *= (1.0 - taus[m]) ** counts[m]
        p_suc[i2] = f * taus[i2] * (1.0 - taus[i2]) ** (f - 1) * rest
    p_col = max(0.0, 1.0 - p_idle - sum(p_suc.values()))
    return SlotOutcomes(zone=x, observer=i, p_idle=p_idle, p_suc=p_suc, p_col=p_col)


def outcomes_by_zone(layout: ZoneLayout, taus: Sequence[float], flows: Sequence[int], i: int) -> dict[int, SlotOutcomes]:
    return {x: slot_outcome_probs(layout, taus, flows, i, x) for x in layout.zones}
