"""
退避时隙位置链：第 n 个时隙当且仅当前一个时隙无人发送时才会到达，
否则回到第 1 个时隙；链长截断在 W_min。
"""
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from edca_markov.core.exceptions import DegenerateZoneError
from edca_markov.core.zones.layout import ZoneLayout


@dataclass(frozen=True, eq=False)
class ZoneOccupancy:
    b_prime: np.ndarray = field(repr=False)   # b'_n，下标 0 对应 n = 1
    p_z: dict[int, float]                     # 区间标号 -> 随机退避时隙落在该区间的概率
    layout: ZoneLayout

    def b(self, n: int) -> float:
        return float(self.b_prime[n - 1])


def silent_product(taus: Sequence[float], flows: Sequence[int], members: Sequence[int],
                   exclude_self: int | None = None) -> float:
    """Π (1-τ)^f；exclude_self 的站点数减一"""
    out = 1.0
    for i in members:
        f = flows[i] - (1 if i == exclude_self else 0)
        if f > 0:
            out *= (1.0 - taus[i]) ** f
    return out


def p_tr_zone(taus: Sequence[float], flows: Sequence[int], layout: ZoneLayout, x: int) -> float:
    """区间 x 的一个时隙内至少有一次发送的概率"""
    return 1.0 - silent_product(taus, flows, layout.eligible(x))


def gamma(taus: Sequence[float], flows: Sequence[int], layout: ZoneLayout, n: int) -> float:
    """AIFS_min 之后第 n+1 个时隙（n 从 0 开始）无人发送的概率"""
    return 1.0 - p_tr_zone(taus, flows, layout, layout.zone_of_slot(n + 1))


def zone_chain_occupancy(layout: ZoneLayout, taus: Sequence[float], flows: Sequence[int]) -> ZoneOccupancy:
    if layout.w_min < 1:
        raise DegenerateZoneError(f"W_min must be >= 1, got {layout.w_min}")
    p_tr = {x: p_tr_zone(taus, flows, layout, x) for x in layout.zones}
    advance = np.array([1.0 - p_tr[layout.zone_of_slot(n)] for n in range(1, layout.w_min)])
    # b'_n ∝ Π_{m<n} (1 - p^tr_{x(m)})
    weights = np.concatenate(([1.0], np.cumprod(advance)))
    b_prime = weights / weights.sum()
    p_z = {x: float(sum(b_prime[n - 1] for n in layout.slot_range(x))) for x in layout.zones}
    return ZoneOccupancy(b_prime=b_prime, p_z=p_z, layout=layout)
