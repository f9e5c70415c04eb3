"""
AIFS 竞争区间的划分

d_i 为 AC_i 的 AIFS 比最短 AIFS 多出的时隙数（只在活跃 AC 之间比较）。
AIFS_min 之后的第 n 个退避时隙（n 从 1 开始）允许 d <= n-1 的 AC 竞争；
该时隙的区间标号是这些 AC 中 d 最大者里下标最高的那个。
"""
from dataclasses import dataclass

from edca_markov.core.exceptions import DegenerateZoneError
from edca_markov.core.model_config.phy import cw_max
from edca_markov.core.model_config.types import Scenario


@dataclass(frozen=True)
class ZoneLayout:
    d: tuple[int, ...]              # 每个 AC 的 d_i；未激活的 AC 也给出，但不参与区间划分
    active: tuple[bool, ...]
    zones: tuple[int, ...]          # 区间标号（AC 下标），按 d 升序，即按时间先后
    w_min: int

    @classmethod
    def from_scenario(cls, scenario: Scenario) -> "ZoneLayout":
        active = tuple(ac.active for ac in scenario.acs)
        aifsn_min = min(ac.aifsn for ac in scenario.acs if ac.active)
        d = tuple(ac.aifsn - aifsn_min for ac in scenario.acs)
        w_min = min(cw_max(ac) for ac in scenario.acs if ac.active)
        labels: dict[int, int] = {}
        for i, (d_i, is_active) in enumerate(zip(d, active)):
            if is_active:
                labels[d_i] = max(labels.get(d_i, i), i)
        zones = tuple(labels[value] for value in sorted(labels))
        return cls(d=d, active=active, zones=zones, w_min=w_min)

    @property
    def d_max(self) -> int:
        return max(self.d[x] for x in self.zones)

    def eligible(self, x: int) -> tuple[int, ...]:
        """区间 x 内可以竞争的活跃 AC"""
        return tuple(i for i, a in enumerate(self.active) if a and self.d[i] <= self.d[x])

    def zone_of_slot(self, n: int) -> int:
        """第 n 个退避时隙（n >= 1）所在区间的标号"""
        if n < 1:
            raise DegenerateZoneError(f"slot index must be >= 1, got {n}")
        current = self.zones[0]
        for x in self.zones:
            if self.d[x] <= n - 1:
                current = x
        return current

    def slot_range(self, x: int) -> range:
        """区间 x 覆盖的时隙 n（闭区间上界取下一个区间的 d，最后一个区间延伸到 W_min）"""
        position = self.zones.index(x)
        start = self.d[x] + 1
        if position + 1 < len(self.zones):
            stop = self.d[self.zones[position + 1]]
        else:
            stop = self.w_min
        return range(start, min(stop, self.w_min) + 1)

    def zones_for(self, i: int) -> tuple[int, ...]:
        """AC_i 可以发送的区间（d_x >= d_i）"""
        return tuple(x for x in self.zones if self.d[x] >= self.d[i])
