from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

from edca_markov.core.exceptions import ConfigError


class AccessMode(str, Enum):
    """信道接入方式"""
    BASIC = "basic"
    RTS_CTS = "rts_cts"


class StationMode(str, Enum):
    """站点承载 AC 的方式"""
    HETEROGENEOUS = "heterogeneous"   # 每个站点只有一个 AC
    MULTI_AC = "multi_ac"             # 每个站点承载全部活跃 AC，存在内部（虚拟）碰撞


class TrafficKind(str, Enum):
    """仿真器支持的到达过程"""
    POISSON = "poisson"
    CBR = "cbr"
    ON_OFF = "on_off"


@dataclass(frozen=True)
class PhyTiming:
    """PHY 时序参数，全部以秒 / bit/s 为单位"""
    t_slot: float
    sifs: float
    prop_delay: float
    data_rate: float
    basic_rate: float
    phy_overhead: float          # 每帧前导码 + PLCP 头
    t_ack: float
    t_rts: float
    t_cts: float
    mac_header_bits: int = 288
    ack_timeout: Optional[float] = None   # None 时取 EIFS - AIFS = SIFS + T_ack
    cts_timeout: Optional[float] = None

    def __post_init__(self):
        for name in ("t_slot", "data_rate", "basic_rate", "phy_overhead", "t_ack", "t_rts", "t_cts"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"phy.{name} must be strictly positive, got {getattr(self, name)}")
        if self.sifs < 0:
            raise ConfigError(f"phy.sifs must be non-negative, got {self.sifs}")
        if self.prop_delay < 0:
            raise ConfigError(f"phy.prop_delay must be non-negative, got {self.prop_delay}")
        if self.mac_header_bits < 0:
            raise ConfigError(f"phy.mac_header_bits must be non-negative, got {self.mac_header_bits}")
        for name in ("ack_timeout", "cts_timeout"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise ConfigError(f"phy.{name} must be strictly positive, got {value}")

    @property
    def effective_ack_timeout(self) -> float:
        return self.ack_timeout if self.ack_timeout is not None else self.sifs + self.t_ack

    @property
    def effective_cts_timeout(self) -> float:
        return self.cts_timeout if self.cts_timeout is not None else self.sifs + self.t_cts


@dataclass(frozen=True)
class AcConfig:
    """单个接入类别（AC）的 EDCA 参数、业务量与缓存大小"""
    aifsn: int
    cw_min: int
    m: int
    retry_limit: int
    txop_limit: float
    queue_size: int
    payload_bits: int
    lam: float                   # 泊松到达率，packets/s
    flows: int
    name: str = ""
    traffic: TrafficKind = TrafficKind.POISSON
    on_mean: float = 1.5         # On/Off 业务的平均开/关时长（秒）
    off_mean: float = 1.5

    def __post_init__(self):
        label = self.name or "ac"
        if self.aifsn < 1:
            raise ConfigError(f"{label}.aifsn must be >= 1, got {self.aifsn}")
        if self.cw_min < 1:
            raise ConfigError(f"{label}.cw_min must be >= 1, got {self.cw_min}")
        if self.retry_limit < 1:
            raise ConfigError(f"{label}.retry_limit must be >= 1, got {self.retry_limit}")
        if not 0 <= self.m < self.retry_limit:
            raise ConfigError(f"{label}.m must satisfy 0 <= m < retry_limit, got m={self.m}")
        if self.txop_limit < 0:
            raise ConfigError(f"{label}.txop_limit must be >= 0, got {self.txop_limit}")
        if self.queue_size < 1:
            raise ConfigError(f"{label}.queue_size must be >= 1, got {self.queue_size}")
        if self.payload_bits <= 0:
            raise ConfigError(f"{label}.payload_bits must be > 0, got {self.payload_bits}")
        if self.lam < 0:
            raise ConfigError(f"{label}.lambda must be >= 0, got {self.lam}")
        if self.flows < 0:
            raise ConfigError(f"{label}.flows must be >= 0, got {self.flows}")
        if self.on_mean <= 0 or self.off_mean <= 0:
            raise ConfigError(f"{label}.on_mean/off_mean must be > 0")

    @property
    def offered_load_bps(self) -> float:
        return self.lam * self.payload_bits

    @property
    def active(self) -> bool:
        return self.flows >= 1

    def with_load(self, load_bps: float) -> "AcConfig":
        """按 bit/s 负载换算到达率 λ = load / payload_bits"""
        return replace(self, lam=load_bps / self.payload_bits)


@dataclass(frozen=True)
class Scenario:
    """一组 AC 及其流数量、PHY 时序与接入方式；下标越大优先级越高"""
    acs: tuple[AcConfig, ...]
    phy: PhyTiming
    access_mode: AccessMode = AccessMode.BASIC
    station_mode: StationMode = StationMode.HETEROGENEOUS
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if not self.acs:
            raise ConfigError("scenario needs at least one AC block")
        # AIFS_0 >= AIFS_1 >= ...，AIFS 只依赖 AIFSN
        for lower, higher in zip(self.acs, self.acs[1:]):
            if lower.aifsn < higher.aifsn:
                raise ConfigError(
                    f"AIFS ordering violated: '{lower.name}' (aifsn={lower.aifsn}) must not be "
                    f"shorter than higher-priority '{higher.name}' (aifsn={higher.aifsn})"
                )
        if not any(ac.active for ac in self.acs):
            raise ConfigError("at least one AC needs flows >= 1")
        if self.station_mode == StationMode.MULTI_AC:
            counts = {ac.flows for ac in self.acs if ac.active}
            if len(counts) != 1:
                raise ConfigError("multi_ac station mode needs the same station count on every active AC")

    @property
    def active_indices(self) -> tuple[int, ...]:
        return tuple(i for i, ac in enumerate(self.acs) if ac.active)

    def with_load(self, load_bps: float) -> "Scenario":
        """所有 AC 使用同一个每流负载（bit/s）"""
        return replace(self, acs=tuple(ac.with_load(load_bps) for ac in self.acs))

    def scale_load(self, factor: float) -> "Scenario":
        """按比例缩放各 AC 的负载，保持 AC 之间的负载比例"""
        return replace(self, acs=tuple(replace(ac, lam=ac.lam * factor) for ac in self.acs))

    def with_flows(self, flows: int) -> "Scenario":
        """所有活跃 AC 使用同一个流数量"""
        return replace(self, acs=tuple(replace(ac, flows=flows) if ac.active else ac for ac in self.acs))

    def with_ac(self, index: int, **changes) -> "Scenario":
        acs = list(self.acs)
        acs[index] = replace(acs[index], **changes)
        return replace(self, acs=tuple(acs))
