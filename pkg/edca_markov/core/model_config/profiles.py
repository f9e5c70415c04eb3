"""
内置 PHY 时序配置与参考场景

802.11g（54 / 6 Mbps）：20 µs 前导码 + PLCP 头，外加 6 µs 信号扩展；
MAC 头 + FCS + LLC 共 36 字节。ACK / RTS / CTS 以基本速率发送。
"""
from edca_markov.core.model_config.types import (
    AcConfig, PhyTiming, Scenario, AccessMode, StationMode, TrafficKind,
)

US = 1e-6

PHY_PROFILES: dict[str, PhyTiming] = {
    "80211g": PhyTiming(
        t_slot=9 * US,
        sifs=10 * US,
        prop_delay=1 * US,
        data_rate=54e6,
        basic_rate=6e6,
        phy_overhead=26 * US,
        mac_header_bits=36 * 8,
        t_ack=50 * US,
        t_rts=54 * US,
        t_cts=50 * US,
    ),
}

DEFAULT_PROFILE = "80211g"

# 参考场景：两个 AC，各 5 个站点，1034 字节负载
REFERENCE_PAYLOAD_BITS = 1034 * 8
REFERENCE_TXOP_LOW = 3.008e-3
REFERENCE_TXOP_HIGH = 1.504e-3


def reference_scenario(
        load_bps: float = 2e6,
        queue_size: int = 10,
        txop: bool = False,
        flows: int = 5,
        access_mode: AccessMode = AccessMode.BASIC,
        low_traffic: TrafficKind = TrafficKind.POISSON,
        high_traffic: TrafficKind = TrafficKind.POISSON,
) -> Scenario:
    """低优先级 AC（AIFSN=3, CW_min=15）与高优先级 AC（AIFSN=2, CW_min=7）"""
    lam = load_bps / REFERENCE_PAYLOAD_BITS
    low = AcConfig(
        name="AC1", aifsn=3, cw_min=15, m=3, retry_limit=7,
        txop_limit=REFERENCE_TXOP_LOW if txop else 0.0,
        queue_size=queue_size, payload_bits=REFERENCE_PAYLOAD_BITS,
        lam=lam, flows=flows, traffic=low_traffic,
    )
    high = AcConfig(
        name="AC3", aifsn=2, cw_min=7, m=3, retry_limit=7,
        txop_limit=REFERENCE_TXOP_HIGH if txop else 0.0,
        queue_size=queue_size, payload_bits=REFERENCE_PAYLOAD_BITS,
        lam=lam, flows=flows, traffic=high_traffic,
    )
    return Scenario(
        acs=(low, high),
        phy=PHY_PROFILES[DEFAULT_PROFILE],
        access_mode=access_mode,
        station_mode=StationMode.HETEROGENEOUS,
        name="reference-txop" if txop else "reference",
    )
