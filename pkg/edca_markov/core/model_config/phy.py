"""
PHY 时序算术：AIFS、竞争窗口、帧时长与 TXOP 内可容纳的交换次数
"""
import math

from edca_markov.core.exceptions import ConfigError
from edca_markov.core.model_config.types import AcConfig, PhyTiming, AccessMode


def aifs_of(ac: AcConfig, phy: PhyTiming) -> float:
    """AIFS = SIFS + AIFSN × T_slot"""
    return phy.sifs + ac.aifsn * phy.t_slot


def cw_at_stage(ac: AcConfig, j: int) -> int:
    """第 j 个退避阶段的竞争窗口 W_j = 2^min(j,m) (CW_min+1) - 1"""
    if not 0 <= j <= ac.retry_limit - 1:
        raise ConfigError(f"backoff stage {j} outside [0, {ac.retry_limit - 1}]")
    return (2 ** min(j, ac.m)) * (ac.cw_min + 1) - 1


def cw_max(ac: AcConfig) -> int:
    return (2 ** ac.m) * (ac.cw_min + 1) - 1


def payload_airtime(ac: AcConfig, phy: PhyTiming) -> float:
    """纯负载的发送时间，吞吐量分子只计入这一部分"""
    return ac.payload_bits / phy.data_rate


def frame_time(ac: AcConfig, phy: PhyTiming) -> float:
    """数据帧发送时间 T_p，包含 PHY 开销与 MAC 头"""
    return phy.phy_overhead + (ac.payload_bits + phy.mac_header_bits) / phy.data_rate


def success_duration(ac: AcConfig, phy: PhyTiming, mode: AccessMode) -> float:
    """一次成功传输占用的时间 T_s（含 AIFS）"""
    delta = phy.prop_delay
    t_p = frame_time(ac, phy)
    if mode == AccessMode.RTS_CTS:
        return (phy.t_rts + delta + phy.sifs + phy.t_cts + delta + phy.sifs
                + t_p + delta + phy.sifs + phy.t_ack + delta + aifs_of(ac, phy))
    return t_p + delta + phy.sifs + phy.t_ack + delta + aifs_of(ac, phy)


def collision_duration(ac: AcConfig, phy: PhyTiming, mode: AccessMode, aifs: float | None = None) -> float:
    """一次碰撞占用的时间 T_c；包长相同，T_p* = T_p"""
    aifs = aifs_of(ac, phy) if aifs is None else aifs
    if mode == AccessMode.RTS_CTS:
        return phy.t_rts + phy.effective_cts_timeout + aifs
    return frame_time(ac, phy) + phy.effective_ack_timeout + aifs


def exchange_duration(ac: AcConfig, phy: PhyTiming, mode: AccessMode) -> float:
    """TXOP 内一次帧交换的时长，交换之间以 SIFS 而不是 AIFS 分隔"""
    return success_duration(ac, phy, mode) - aifs_of(ac, phy) + phy.sifs


def txop_packets(ac: AcConfig, phy: PhyTiming, mode: AccessMode) -> int:
    """N = max(1, floor((TXOP + SIFS) / T_exc))"""
    t_exc = exchange_duration(ac, phy, mode)
    # 微秒级参数在浮点下会出现 4.999999 之类的误差
    return max(1, math.floor((ac.txop_limit + phy.sifs) / t_exc + 1e-9))
