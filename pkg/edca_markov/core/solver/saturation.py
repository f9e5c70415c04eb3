"""
经典饱和模型（单 AC、相同 AIFS、TXOP=0，即 DCF）下的发送概率，
作为完整 DTMC 在 λ→∞ 极限下的独立对照。
"""
from scipy.optimize import brentq

from edca_markov.core.exceptions import ConfigError
from edca_markov.core.model_config.phy import cw_at_stage
from edca_markov.core.model_config.types import AcConfig


def tau_given_p(ac: AcConfig, p: float) -> float:
    """
    固定碰撞概率 p 下每个时隙的发送概率

    第 j 阶段平均停留 (W_j + 2) / 2 个时隙，到达第 j 阶段的概率为 p^j。
    """
    attempts = 0.0
    slots = 0.0
    for j in range(ac.retry_limit):
        reach = p ** j
        attempts += reach
        slots += reach * (cw_at_stage(ac, j) + 2) / 2.0
    return attempts / slots


def saturation_tau(ac: AcConfig, stations: int | None = None) -> tuple[float, float]:
    """
    解 τ = τ(p), p = 1 - (1-τ)^(n-1)

    Returns:
        (τ, p)
    """
    n = ac.flows if stations is None else stations
    if n < 1:
        raise ConfigError(f"saturation model needs at least one station, got {n}")
    if n == 1:
        return tau_given_p(ac, 0.0), 0.0

    def gap(t: float) -> float:
        return t - tau_given_p(ac, 1.0 - (1.0 - t) ** (n - 1))

    t = brentq(gap, 0.0, 1.0, xtol=1e-14)
    return t, 1.0 - (1.0 - t) ** (n - 1)
