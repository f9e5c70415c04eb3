"""
归一化吞吐量：时隙空闲概率 p_I、各 AC 的成功概率 p_s 与 S_i
"""
from scipy.optimize import bisect

from edca_markov.core.exceptions import DegenerateZoneError
from edca_markov.core.model_config.phy import payload_airtime
from edca_markov.core.model_config.types import StationMode
from edca_markov.core.solver.durations import channel_collision_duration
from edca_markov.core.solver.types import SolvedModel
from edca_markov.core.zones.layout import ZoneLayout
from edca_markov.core.zones.occupancy import gamma

BISECT_XTOL = 1e-12


def idle_probability(solved: SolvedModel) -> float:
    """
    解 p_I = Σ_{n<D} γ_n (1-p_I) p_I^n + γ_D p_I^D，D 为最大的 d

    Raises:
        DegenerateZoneError: 端点处符号不满足，[0, 1] 内没有根
    """
    scenario = solved.scenario
    layout = ZoneLayout.from_scenario(scenario)
    flows = [ac.flows for ac in scenario.acs]
    d_max = layout.d_max
    gammas = [gamma(solved.taus, flows, layout, n) for n in range(d_max + 1)]

    def gap(p: float) -> float:
        value = sum(gammas[n] * (1.0 - p) * p ** n for n in range(d_max)) + gammas[d_max] * p ** d_max
        return value - p

    low, high = gap(0.0), gap(1.0)
    if high >= 0.0:
        if high > 0.0:
            raise DegenerateZoneError(f"idle-slot equation has no root in [0, 1] (f(1)={high:.3e})")
        return 1.0
    if low <= 0.0:
        if low < 0.0:
            raise DegenerateZoneError(f"idle-slot equation has no root in [0, 1] (f(0)={low:.3e})")
        return 0.0
    return float(bisect(gap, 0.0, 1.0, xtol=BISECT_XTOL))


def _silent(solved: SolvedModel, i: int, max_d: int) -> float:
    """d <= max_d 的竞争者全部沉默的概率，AC_i 自身的站点数减一"""
    scenario = solved.scenario
    layout = ZoneLayout.from_scenario(scenario)
    taus = solved.taus
    out = 1.0
    for i2, ac in enumerate(scenario.acs):
        if not ac.active or layout.d[i2] > max_d:
            continue
        exponent = ac.flows - 1 if (i2 == i or scenario.station_mode == StationMode.MULTI_AC) else ac.flows
        if exponent > 0:
            out *= (1.0 - taus[i2]) ** exponent
    if scenario.station_mode == StationMode.MULTI_AC:
        # 本站更高优先级的 AC 在虚拟碰撞中胜出
        for i2 in range(i + 1, len(scenario.acs)):
            if scenario.acs[i2].active:
                out *= 1.0 - taus[i2]
    return out


def success_probability(solved: SolvedModel, i: int, p_idle: float | None = None) -> float:
    """AC_i 在一个任意退避时隙内成功发送的概率"""
    scenario = solved.scenario
    ac = scenario.acs[i]
    tau_i = solved.taus[i]
    if not ac.active or tau_i <= 0.0:
        return 0.0
    if p_idle is None:
        p_idle = idle_probability(solved)
    layout = ZoneLayout.from_scenario(scenario)
    d_max = layout.d_max
    p_busy = 1.0 - p_idle
    total = sum(
        p_busy * p_idle ** (n - 1) * _silent(solved, i, n - 1)
        for n in range(layout.d[i] + 1, d_max + 1)
    )
    total += p_idle ** d_max * _silent(solved, i, d_max)
    return ac.flows * tau_i * total


def throughput(solved: SolvedModel, p_idle: float | None = None) -> tuple[tuple[float, ...], float]:
    """
    Returns:
        (各 AC 的 S_i, S_total)；未激活的 AC 为 0
    """
    scenario = solved.scenario
    phy = scenario.phy
    if p_idle is None:
        p_idle = idle_probability(solved)
    p_s = [success_probability(solved, i, p_idle) for i in range(len(scenario.acs))]
    busy_txop = sum(
        p * solved.durations[i].t_txop for i, p in enumerate(p_s) if solved.durations[i] is not None
    )
    p_col = max(0.0, 1.0 - p_idle - sum(p_s))
    denominator = p_idle * phy.t_slot + busy_txop + p_col * channel_collision_duration(scenario)
    if denominator <= 0.0:
        raise DegenerateZoneError("generic slot has zero mean duration")

    per_ac = []
    for i, ac in enumerate(scenario.acs):
        dur = solved.durations[i]
        if dur is None or p_s[i] == 0.0:
            per_ac.append(0.0)
            continue
        n_txop = (dur.t_txop - dur.aifs + phy.sifs) / dur.t_exc
        per_ac.append(p_s[i] * n_txop * payload_airtime(ac, phy) / denominator)
    return tuple(per_ac), sum(per_ac)
