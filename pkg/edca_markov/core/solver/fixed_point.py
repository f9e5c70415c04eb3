"""
耦合非线性方程组的阻尼不动点迭代

每一轮依次计算：区间占用 -> p_c -> 持续时间 -> 到达核 -> DTMC 稳态 -> τ，
然后 τ_new = (1-θ)·τ_old + θ·τ(稳态)。T_txop 取上一轮稳态的结果，初值为 T_s。
"""
from dataclasses import replace
from typing import Optional, Sequence

import numpy as np

from edca_markov.core.dtmc.measures import mean_txop_duration, tau
from edca_markov.core.dtmc.state_space import StateSpace, enumerate_states
from edca_markov.core.dtmc.steady_state import SteadyState, steady_state
from edca_markov.core.dtmc.transitions import build_transition_matrix
from edca_markov.core.exceptions import ConfigError, ConvergenceError
from edca_markov.core.logger import logger
from edca_markov.core.model_config.arrivals import ArrivalKernel, rho
from edca_markov.core.model_config.types import Scenario
from edca_markov.core.solver.durations import collision_probs, compute_durations, static_durations
from edca_markov.core.solver.types import DurationSet, SolvedModel, SolveOptions, TraceRow
from edca_markov.core.zones.layout import ZoneLayout
from edca_markov.core.zones.occupancy import zone_chain_occupancy


def initial_taus(scenario: Scenario, opts: SolveOptions) -> list[float]:
    if opts.initial_tau is not None:
        if len(opts.initial_tau) == 1:
            return [opts.initial_tau[0] if ac.active else 0.0 for ac in scenario.acs]
        if len(opts.initial_tau) != len(scenario.acs):
            raise ConfigError(f"initial_tau needs 1 or {len(scenario.acs)} entries")
        return [t if ac.active else 0.0 for t, ac in zip(opts.initial_tau, scenario.acs)]
    # 没有业务的 AC 从 0 开始，其余取 2/(CW_min+2)
    return [2.0 / (ac.cw_min + 2) if ac.active and ac.lam > 0 else 0.0 for ac in scenario.acs]


def solve_chain(scenario: Scenario, i: int, p_c: float, durations: DurationSet,
                space: Optional[StateSpace] = None) -> SteadyState:
    """给定 p_c 与持续时间，求单个 AC 的 DTMC 稳态"""
    ac = scenario.acs[i]
    kernel = ArrivalKernel.for_ac(ac)
    if space is None:
        space = enumerate_states(ac, durations.n_txop)
    matrix = build_transition_matrix(ac, scenario.phy, p_c, durations, kernel, space)
    b = steady_state(matrix)
    tau_i = tau(b, space, durations.idle_busy(p_c), rho(kernel, scenario.phy))
    t_txop, fallback = mean_txop_duration(b, space, durations)
    return SteadyState(space=space, b=b, tau=tau_i, t_txop=t_txop, txop_fallback=fallback)


def solve(scenario: Scenario, opts: SolveOptions = SolveOptions(), strict: bool = False) -> SolvedModel:
    """
    Args:
        strict: 达到最大迭代次数时抛出 ConvergenceError，否则返回 converged=False 的最优迭代

    Returns:
        SolvedModel: τ / p_c / 持续时间与稳态彼此一致（都来自同一轮的 τ_old）
    """
    layout = ZoneLayout.from_scenario(scenario)
    flows = [ac.flows for ac in scenario.acs]
    spaces = {
        i: enumerate_states(scenario.acs[i], static_durations(scenario, i)[4])
        for i in scenario.active_indices
    }
    taus = np.array(initial_taus(scenario, opts))
    t_txops: Optional[Sequence[float]] = None
    fallbacks: Optional[Sequence[bool]] = None
    best: Optional[SolvedModel] = None
    trace: list[TraceRow] = []

    for iteration in range(1, opts.max_iters + 1):
        occ = zone_chain_occupancy(layout, taus, flows)
        p_cs = collision_probs(scenario, layout, occ, taus)
        durations = compute_durations(scenario, taus, occ, t_txops, fallbacks)
        states = tuple(
            solve_chain(scenario, i, p_cs[i], durations[i], spaces[i]) if durations[i] is not None else None
            for i in range(len(scenario.acs))
        )
        raw = np.array([s.tau if s is not None else 0.0 for s in states])
        residual = float(np.max(np.abs(raw - taus)))

        row = TraceRow(iteration=iteration, taus=tuple(float(t) for t in taus), p_cs=p_cs, residual=residual)
        if opts.keep_trace:
            trace.append(row)
        logger.debug(f"迭代 {iteration}: τ={np.round(taus, 6).tolist()} p_c={np.round(p_cs, 6).tolist()} "
                     f"残差={residual:.3e}")

        snapshot = SolvedModel(
            scenario=scenario,
            taus=row.taus,
            p_cs=p_cs,
            durations=durations,
            steady_states=states,
            iterations=iteration,
            residual=residual,
            converged=residual < opts.tol,
        )
        if best is None or residual < best.residual:
            best = snapshot
        if snapshot.converged:
            logger.info(f"场景 '{scenario.name}' 在 {iteration} 次迭代后收敛 (残差 {residual:.2e})")
            return replace(snapshot, trace=tuple(trace))

        taus = (1.0 - opts.damping) * taus + opts.damping * raw
        t_txops = [
            s.t_txop if s is not None else static_durations(scenario, i)[1]
            for i, s in enumerate(states)
        ]
        fallbacks = [s.txop_fallback if s is not None else False for s in states]

    assert best is not None
    best = replace(best, converged=False, trace=tuple(trace))
    logger.warning(f"场景 '{scenario.name}' 在 {opts.max_iters} 次迭代内未收敛，"
                   f"返回残差最小的迭代 (第 {best.iterations} 次, 残差 {best.residual:.2e})")
    if strict:
        raise ConvergenceError("fixed point did not converge", best=best, residual=best.residual)
    return best


def chain_matrix(solved: SolvedModel, i: int):
    """重建解中 AC i 的转移矩阵（用于导出检查）"""
    state, durations = solved.steady_states[i], solved.durations[i]
    if state is None or durations is None:
        raise ConfigError(f"AC {i} is not active")
    ac = solved.scenario.acs[i]
    matrix = build_transition_matrix(ac, solved.scenario.phy, solved.p_cs[i], durations,
                                     ArrivalKernel.for_ac(ac), state.space)
    return state.space, matrix
