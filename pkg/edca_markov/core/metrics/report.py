"""
把求解结果汇总成一份指标文档
"""
from edca_markov.core.logger import logger
from edca_markov.core.metrics.delay import access_delay_table, total_delay
from edca_markov.core.metrics.loss import mean_queue_length, packet_loss_ratio, queue_distribution
from edca_markov.core.metrics.throughput import idle_probability, success_probability, throughput
from edca_markov.core.metrics.types import AcMetrics, Metrics
from edca_markov.core.solver.types import SolvedModel


def compute_metrics(solved: SolvedModel) -> Metrics:
    scenario = solved.scenario
    data_rate = scenario.phy.data_rate
    p_idle = idle_probability(solved)
    per_ac_s, total_s = throughput(solved, p_idle)

    per_ac: list[AcMetrics] = []
    for i, ac in enumerate(scenario.acs):
        name = ac.name or f"AC{i}"
        state = solved.steady_states[i]
        dur = solved.durations[i]
        if state is None or dur is None:
            per_ac.append(AcMetrics(index=i, name=name, active=False))
            continue

        table = access_delay_table(solved, i)
        if ac.lam > 0:
            delays = (table.mean_access, table.mean_access_idle, table.mean_access_drop, total_delay(solved, i, table))
        else:
            # 没有包到达，时延没有意义，记为 0
            delays = (0.0, 0.0, 0.0, 0.0)
        p_c = solved.p_cs[i]
        per_ac.append(AcMetrics(
            index=i,
            name=name,
            active=True,
            tau=solved.taus[i],
            p_c=p_c,
            p_s=success_probability(solved, i, p_idle),
            throughput=per_ac_s[i],
            throughput_bps=per_ac_s[i] * data_rate,
            offered_bps=ac.offered_load_bps * ac.flows,
            mean_access_delay=delays[0],
            mean_idle_access_delay=delays[1],
            mean_drop_access_delay=delays[2],
            mean_delay=delays[3],
            plr=packet_loss_ratio(solved, i),
            retry_drop_prob=p_c ** ac.retry_limit,
            mean_queue_length=mean_queue_length(solved, i),
            queue_distribution=tuple(float(p) for p in queue_distribution(solved, i)),
            n_txop=dur.n_txop,
            t_txop=dur.t_txop,
        ))

    if total_s > 1.0:
        logger.warning(f"场景 '{scenario.name}' 的总归一化吞吐量 {total_s:.4f} 超过 1")
    return Metrics(
        scenario=scenario.name,
        per_ac=tuple(per_ac),
        total_throughput=total_s,
        total_throughput_bps=total_s * data_rate,
        p_idle=p_idle,
        converged=solved.converged,
        iterations=solved.iterations,
        residual=solved.residual,
    )
