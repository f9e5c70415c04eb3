"""
解析模型与仿真的对比，以及多种子仿真批次
"""
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from edca_markov.core.logger import logger
from edca_markov.core.metrics.report import compute_metrics
from edca_markov.core.metrics.types import Metrics
from edca_markov.core.model_config.types import Scenario
from edca_markov.core.schemas.documents import ComparisonRow
from edca_markov.core.sim.confidence import Interval, SIM_METRICS, confidence, sim_metrics
from edca_markov.core.sim.engine import run
from edca_markov.core.sim.types import SimStats
from edca_markov.core.solver.fixed_point import solve
from edca_markov.core.solver.types import SolveOptions
from edca_markov.core.experiments.workers import ordered_map

# 解析结果中与仿真指标同名的字段；p_idle 属于信道，单独处理
_AC_METRICS = tuple(name for name in SIM_METRICS if name != "p_idle")


@dataclass(frozen=True)
class _SimJob:
    scenario: Scenario
    seed: int
    duration: float
    trace_path: Optional[Path] = None


def _run_job(job: _SimJob) -> SimStats:
    return run(job.scenario, job.seed, job.duration, trace_path=job.trace_path)


def trace_path_for(base: Path, seed: int, many: bool) -> Path:
    """多种子时在文件名中插入种子编号"""
    if not many:
        return base
    return base.with_name(f"{base.stem}.{seed}{base.suffix}")


def simulate_seeds(scenario: Scenario, seeds: Sequence[int], duration: float, workers: Optional[int] = None,
                   trace_path: Optional[Path] = None) -> list[SimStats]:
    """每个种子一次独立仿真，结果按种子顺序返回"""
    many = len(seeds) > 1
    jobs = [
        _SimJob(scenario, seed, duration, trace_path_for(Path(trace_path), seed, many) if trace_path else None)
        for seed in seeds
    ]
    logger.info(f"仿真场景 '{scenario.name}'：{len(jobs)} 个种子，每次 {duration}s")
    return ordered_map(_run_job, jobs, workers)


def _relative_error(analytic: float, simulated: float) -> Optional[float]:
    if analytic == 0.0:
        return None
    return abs(simulated - analytic) / abs(analytic)


def comparison_rows(metrics: Metrics, runs: Sequence[SimStats]) -> list[ComparisonRow]:
    """
    每个活跃 AC、每个指标一行。只有一次仿真时 half_width 留空，
    仿真值直接取该次结果。
    """
    intervals: Optional[tuple[dict[str, Interval], ...]] = None
    if len(runs) >= 2:
        intervals = confidence(runs)
    else:
        logger.warning("只有一个种子，无法给出置信区间")

    def simulated(i: int, name: str) -> tuple[float, Optional[float]]:
        if intervals is not None:
            ci = intervals[i][name]
            return ci.mean, ci.half_width
        return sim_metrics(runs[0], i)[name], None

    rows: list[ComparisonRow] = []
    for ac in metrics.per_ac:
        if not ac.active:
            continue
        for name in _AC_METRICS:
            expected = float(getattr(ac, name))
            value, half = simulated(ac.index, name)
            rows.append(ComparisonRow(
                scenario=metrics.scenario, ac=ac.name, metric=name, analytic=expected, simulated=value,
                half_width=half, rel_error=_relative_error(expected, value), runs=len(runs),
            ))
    first = next(ac.index for ac in metrics.per_ac if ac.active)
    value, half = simulated(first, "p_idle")
    rows.append(ComparisonRow(
        scenario=metrics.scenario, ac="channel", metric="p_idle", analytic=metrics.p_idle, simulated=value,
        half_width=half, rel_error=_relative_error(metrics.p_idle, value), runs=len(runs),
    ))
    return rows


def compare(scenario: Scenario, seeds: Sequence[int], duration: float, opts: SolveOptions = SolveOptions(),
            workers: Optional[int] = None) -> tuple[Metrics, list[ComparisonRow]]:
    """解析求解 + 多种子仿真，返回解析指标与逐项对比表"""
    metrics = compute_metrics(solve(scenario, opts))
    runs = simulate_seeds(scenario, seeds, duration, workers)
    return metrics, comparison_rows(metrics, runs)
