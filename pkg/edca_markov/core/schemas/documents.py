# documents.py
"""
对外输出的文档结构：单次求解的 JSON 文档、扫描 / 仿真共用的 CSV 行、对比表的行
"""
from dataclasses import asdict
from typing import Optional

from pydantic import BaseModel

from edca_markov.core.metrics.types import AcMetrics, Metrics
from edca_markov.core.sim.confidence import sim_metrics
from edca_markov.core.sim.types import SimStats


class AcMetricsDocument(BaseModel):
    index: int
    name: str
    active: bool
    tau: float
    p_c: float
    p_s: float
    throughput: float
    throughput_bps: float
    offered_bps: float
    mean_access_delay: float
    mean_idle_access_delay: float
    mean_drop_access_delay: float
    mean_delay: float
    plr: float
    retry_drop_prob: float
    mean_queue_length: float
    queue_distribution: list[float]
    n_txop: int
    t_txop: float

    @classmethod
    def from_metrics(cls, ac: AcMetrics) -> "AcMetricsDocument":
        return cls(**asdict(ac))


class MetricsDocument(BaseModel):
    scenario: str
    converged: bool
    iterations: int
    residual: float
    p_idle: float
    total_throughput: float
    total_throughput_bps: float
    per_ac: list[AcMetricsDocument]

    @classmethod
    def from_metrics(cls, metrics: Metrics) -> "MetricsDocument":
        return cls(
            scenario=metrics.scenario,
            converged=metrics.converged,
            iterations=metrics.iterations,
            residual=metrics.residual,
            p_idle=metrics.p_idle,
            total_throughput=metrics.total_throughput,
            total_throughput_bps=metrics.total_throughput_bps,
            per_ac=[AcMetricsDocument.from_metrics(ac) for ac in metrics.per_ac],
        )


class MetricRow(BaseModel):
    """解析与仿真共用的一行（每个 AC 一行），列顺序即 CSV 列顺序"""
    scenario: str
    source: str                       # analytic | sim
    seed: Optional[int] = None
    axis: Optional[str] = None
    value: Optional[float] = None
    status: str = "ok"
    ac: str
    flows: int
    tau: Optional[float] = None
    p_c: Optional[float] = None
    throughput: Optional[float] = None
    throughput_bps: Optional[float] = None
    total_throughput: Optional[float] = None
    mean_delay: Optional[float] = None
    mean_access_delay: Optional[float] = None
    plr: Optional[float] = None
    mean_queue_length: Optional[float] = None
    p_idle: Optional[float] = None


ROW_COLUMNS: tuple[str, ...] = tuple(MetricRow.model_fields)


class ComparisonRow(BaseModel):
    scenario: str
    ac: str
    metric: str
    analytic: float
    simulated: float
    half_width: Optional[float] = None      # 只有一个种子时为空
    rel_error: Optional[float] = None       # 解析值为 0 时为空
    runs: int


COMPARISON_COLUMNS: tuple[str, ...] = tuple(ComparisonRow.model_fields)


class TraceDocumentRow(BaseModel):
    iteration: int
    ac: int
    tau: float
    p_c: float
    residual: float


TRACE_COLUMNS: tuple[str, ...] = tuple(TraceDocumentRow.model_fields)


def metric_rows(metrics: Metrics, flows: tuple[int, ...], **extra) -> list[MetricRow]:
    """解析结果 → 每个活跃 AC 一行"""
    status = extra.pop("status", "ok" if metrics.converged else "not_converged")
    rows = []
    for ac in metrics.per_ac:
        if not ac.active:
            continue
        rows.append(MetricRow(
            scenario=metrics.scenario,
            source="analytic",
            status=status,
            ac=ac.name,
            flows=flows[ac.index],
            tau=ac.tau,
            p_c=ac.p_c,
            throughput=ac.throughput,
            throughput_bps=ac.throughput_bps,
            total_throughput=metrics.total_throughput,
            mean_delay=ac.mean_delay,
            mean_access_delay=ac.mean_access_delay,
            plr=ac.plr,
            mean_queue_length=ac.mean_queue_length,
            p_idle=metrics.p_idle,
            **extra,
        ))
    return rows


def trace_rows(trace) -> list[TraceDocumentRow]:
    """求解器迭代轨迹 → 每次迭代、每个 AC 一行"""
    return [
        TraceDocumentRow(iteration=row.iteration, ac=i, tau=tau, p_c=p_c, residual=row.residual)
        for row in trace
        for i, (tau, p_c) in enumerate(zip(row.taus, row.p_cs))
    ]


def sim_rows(stats: SimStats, **extra) -> list[MetricRow]:
    """仿真结果 → 与解析结果同列的行；τ 无法直接观测，留空"""
    total = sum(stats.throughput(i) for i in range(len(stats.per_ac)))
    rows = []
    for i, ac in enumerate(stats.per_ac):
        if ac.stations == 0:
            continue
        values = sim_metrics(stats, i)
        rows.append(MetricRow(
            scenario=stats.scenario,
            source="sim",
            seed=stats.seed,
            status="ok" if stats.conserved else "conservation_failed",
            ac=ac.name,
            flows=ac.stations,
            p_c=values["p_c"],
            throughput=values["throughput"],
            throughput_bps=values["throughput_bps"],
            total_throughput=total,
            mean_delay=values["mean_delay"],
            plr=values["plr"],
            mean_queue_length=values["mean_queue_length"],
            p_idle=values["p_idle"],
            **extra,
        ))
    return rows
