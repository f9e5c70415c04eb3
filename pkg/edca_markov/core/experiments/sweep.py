"""
参数扫描：沿一个轴逐点求解，每个点独立计算，单点失败只记录在 status 列中
"""
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Sequence

from edca_markov.core.exceptions import EdcaModelError, SweepError
from edca_markov.core.logger import logger
from edca_markov.core.metrics.report import compute_metrics
from edca_markov.core.model_config.types import Scenario
from edca_markov.core.schemas.documents import ROW_COLUMNS, MetricRow, metric_rows
from edca_markov.core.solver.fixed_point import solve
from edca_markov.core.solver.types import SolveOptions
from edca_markov.core.experiments.workers import ordered_map


class SweepAxis(str, Enum):
    OFFERED_LOAD_PER_AC = "offered_load_per_ac"   # bit/s，每个流
    STATIONS_PER_AC = "stations_per_ac"
    STATIONS_TOTAL = "stations_total"


@dataclass(frozen=True)
class SweepSpec:
    axis: SweepAxis
    values: tuple[float, ...]
    columns: Optional[tuple[str, ...]] = None     # None 表示输出全部列

    def __post_init__(self):
        if not self.values:
            raise SweepError("sweep values must not be empty")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise SweepError(f"sweep values must be strictly increasing, got {list(self.values)}")
        if self.axis != SweepAxis.OFFERED_LOAD_PER_AC:
            if any(v != int(v) or v < 1 for v in self.values):
                raise SweepError(f"axis '{self.axis.value}' needs positive integer values")
        elif any(v < 0 for v in self.values):
            raise SweepError("offered load values must be >= 0")
        if self.columns is not None:
            unknown = [c for c in self.columns if c not in ROW_COLUMNS]
            if unknown:
                raise SweepError(f"unknown output columns: {unknown}")

    @classmethod
    def parse(cls, axis: str, values: Sequence[float], columns: Optional[Sequence[str]] = None) -> "SweepSpec":
        try:
            parsed_axis = SweepAxis(axis)
        except ValueError:
            raise SweepError(f"unknown sweep axis '{axis}'") from None
        return cls(axis=parsed_axis, values=tuple(float(v) for v in values),
                   columns=tuple(columns) if columns else None)


def _split_stations(scenario: Scenario, total: int) -> Scenario:
    """总站点数平均分配给活跃 AC，余数依次分给低优先级 AC"""
    active = scenario.active_indices
    base, extra = divmod(total, len(active))
    acs = list(scenario.acs)
    for rank, i in enumerate(active):
        acs[i] = replace(acs[i], flows=base + (1 if rank < extra else 0))
    return replace(scenario, acs=tuple(acs))


def apply_point(scenario: Scenario, axis: SweepAxis, value: float) -> Scenario:
    """
    把扫描值代入场景

    负载轴保持各 AC 之间的负载比例：负载最大的 AC 取 value，其余按比例缩放；
    所有 AC 负载都为 0 时统一设为 value。
    """
    if axis == SweepAxis.OFFERED_LOAD_PER_AC:
        loads = [ac.offered_load_bps for ac in scenario.acs if ac.active]
        peak = max(loads)
        if peak <= 0:
            return scenario.with_load(value)
        return scenario.scale_load(value / peak)
    if axis == SweepAxis.STATIONS_PER_AC:
        return scenario.with_flows(int(value))
    total = int(value)
    if total < len(scenario.active_indices):
        raise SweepError(f"{total} stations cannot cover {len(scenario.active_indices)} active ACs")
    return _split_stations(scenario, total)


@dataclass(frozen=True)
class _Point:
    scenario: Scenario
    axis: SweepAxis
    value: float
    opts: SolveOptions


def _solve_point(point: _Point) -> list[MetricRow]:
    extra = {"axis": point.axis.value, "value": point.value}
    try:
        scenario = apply_point(point.scenario, point.axis, point.value)
        solved = solve(scenario, point.opts)
        metrics = compute_metrics(solved)
    except EdcaModelError as e:
        logger.warning(f"扫描点 {point.axis.value}={point.value} 失败: {e}")
        return [MetricRow(scenario=point.scenario.name, source="analytic", status=f"error: {e}",
                          ac="", flows=0, **extra)]
    return metric_rows(metrics, tuple(ac.flows for ac in scenario.acs), **extra)


def run_sweep(scenario: Scenario, spec: SweepSpec, opts: SolveOptions = SolveOptions(),
              workers: Optional[int] = None) -> list[MetricRow]:
    """按扫描值顺序返回所有行；不收敛的点 status 为 not_converged"""
    # 迭代轨迹不参与扫描输出，也不必跨进程传回
    opts = replace(opts, keep_trace=False)
    points = [_Point(scenario, spec.axis, v, opts) for v in spec.values]
    logger.info(f"参数扫描: {spec.axis.value}，共 {len(points)} 个点")
    rows = [row for chunk in ordered_map(_solve_point, points, workers) for row in chunk]
    failed = sum(1 for row in rows if row.status != "ok")
    if failed:
        logger.warning(f"{failed} 行未正常收敛，详见 status 列")
    return rows
