import os
import sys
from pathlib import Path

from edca_markov.utils.runtime_path import scenarios_path, user_data_path
from edca_markov.utils.load_env import load_env

# 加载环境变量：当前目录的 .env 优先，其次是用户数据目录
if os.path.exists(".env"):
    load_env()
else:
    try:
        load_env(user_data_path / ".env")
    except Exception as e:
        print(f"警告：加载环境变量失败，将使用默认: {e}", file=sys.stderr)

from edca_markov.core.dtmc.measures import dump_triplets
from edca_markov.core.exceptions import ConfigError, EdcaModelError
from edca_markov.core.experiments.compare import compare, simulate_seeds
from edca_markov.core.experiments.sweep import SweepSpec, run_sweep
from edca_markov.core.logger import logger
from edca_markov.core.metrics.report import compute_metrics
from edca_markov.core.model_config.loader import load_scenario
from edca_markov.core.model_config.types import Scenario
from edca_markov.core.schemas.documents import (
    COMPARISON_COLUMNS, ROW_COLUMNS, TRACE_COLUMNS, MetricsDocument, metric_rows, sim_rows, trace_rows,
)
from edca_markov.core.solver.fixed_point import chain_matrix, solve
from edca_markov.core.solver.types import SolveOptions
from edca_markov.utils.cli_parser import get_parser
from edca_markov.utils.export import write_csv, write_json

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NOT_CONVERGED = 2


def resolve_scenario(config: str) -> Scenario:
    """文件路径优先，否则按内置场景名查找"""
    path = Path(config)
    if path.is_file():
        return load_scenario(path)
    shipped = scenarios_path / f"{config}.yaml"
    if shipped.is_file():
        return load_scenario(shipped)
    raise ConfigError(f"scenario '{config}' is neither a file nor a shipped scenario")


def _solve_options(args) -> SolveOptions:
    return SolveOptions(damping=args.damping, tol=args.tol, max_iters=args.max_iters)


def _seeds(args) -> list[int]:
    if args.seeds < 1:
        raise ConfigError(f"--seeds must be >= 1, got {args.seeds}")
    return list(range(args.seed_base, args.seed_base + args.seeds))


def handle_solve(args) -> int:
    scenario = resolve_scenario(args.config)
    logger.start_loading_animation(message=f"正在求解 '{scenario.name}'")
    try:
        solved = solve(scenario, _solve_options(args))
        metrics = compute_metrics(solved)
    except Exception:
        logger.stop_loading_animation(success=False, final_message="求解失败")
        raise
    logger.stop_loading_animation(success=True, final_message="求解完成")

    if args.format == "json":
        write_json(MetricsDocument.from_metrics(metrics), args.out)
    else:
        write_csv(metric_rows(metrics, tuple(ac.flows for ac in scenario.acs)), ROW_COLUMNS, args.out)
    if args.trace:
        write_csv(trace_rows(solved.trace), TRACE_COLUMNS, args.trace)
        logger.info(f"迭代轨迹已写入 {args.trace}")
    if args.dump_matrix:
        directory = Path(args.dump_matrix)
        directory.mkdir(parents=True, exist_ok=True)
        for i in scenario.active_indices:
            space, matrix = chain_matrix(solved, i)
            dump_triplets(space, matrix, directory / f"ac{i}.txt")
        logger.info(f"转移矩阵已导出到 {directory}")
    return EXIT_OK if solved.converged else EXIT_NOT_CONVERGED


def handle_sweep(args) -> int:
    scenario = resolve_scenario(args.config)
    spec = SweepSpec.parse(args.axis, args.values, args.columns)
    rows = run_sweep(scenario, spec, _solve_options(args), workers=args.workers)
    if args.format == "json":
        write_json(rows, args.out)
    else:
        write_csv(rows, spec.columns or ROW_COLUMNS, args.out)
    return EXIT_OK


def handle_compare(args) -> int:
    scenario = resolve_scenario(args.config)
    metrics, rows = compare(scenario, _seeds(args), args.duration, _solve_options(args), workers=args.workers)
    if args.format == "json":
        write_json(rows, args.out)
    else:
        write_csv(rows, COMPARISON_COLUMNS, args.out)
    return EXIT_OK if metrics.converged else EXIT_NOT_CONVERGED


def handle_sim(args) -> int:
    scenario = resolve_scenario(args.config)
    trace = Path(args.trace_events) if args.trace_events else None
    runs = simulate_seeds(scenario, _seeds(args), args.duration, workers=args.workers, trace_path=trace)
    rows = [row for stats in runs for row in sim_rows(stats)]
    if args.format == "json":
        write_json(rows, args.out)
    else:
        write_csv(rows, ROW_COLUMNS, args.out)
    return EXIT_OK


HANDLERS = {
    "solve": handle_solve,
    "sweep": handle_sweep,
    "compare": handle_compare,
    "sim": handle_sim,
}


def run_cli_command(argv=None) -> int:
    """解析参数并执行子命令，返回进程退出码"""
    args = get_parser().parse_args(argv)
    if args.log_level:
        logger.set_level(args.log_level)
    try:
        return HANDLERS[args.command](args)
    except EdcaModelError as e:
        logger.error(str(e))
        return EXIT_CONFIG


def main():
    """主入口函数"""
    sys.exit(run_cli_command())


if __name__ == "__main__":
    main()
