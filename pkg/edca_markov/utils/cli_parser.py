import argparse


def _add_common(sub: argparse.ArgumentParser, default_format: str):
    sub.add_argument(
        "--config", "-c",
        default="reference",
        help="场景 YAML 文件路径，或内置场景名（如 reference, reference_txop）"
    )
    sub.add_argument(
        "--out", "-o",
        default=None,
        help="输出文件，缺省写到标准输出"
    )
    sub.add_argument(
        "--format", "-f",
        choices=["csv", "json"],
        default=default_format,
        help="输出格式"
    )
    sub.add_argument(
        "--workers",
        type=int,
        default=None,
        help="并行进程数，缺省读取环境变量 EDCA_WORKERS"
    )


def _add_solver_options(sub: argparse.ArgumentParser):
    sub.add_argument("--tol", type=float, default=1e-8, help="不动点收敛阈值")
    sub.add_argument("--max-iters", type=int, default=500, help="最大迭代次数")
    sub.add_argument("--damping", type=float, default=0.5, help="阻尼系数 θ")


def _add_sim_options(sub: argparse.ArgumentParser, default_seeds: int):
    sub.add_argument("--seeds", type=int, default=default_seeds, help="独立种子个数")
    sub.add_argument("--seed-base", type=int, default=1, help="第一个种子，之后依次加 1")
    sub.add_argument("--duration", type=float, default=30.0, help="每次仿真的时长（秒）")


def get_parser():
    parser = argparse.ArgumentParser(description="EDCA analytic model and simulator")
    parser.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        default=None,
        help="覆盖环境变量 LOG_LEVEL"
    )
    subparsers = parser.add_subparsers(dest="command", help="Available commands", required=True)

    # solve 子命令：单次解析求解
    solve_parser = subparsers.add_parser("solve", help="Solve the analytic model for one scenario")
    _add_common(solve_parser, default_format="json")
    _add_solver_options(solve_parser)
    solve_parser.add_argument(
        "--trace",
        default=None,
        help="把不动点迭代轨迹写成 CSV"
    )
    solve_parser.add_argument(
        "--dump-matrix",
        default=None,
        help="把每个 AC 的转移矩阵三元组写到该目录"
    )

    # sweep 子命令：参数扫描
    sweep_parser = subparsers.add_parser("sweep", help="Sweep one parameter and emit a CSV table")
    _add_common(sweep_parser, default_format="csv")
    _add_solver_options(sweep_parser)
    sweep_parser.add_argument(
        "--axis",
        choices=["offered_load_per_ac", "stations_per_ac", "stations_total"],
        required=True,
        help="扫描轴"
    )
    sweep_parser.add_argument(
        "--values",
        nargs="*",
        type=float,
        default=[],
        help="扫描值（严格递增）；负载以 bit/s 为单位"
    )
    sweep_parser.add_argument(
        "--columns",
        nargs="+",
        default=None,
        help="只输出这些列"
    )

    # compare 子命令：解析 vs 仿真
    compare_parser = subparsers.add_parser("compare", help="Compare analytic results with simulation")
    _add_common(compare_parser, default_format="csv")
    _add_solver_options(compare_parser)
    _add_sim_options(compare_parser, default_seeds=10)

    # sim 子命令：只运行仿真
    sim_parser = subparsers.add_parser("sim", help="Run the discrete-event simulator")
    _add_common(sim_parser, default_format="csv")
    _add_sim_options(sim_parser, default_seeds=1)
    sim_parser.add_argument(
        "--trace-events",
        default=None,
        help="逐事件追踪文件；多个种子时文件名中插入种子编号"
    )

    return parser
