# src/experiments/cli.py
"""
Command-line entry point.

    python -m src.experiments.cli run configs/semigroup_convergence.cfg [more.cfg ...]
    python -m src.experiments.cli ebm configs/ebm.cfg
    python -m src.experiments.cli matrix
    python -m src.experiments.cli report reports/

Global flags: --seed, --out, --tol-scale, --threads. The exit status is
nonzero iff at least one report row failed or errored; configuration
problems exit with status 2.
"""

import argparse
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.accretive.banach import running_sup

from .config import ConfigError, ExperimentConfig, load_config, load_ebm_config, resolve_out_dir, resolve_seed
from .ebm import run_ebm
from .report_writer import ReportWriter, aggregate_reports, configure_logging
from .scenarios import ExperimentOutcome, run_experiment

logger = logging.getLogger(__name__)

CONFIG_ERROR_STATUS = 2


def _parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="Random seed (a config key wins)")
    common.add_argument("--out", default=None, help="Report directory (a config key wins)")
    common.add_argument("--tol-scale", dest="tol_scale", type=float, default=1.0,
                        help="Multiplier applied to every acceptance limit")
    common.add_argument("--threads", type=int, default=1, help="Worker threads")

    parser = argparse.ArgumentParser(prog="python -m src.experiments.cli",
                                     description="Accretive evolution experiments")
    commands = parser.add_subparsers(dest="command", required=True)
    run = commands.add_parser("run", parents=[common], help="Run experiment configs")
    run.add_argument("configs", nargs="+", help="Config files")
    ebm = commands.add_parser("ebm", parents=[common], help="Run the energy balance model")
    ebm.add_argument("config", help="EBM config file")
    commands.add_parser("matrix", parents=[common], help="Print the criterion classification table")
    report = commands.add_parser("report", parents=[common], help="Aggregate a report directory")
    report.add_argument("directory", help="Directory holding the scenario CSV files")
    return parser.parse_args(argv)


def _run_one(config: ExperimentConfig, args: argparse.Namespace) -> Tuple[ExperimentConfig, ExperimentOutcome]:
    seed = resolve_seed(config.seed, args.seed)
    return config, run_experiment(config, args.tol_scale, args.threads, seed)


def _write(config: ExperimentConfig, outcome: ExperimentOutcome, args: argparse.Namespace) -> None:
    writer = ReportWriter(resolve_out_dir(config.output.dir, args.out))
    parameters = {"config": config.model_dump(mode="json"), "metadata": outcome.metadata,
                  "seed": resolve_seed(config.seed, args.seed), "tol_scale": args.tol_scale}
    writer.write(config.scenario, outcome.rows, parameters)


def command_run(args: argparse.Namespace) -> int:
    try:
        configs = [load_config(path) for path in args.configs]
    except (ConfigError, OSError) as exc:
        print(f"[ERROR] {exc}", file=sys.stderr)
        return CONFIG_ERROR_STATUS
    configure_logging(resolve_out_dir(configs[0].output.dir, args.out))

    if args.threads > 1 and len(configs) > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            results = list(pool.map(lambda c: _run_one(c, args), configs))
    else:
        results = [_run_one(config, args) for config in configs]

    status = 0
    for config, outcome in results:
        _write(config, outcome, args)
        failed = sum(row.failed for row in outcome.rows)
        print(f"{config.scenario}: {len(outcome.rows) - failed}/{len(outcome.rows)} rows passed")
        status = max(status, outcome.exit_status)
    return status


def command_ebm(args: argparse.Namespace) -> int:
    try:
        config = load_ebm_config(args.config)
    except (ConfigError, OSError) as exc:
        print(f"[ERROR] {exc}", file=sys.stderr)
        return CONFIG_ERROR_STATUS
    out_dir = resolve_out_dir(config.output.dir, args.out)
    configure_logging(out_dir)
    result = run_ebm(config.ebm, args.tol_scale)
    writer = ReportWriter(out_dir)
    writer.write("picard_ebm", result.rows, {"ebm": config.ebm.model_dump(mode="json"), "metadata": result.metadata,
                                             "seed": resolve_seed(config.seed, args.seed)})

    u = result.trajectory
    nodes = np.linspace(-1.0, 1.0, u.dim)
    writer.write_table("ebm_profile", ["x", "u0", "u_T"],
                       [[x, a, b] for x, a, b in zip(nodes, u.values[0], u.values[-1])])
    writer.write_table("ebm_majorant", ["t", "majorant", "running_sup"],
                       [[t, U, r] for t, U, r in zip(u.grid.nodes, result.majorant.values, running_sup(u))])
    failed = sum(row.failed for row in result.rows)
    print(f"picard_ebm: {len(result.rows) - failed}/{len(result.rows)} rows passed, "
          f"{result.diagnostics.iterations} Picard updates")
    return 1 if failed else 0


def command_matrix(args: argparse.Namespace) -> int:
    config = ExperimentConfig(scenario="criterion_matrix")
    configure_logging(resolve_out_dir(None, args.out))
    _, outcome = _run_one(config, args)
    _write(config, outcome, args)

    print(f"{'kernel':<12} {'osgood':<13} {'nagumo':<7} {'dini':<7} {'subadditive':<11}")
    for name, cells in outcome.metadata.get("matrix", {}).items():
        print(f"{name:<12} {cells['osgood']:<13} {str(cells['nagumo']):<7} {str(cells['dini']):<7} "
              f"{str(cells['subadditive']):<11}")
    return outcome.exit_status


def command_report(args: argparse.Namespace) -> int:
    totals = aggregate_reports(args.directory)
    if not totals:
        print(f"[ERROR] no scenario reports in {args.directory}", file=sys.stderr)
        return CONFIG_ERROR_STATUS
    status = 0
    for scenario, counts in totals.items():
        print(f"{scenario}: pass={counts['pass']} fail={counts['fail']} errored={counts['errored']}")
        if counts["fail"] or counts["errored"]:
            status = 1
    return status


COMMANDS = {"run": command_run, "ebm": command_ebm, "matrix": command_matrix, "report": command_report}


def main(argv: Optional[List[str]] = None) -> int:
    args = _parse_args(argv)
    return COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
