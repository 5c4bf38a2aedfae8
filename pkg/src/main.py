import argparse
import logging
import sys
from typing import Any, Dict, List, Optional

from algorithms.oracle import DEFAULT_GRID_STEP, run_oracle_checks
from common.config import load_experiment_config, parse_experiment_config
from common.errors import ConfigError
from common.experiment import run_experiment
from common.export_data import format_report, summarize, write_records, write_summary
from common.typings import Algorithm, ExperimentConfig

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG_ERROR = 1
EXIT_ALL_FAILED = 2

# used by `simulate` when no --config is given
DEFAULT_SIMULATION: Dict[str, Any] = {
    "n_tx": 3,
    "n_rx": 5,
    "n_samples": 500,
    "snr_db": 30.0,
    "constellation_order": 16,
    "algorithms": [algorithm.value for algorithm in Algorithm],
    "n_trials": 1,
    "base_seed": 0,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="main.py",
        description="Blind separation of square-QAM sources with Givens and hyperbolic "
                    "rotation sweeps (G-MMA, HG-MMA, G-AMA, HG-AMA).")
    parser.add_argument("--log-level", default="WARNING",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    commands = parser.add_subparsers(dest="command", required=True)

    def add_overrides(sub: argparse.ArgumentParser, config_required: bool) -> None:
        sub.add_argument("--config", required=config_required,
                         help="JSON experiment configuration (see data/)")
        sub.add_argument("--seed", type=int, help="override base_seed")
        sub.add_argument("--out", help="override output_path (per-trial CSV)")
        sub.add_argument("--trials", type=int, help="override n_trials")
        sub.add_argument("--algo", help="comma separated algorithm names, e.g. g_mma,hg_ama")
        sub.add_argument("--threads", type=int, help="override n_threads")

    simulate = commands.add_parser("simulate", help="run one configuration and print a report")
    add_overrides(simulate, config_required=False)

    sweep = commands.add_parser("sweep", help="run a full experiment from a config file")
    add_overrides(sweep, config_required=True)

    oracle = commands.add_parser("oracle-check", help="compare the solvers with grid search")
    oracle.add_argument("--seed", type=int, default=0)
    oracle.add_argument("--trials", type=int, default=20, help="random blocks per check")
    oracle.add_argument("--grid-step", type=float, default=DEFAULT_GRID_STEP)
    return parser


def collect_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    overrides: Dict[str, Any] = {
        "base_seed": args.seed,
        "output_path": args.out,
        "n_trials": args.trials,
        "n_threads": args.threads,
    }
    if args.algo:
        overrides["algorithms"] = [name.strip() for name in args.algo.split(",") if name.strip()]
    return {key: value for key, value in overrides.items() if value is not None}


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    overrides = collect_overrides(args)
    if args.config:
        return load_experiment_config(args.config, overrides)
    return parse_experiment_config({**DEFAULT_SIMULATION, **overrides})


def run_simulate(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    records = run_experiment(cfg)
    if args.out:
        write_records(records, cfg.output_path, cfg.record_timing)
    summary = summarize(records, cfg)
    print(format_report(summary))
    return EXIT_OK if summary["available"].any() else EXIT_ALL_FAILED


def run_sweep(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    records = run_experiment(cfg)
    write_records(records, cfg.output_path, cfg.record_timing)
    summary = summarize(records, cfg)
    if cfg.summary_path:
        write_summary(summary, cfg.summary_path)
    print(format_report(summary))
    return EXIT_OK if summary["available"].any() else EXIT_ALL_FAILED


def run_oracle_check(args: argparse.Namespace) -> int:
    checks = run_oracle_checks(n_blocks=args.trials, seed=args.seed, grid_step=args.grid_step)
    for check in checks:
        status = "ok" if check.passed else "FAIL"
        print(f"{check.name:<15} worst excess {check.worst_excess:+.3e} "
              f"(tol {check.tolerance:.0e}, {check.n_cases} cases) {status}")
    return EXIT_OK if all(check.passed for check in checks) else EXIT_ALL_FAILED


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    handlers = {
        "simulate": run_simulate,
        "sweep": run_sweep,
        "oracle-check": run_oracle_check,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as e:
        logger.error("%s", e)
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG_ERROR


if __name__ == "__main__":
    sys.exit(main())
