#!/usr/bin/env python3
"""
Command-line entry point.

    uq basis eval --nodes nodes.txt --query 0.3 [--beta 0]
    uq run example1 --n-basis 8 --n-samples 500 --basis both --out results
    uq run example2 [--oracle]
    uq run sine
    uq sweep basis --list 2,3,4,5,6,7,8,9
    uq sweep samples --list 50,100,200,400 --repeats 100 --seed 7
    uq config show
"""

import argparse
import json
import logging
import sys
from typing import Dict, List, Optional, Any

from models import ExperimentId, UQError, InvalidInputError
from system_config import config, print_current_config, print_preset_examples
from maxent_basis import load_nodes, eval_basis, in_hull
from experiments import load_experiment_config, run_experiment

logger = logging.getLogger("uq")

def _int_list(text: str) -> List[int]:
    try:
        return [int(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'")

def _float_list(text: str) -> List[float]:
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'")

def _add_common_options(parser: argparse.ArgumentParser):
    parser.add_argument("--config", dest="config_file", help="JSON experiment config; flags override its values")
    parser.add_argument("--basis", choices=["maxent", "apc", "both"], help="basis family (default both)")
    parser.add_argument("--n-basis", type=int, help="number of basis functions n_B")
    parser.add_argument("--n-samples", type=int, help="number of samples n_D")
    parser.add_argument("--beta", type=float, help="Gaussian prior locality β (maxent only)")
    parser.add_argument("--t-final", type=float, help="end of the integration window")
    parser.add_argument("--step", type=float, help="RK4 step h")
    parser.add_argument("--seed", type=int, help=f"root RNG seed (default {config.default_seed})")
    parser.add_argument("--out", dest="output_dir", default=config.output_dir, help=f"output directory (default {config.output_dir})")

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="uq", description="Maximum-entropy and arbitrary polynomial chaos surrogates for stochastic ODEs")
    parser.add_argument("--log-level", default=config.log_level, help="logging level (default from UQ_LOG_LEVEL)")
    commands = parser.add_subparsers(dest="command", required=True)

    # basis eval
    basis = commands.add_parser("basis", help="evaluate maxent basis functions")
    basis_commands = basis.add_subparsers(dest="action", required=True)
    evaluate = basis_commands.add_parser("eval", help="ψ(x) for one query point")
    evaluate.add_argument("--nodes", required=True, help="node file, one point per line")
    evaluate.add_argument("--query", required=True, type=_float_list, help="query coordinates, comma separated")
    evaluate.add_argument("--beta", type=float, default=0.0, help="Gaussian prior locality β")

    # run
    run = commands.add_parser("run", help="run one study")
    run.add_argument("experiment", choices=[ExperimentId.EXAMPLE1.value, ExperimentId.EXAMPLE2.value, ExperimentId.SINE.value])
    _add_common_options(run)
    run.add_argument("--n-sparse", type=int, help="number of labeled points (example2; must equal n_B)")
    run.add_argument("--n-mc", dest="n_monte_carlo", type=int, help="Monte Carlo reference draws")
    run.add_argument("--oracle", action="store_true", default=None, help="example2: propagate the true coefficient")
    run.add_argument("--constant-coefficient", type=float, help="example1: replace a(Δ) by a constant")

    # sweeps
    sweep = commands.add_parser("sweep", help="convergence and sample-size sweeps")
    sweep_commands = sweep.add_subparsers(dest="sweep", required=True)
    over_basis = sweep_commands.add_parser("basis", help="error at the study time against n_B")
    over_basis.add_argument("--list", dest="basis_list", type=_int_list, help="basis counts, e.g. 2,3,4,5")
    _add_common_options(over_basis)
    over_samples = sweep_commands.add_parser("samples", help="error statistics against n_D over seeded repeats")
    over_samples.add_argument("--list", dest="sample_list", type=_int_list, help="sample counts, e.g. 50,100,200,400")
    over_samples.add_argument("--repeats", type=int, help=f"repeats per sample count (default {config.sample_study_repeats})")
    _add_common_options(over_samples)

    # config
    config_parser = commands.add_parser("config", help="show solver and harness settings")
    config_commands = config_parser.add_subparsers(dest="action", required=True)
    show = config_commands.add_parser("show", help="print the active configuration")
    show.add_argument("--presets", action="store_true", help="also print .env preset examples")

    return parser

def _overrides(args: argparse.Namespace, experiment: ExperimentId) -> Dict[str, Any]:
    keys = [
        "basis", "n_basis", "n_samples", "n_sparse", "beta", "t_final", "step", "seed",
        "n_monte_carlo", "oracle", "constant_coefficient", "basis_list", "sample_list",
        "repeats", "output_dir"
    ]
    overrides = {key: getattr(args, key, None) for key in keys}
    overrides["experiment"] = experiment.value
    return overrides

def cmd_basis_eval(args: argparse.Namespace) -> int:
    nodes = load_nodes(args.nodes)
    if not in_hull(nodes, args.query):
        raise InvalidInputError(f"query {args.query} lies outside the convex hull of {nodes.count} nodes")
    result = eval_basis(nodes, args.query, beta=args.beta)
    print(json.dumps(result.to_dict(), indent=2, default=float))
    return 0

def cmd_run(args: argparse.Namespace, experiment: ExperimentId) -> int:
    cfg = load_experiment_config(args.config_file, **_overrides(args, experiment))
    run_experiment(cfg)
    print(f"✅ {experiment.value} finished; results in {cfg.output_dir}/{experiment.value}")
    return 0

def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )

    try:
        if args.command == "basis":
            return cmd_basis_eval(args)
        if args.command == "run":
            return cmd_run(args, ExperimentId(args.experiment))
        if args.command == "sweep":
            experiment = ExperimentId.CONVERGENCE if args.sweep == "basis" else ExperimentId.SAMPLE_STUDY
            return cmd_run(args, experiment)
        if args.command == "config":
            print_current_config()
            if args.presets:
                print_preset_examples()
            return 0
    except UQError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"❌ {e}", file=sys.stderr)
        return 1

    parser.print_help()
    return 2

if __name__ == "__main__":
    sys.exit(main())
