"""
Main Application - d-CDP Benchmark Toolkit
Discrete conjugate dynamic programming next to discrete DP

Subcommands:
1. run        - value iterations, seeded rollouts and the benchmark report
2. transform  - factorized LLT of a GridFn file onto a uniform dual grid
3. rollout    - value iteration at one grid size and a single trajectory
4. scaling    - log-log slope of backward time against grid cardinality
"""
import sys
import os
import argparse
import logging
from typing import List, Optional

import numpy as np

# Add src to path for imports
src_path = os.path.join(os.path.dirname(__file__), 'src')
sys.path.insert(0, src_path)

from settings import RUNTIME_SETTINGS
from bench import BENCH_ALGORITHMS, ConfigError, ExperimentConfig, get_problem, run, scaling_study, single_rollout
from conjugate import llt_nd
from grid import load_gridfn, make_uniform_grid, save_gridfn

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(levelname)s - %(message)s',
    handlers=[
        logging.FileHandler(RUNTIME_SETTINGS['log_file']),
        logging.StreamHandler()
    ]
)
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG_ERROR = 2


def parse_int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(',') if v.strip()]
    except ValueError as e:
        raise ConfigError(f"Expected a comma-separated list of integers, got '{text}'") from e


def parse_float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(',') if v.strip()]
    except ValueError as e:
        raise ConfigError(f"Expected a comma-separated list of numbers, got '{text}'") from e


def parse_algorithms(text: str) -> List[str]:
    return [a.strip() for a in text.split(',') if a.strip()]


def _add_experiment_arguments(parser: argparse.ArgumentParser):
    parser.add_argument('--config', '-c', default='config.json',
                        help='Experiment configuration file (default: config.json)')
    parser.add_argument('--preset', '-p', help='Named problem preset')
    parser.add_argument('--problem', help='Custom problem JSON file (overrides --preset)')
    parser.add_argument('--horizon', type=int, help='Horizon override')
    parser.add_argument('--alpha', type=float, help='Dual grid Y scaling factor')
    parser.add_argument('--seed', type=int, help='Seed for initial states and disturbances')
    parser.add_argument('--numeric-conj', action='store_true',
                        help='Conjugate the input cost numerically on a V grid')
    parser.add_argument('--log-level', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'],
                        help='Logging level (default: from config)')


def setup_argument_parser():
    """Setup command line argument parser"""
    parser = argparse.ArgumentParser(
        description="d-CDP Benchmark Toolkit",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python main.py run --preset synthetic_separable --alg ddp,cdp2 --n 11,21 --reference-n 41
  python main.py run --config config.json --out results/sir
  python main.py transform J.csv --dual-lo -3,-3 --dual-hi 3,3 --dual-n 41,41 --out J_conj.csv
  python main.py rollout --preset pendulum --alg cdp2 --n 21 --x0 0.3,0.0
  python main.py scaling --preset synthetic_separable --alg cdp2 --n 11,21,41,81
        """
    )
    sub = parser.add_subparsers(dest='command', required=True)

    run_parser = sub.add_parser('run', help='Run the benchmark and write the report')
    _add_experiment_arguments(run_parser)
    run_parser.add_argument('--alg', help=f"Comma-separated algorithms from {','.join(BENCH_ALGORITHMS)}")
    run_parser.add_argument('--n', help='Comma-separated grid sizes per dimension')
    run_parser.add_argument('--x0-count', type=int, help='Number of random initial states')
    run_parser.add_argument('--out', help='Output directory')
    run_parser.add_argument('--reference-n', type=int, help='Reference d-DP grid size per dimension')
    run_parser.add_argument('--workers', type=int, help='Concurrent (algorithm, N) cells')

    transform_parser = sub.add_parser('transform', help='Discrete conjugate of a GridFn file')
    transform_parser.add_argument('input', help='GridFn file (.csv or .json)')
    transform_parser.add_argument('--dual-lo', required=True, help='Comma-separated dual grid lower corner')
    transform_parser.add_argument('--dual-hi', required=True, help='Comma-separated dual grid upper corner')
    transform_parser.add_argument('--dual-n', required=True, help='Comma-separated dual grid sizes')
    transform_parser.add_argument('--out', required=True, help='Output GridFn file (.csv or .json)')
    transform_parser.add_argument('--log-level', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'])

    rollout_parser = sub.add_parser('rollout', help='Single trajectory from one initial state')
    _add_experiment_arguments(rollout_parser)
    rollout_parser.add_argument('--alg', default='cdp2', choices=BENCH_ALGORITHMS)
    rollout_parser.add_argument('--n', type=int, default=21, help='Grid size per dimension')
    rollout_parser.add_argument('--x0', required=True, help='Comma-separated initial state')
    rollout_parser.add_argument('--out', help='Trajectory CSV file')

    scaling_parser = sub.add_parser('scaling', help='Runtime scaling study')
    _add_experiment_arguments(scaling_parser)
    scaling_parser.add_argument('--alg', default='cdp2', choices=('ddp', 'cdp1', 'cdp2'))
    scaling_parser.add_argument('--n', default='11,21,41,81', help='Comma-separated grid sizes (at least 4)')
    scaling_parser.add_argument('--repeats', type=int, default=1, help='Timing repeats per size (best is kept)')
    scaling_parser.add_argument('--out', help='Directory for scaling.csv')

    return parser


def build_config(args: argparse.Namespace) -> ExperimentConfig:
    """Load the config file and apply command line overrides"""
    config = ExperimentConfig.load_from_file(args.config)

    if args.problem:
        config.problem_file = args.problem
        config.preset = None
    elif args.preset:
        config.preset = args.preset
        config.problem_file = None
    if args.horizon is not None:
        config.horizon = args.horizon
    if args.alpha is not None:
        config.alpha = args.alpha
    if args.seed is not None:
        config.seed = args.seed
    if args.numeric_conj:
        config.numeric_conjugate = True
    if args.log_level:
        config.log_level = args.log_level

    if args.command == 'run':
        if args.alg:
            config.algorithms = parse_algorithms(args.alg)
        if args.n:
            config.grid_sizes = parse_int_list(args.n)
        if args.x0_count is not None:
            config.x0_count = args.x0_count
        if args.out:
            config.output_dir = args.out
        if args.reference_n is not None:
            config.reference_n = args.reference_n
        if args.workers is not None:
            config.workers = args.workers

    return config.validate()


def cmd_run(args) -> int:
    config = build_config(args)
    logging.getLogger().setLevel(getattr(logging, config.log_level.upper()))
    report = run(config)
    print(f"\n📊 Benchmark summary ({report.problem}, reference N={report.reference_n})")
    print(report.to_frame().to_string(index=False))
    print(f"\n💾 Results written to {config.output_dir}")
    return EXIT_OK


def cmd_transform(args) -> int:
    if args.log_level:
        logging.getLogger().setLevel(getattr(logging, args.log_level))
    f = load_gridfn(args.input)
    lo, hi, counts = parse_float_list(args.dual_lo), parse_float_list(args.dual_hi), parse_int_list(args.dual_n)
    if not (len(lo) == len(hi) == len(counts) == f.grid.dims):
        raise ConfigError(f"Dual grid needs {f.grid.dims} entries for --dual-lo, --dual-hi and --dual-n")
    conj = llt_nd(f, make_uniform_grid(lo, hi, counts))
    save_gridfn(conj.values, args.out)
    logger.info(f"✅ Conjugate of {args.input} on a {conj.dual_grid.shape} dual grid written to {args.out}")
    return EXIT_OK


def cmd_rollout(args) -> int:
    config = build_config(args)
    logging.getLogger().setLevel(getattr(logging, config.log_level.upper()))
    traj = single_rollout(config, args.alg, args.n, parse_float_list(args.x0))
    status = '❌ infeasible' if traj.infeasible else '✅ feasible'
    print(f"\n📊 {args.alg} rollout: {status}, realized cost {traj.realized_cost:.6g}")
    print(traj.to_frame().to_string(index=False))
    if args.out:
        traj.to_csv(args.out)
    return EXIT_OK


def cmd_scaling(args) -> int:
    config = build_config(args)
    logging.getLogger().setLevel(getattr(logging, config.log_level.upper()))
    problem = get_problem(config)
    schedule = parse_int_list(args.n)
    if len(schedule) < 4:
        raise ConfigError(f"Scaling study needs at least 4 grid sizes, got {len(schedule)}")
    slope = scaling_study(problem, args.alg, schedule, repeats=args.repeats,
                          output_dir=args.out or config.output_dir,
                          alpha=config.alpha, numeric_conjugate=config.numeric_conjugate)
    print(f"\n📊 {args.alg} log-log slope on '{problem.name}': {slope:.3f}")
    return EXIT_OK


COMMANDS = {
    'run': cmd_run,
    'transform': cmd_transform,
    'rollout': cmd_rollout,
    'scaling': cmd_scaling,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point"""
    parser = setup_argument_parser()
    args = parser.parse_args(argv)

    print("=" * 80)
    print("  🎯 d-CDP BENCHMARK TOOLKIT")
    print("=" * 80)
    print("  📐 Discrete conjugate dynamic programming, joint and separable cost forms")
    print("  📊 Discrete DP reference, error curves and trajectory costs")
    print("=" * 80)

    try:
        return COMMANDS[args.command](args)
    except ConfigError as e:
        logger.error(f"❌ Configuration error: {e}")
        return EXIT_CONFIG_ERROR
    except ValueError as e:
        logger.error(f"❌ Invalid input: {e}")
        return EXIT_CONFIG_ERROR
    except KeyboardInterrupt:
        print("\n🛑 Interrupted by user")
        return 1


if __name__ == "__main__":
    np.set_printoptions(precision=6, suppress=True)
    sys.exit(main())
