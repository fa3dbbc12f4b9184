"""
Benchmark runner
Executes value iterations and seeded rollouts per (algorithm, N) and assembles the report
"""
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from cdp import value_iteration
from control import TrajectoryResult, rollout_greedy, rollout_policy
from problem import ControlProblem, DiscretizationPlan, ValueIterationResult, get_preset, load_problem_file, make_plan
from .config import ConfigError, ExperimentConfig
from .reference import make_reference
from .report import BenchmarkReport, error_curve

logger = logging.getLogger(__name__)


def get_problem(config: ExperimentConfig) -> ControlProblem:
    """
    Raises:
        ConfigError: unknown preset or malformed problem file
    """
    try:
        if config.problem_file:
            problem = load_problem_file(config.problem_file)
        else:
            problem = get_preset(config.preset)
    except KeyError as e:
        raise ConfigError(str(e).strip("'\"")) from e
    except ValueError as e:
        raise ConfigError(str(e)) from e
    if config.horizon is not None:
        problem = problem.with_horizon(config.horizon)
    return problem


def initial_states(problem: ControlProblem, count: int, seed: int) -> np.ndarray:
    """count initial states drawn uniformly from the state box"""
    rng = np.random.default_rng(seed)
    return rng.uniform(problem.state_box.lo, problem.state_box.hi, size=(count, problem.n))


def plan_for(problem: ControlProblem, config: ExperimentConfig, n: int):
    return make_plan(
        problem, n,
        alpha=config.alpha,
        y_counts=config.y_counts,
        z_counts=config.z_counts,
        v_counts=config.v_counts,
        numeric_conjugate=config.numeric_conjugate,
    )


def backward_time(result: ValueIterationResult) -> float:
    return result.total_time + float(result.metadata.get('setup_time', 0.0))


def trajectory(algorithm: str, result: ValueIterationResult, problem: ControlProblem, plan,
               x0, seed: int) -> TrajectoryResult:
    if algorithm == 'ddp-mu':
        return rollout_policy(result.policies, problem, x0, seed)
    return rollout_greedy(result, problem, plan, x0, seed)


@dataclass
class SolvedCell:
    algorithms: Tuple[str, ...]
    n: int
    plan: DiscretizationPlan
    result: ValueIterationResult
    errors: np.ndarray


@dataclass
class CellOutcome:
    rows: List[dict]
    trajectories: List[dict]


def _solve_cell(problem: ControlProblem, config: ExperimentConfig, base: str, algorithms: Tuple[str, ...], n: int,
                reference: ValueIterationResult) -> SolvedCell:
    plan = plan_for(problem, config, n)
    result = value_iteration(problem, plan, base)
    return SolvedCell(algorithms, n, plan, result, error_curve(result, reference))


def _rollout_cell(problem: ControlProblem, config: ExperimentConfig, cell: SolvedCell,
                  x0s: np.ndarray, ref_costs: np.ndarray) -> CellOutcome:
    outcome = CellOutcome(rows=[], trajectories=[])
    n, errors = cell.n, cell.errors

    for algorithm in cell.algorithms:
        start = time.perf_counter()
        costs = np.empty(len(x0s))
        infeasible = 0
        for i, x0 in enumerate(x0s):
            traj = trajectory(algorithm, cell.result, problem, cell.plan, x0, config.seed + i)
            costs[i] = traj.realized_cost
            infeasible += int(traj.infeasible)
        forward = time.perf_counter() - start

        usable = np.isfinite(ref_costs) & (ref_costs > 0)
        relative = np.full(len(x0s), np.nan)
        relative[usable] = costs[usable] / ref_costs[usable]
        for i in range(len(x0s)):
            outcome.trajectories.append({
                'algorithm': algorithm, 'n': int(n), 'x0_index': i,
                **{f"x0_{k + 1}": float(x0s[i, k]) for k in range(problem.n)},
                'cost': float(costs[i]), 'reference_cost': float(ref_costs[i]),
                'relative_cost': float(relative[i]),
            })
        outcome.rows.append({
            'algorithm': algorithm, 'n': n, 'errors': errors,
            'relative_costs': relative[usable], 'backward_time': backward_time(cell.result),
            'forward_time': forward, 'infeasible': infeasible,
        })
        max_error = np.nanmax(errors) if np.any(~np.isnan(errors)) else np.nan
        mean_relative = np.nanmean(relative) if usable.any() else np.nan
        logger.info(f"📊 {algorithm} N={n}: max error {max_error:.4g}, mean relative cost {mean_relative:.4f}")
    return outcome


def _cells(algorithms: Sequence[str], grid_sizes: Sequence[int]) -> List[Tuple[str, Tuple[str, ...], int]]:
    """Group ddp and ddp-mu so that both share one value iteration"""
    cells = []
    for n in grid_sizes:
        grouped: Dict[str, List[str]] = {}
        for algorithm in algorithms:
            base = 'ddp' if algorithm == 'ddp-mu' else algorithm
            grouped.setdefault(base, [])
            if algorithm not in grouped[base]:
                grouped[base].append(algorithm)
        cells.extend((base, tuple(algs), int(n)) for base, algs in grouped.items())
    return cells


def run(config: ExperimentConfig, write: bool = True) -> BenchmarkReport:
    """
    Run the configured benchmark

    Raises:
        ConfigError: invalid configuration, unknown preset or malformed problem file
    """
    config.validate()
    problem = get_problem(config)
    if 'cdp2' in config.algorithms and not problem.is_separable:
        raise ConfigError(f"cdp2 requires a separable problem, '{problem.name}' has a joint stage cost")

    reference = make_reference(problem, config.reference_n)
    x0s = initial_states(problem, config.x0_count, config.seed)
    ref_costs = np.array([
        rollout_policy(reference.policies, problem, x0, config.seed + i).realized_cost
        for i, x0 in enumerate(x0s)
    ])
    logger.info(f"📊 Reference trajectories: {int(np.isfinite(ref_costs).sum())}/{len(x0s)} feasible")

    # Backward passes are timed one at a time; only the rollouts share the pool
    solved = [_solve_cell(problem, config, base, algs, n, reference)
              for base, algs, n in _cells(config.algorithms, config.grid_sizes)]
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as executor:
            outcomes = list(executor.map(lambda cell: _rollout_cell(problem, config, cell, x0s, ref_costs), solved))
    else:
        outcomes = [_rollout_cell(problem, config, cell, x0s, ref_costs) for cell in solved]

    report = BenchmarkReport(problem=problem.name, reference_n=config.reference_n, seed=config.seed,
                             concurrent_rollouts=config.workers > 1)
    for outcome in outcomes:
        for row in outcome.rows:
            report.add_row(row['algorithm'], row['n'], row['errors'], row['relative_costs'],
                           row['backward_time'], row['forward_time'], row['infeasible'])
        report.trajectories.extend(outcome.trajectories)
    report.sort()

    if write:
        report.write(config.output_dir)
    return report


def measure_scaling(problem: ControlProblem, algorithm: str, schedule: Sequence[int],
                    repeats: int = 1, **plan_options) -> pd.DataFrame:
    """Backward wall time per grid size, best of `repeats`, run sequentially"""
    records = []
    for n in schedule:
        plan = make_plan(problem, int(n), **plan_options)
        times = []
        for _ in range(max(1, repeats)):
            result = value_iteration(problem, plan, algorithm)
            times.append(backward_time(result))
        records.append({'n': int(n), 'X': plan.state_grid.size, 'U': plan.input_grid.size,
                        'backward_time': min(times)})
        logger.info(f"⏱️ {algorithm} N={n}: {min(times):.4f}s")
    return pd.DataFrame(records)


def fit_slope(frame: pd.DataFrame) -> float:
    """Least-squares slope of log(backward time) against log(X)"""
    return float(np.polyfit(np.log(frame['X'].to_numpy(float)), np.log(frame['backward_time'].to_numpy(float)), 1)[0])


def scaling_study(problem: ControlProblem, algorithm: str, schedule: Sequence[int],
                  repeats: int = 1, output_dir: Optional[str] = None, **plan_options) -> float:
    """
    Fitted log-log slope of backward time against state-grid cardinality

    Raises:
        ValueError: fewer than 4 schedule points
    """
    if len(schedule) < 4:
        raise ValueError(f"Scaling study needs at least 4 grid sizes, got {len(schedule)}")
    frame = measure_scaling(problem, algorithm, schedule, repeats, **plan_options)
    slope = fit_slope(frame)
    logger.info(f"📊 {algorithm} on '{problem.name}': log-log slope {slope:.3f}")
    if output_dir is not None:
        out = Path(output_dir)
        out.mkdir(parents=True, exist_ok=True)
        frame.assign(algorithm=algorithm, slope=slope).to_csv(out / 'scaling.csv', index=False)
        logger.info(f"💾 Scaling table written to {out / 'scaling.csv'}")
    return slope


def single_rollout(config: ExperimentConfig, algorithm: str, n: int, x0) -> TrajectoryResult:
    """Value iteration at N followed by one rollout from x0"""
    config.validate()
    problem = get_problem(config)
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (problem.n,):
        raise ConfigError(f"x0 needs {problem.n} components, got {x0.size}")
    plan = plan_for(problem, config, n)
    base = 'ddp' if algorithm == 'ddp-mu' else algorithm
    result = value_iteration(problem, plan, base)
    return trajectory(algorithm, result, problem, plan, x0, config.seed)
