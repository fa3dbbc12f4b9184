"""
Bench Module
Experiment configuration, reference solutions, reports and the benchmark runner
"""
from .config import BENCH_ALGORITHMS, ConfigError, ExperimentConfig
from .reference import make_reference, reference_key
from .report import BenchmarkReport, error_curve
from .runner import (
    fit_slope, get_problem, initial_states, measure_scaling, plan_for, run, scaling_study, single_rollout,
)

__all__ = [
    'BENCH_ALGORITHMS', 'ConfigError', 'ExperimentConfig',
    'make_reference', 'reference_key',
    'BenchmarkReport', 'error_curve',
    'fit_slope', 'get_problem', 'initial_states', 'measure_scaling', 'plan_for', 'run',
    'scaling_study', 'single_rollout',
]
