"""
Test script for the benchmark layer: config, reference cache, error curves, runner and CLI
"""
import sys
import os
import json
import threading

import numpy as np
import pandas as pd
import pytest

# Add the src directory and the app directory to path for imports (from tests folder)
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from bench import (
    ConfigError, ExperimentConfig, error_curve, fit_slope, make_reference, measure_scaling,
    reference_key, run, scaling_study, single_rollout,
)
from conjugate import llt_nd
from grid import Grid, GridFn, load_gridfn, make_uniform_grid, save_gridfn
from problem import ValueIterationResult, get_preset
from settings import RUNTIME_SETTINGS


@pytest.fixture
def cache_dir(tmp_path, monkeypatch):
    path = tmp_path / "cache"
    monkeypatch.setitem(RUNTIME_SETTINGS, 'cache_dir', str(path))
    return path


def small_config(tmp_path, **overrides) -> ExperimentConfig:
    config = ExperimentConfig(
        preset='synthetic_separable', horizon=2, algorithms=['ddp', 'cdp2'], grid_sizes=[11, 21],
        x0_count=3, seed=7, reference_n=21, output_dir=str(tmp_path / "results"),
    )
    for key, value in overrides.items():
        setattr(config, key, value)
    return config


# ---------------------------------------------------------------------------
# Error curves
# ---------------------------------------------------------------------------

def _result(values_per_t, grid) -> ValueIterationResult:
    return ValueIterationResult('ddp', [GridFn(grid, v) for v in values_per_t])


def test_error_curve_zero_and_shift():
    grid = make_uniform_grid([-1.0], [1.0], [5])
    base = [np.linspace(0, 1, 5), np.linspace(1, 2, 5)]
    reference = _result(base, grid)
    np.testing.assert_array_equal(error_curve(reference, reference), [0.0, 0.0])
    shifted = _result([v + 0.25 for v in base], grid)
    np.testing.assert_allclose(error_curve(shifted, reference), [0.25, 0.25])


def test_error_curve_infinite_entries():
    grid = make_uniform_grid([-1.0], [1.0], [3])
    reference = _result([[1.0, 1.0, 1.0]], grid)
    result = _result([[1.0, np.inf, 1.0]], grid)
    assert np.isinf(error_curve(result, reference)[0])

    # No state of the result grid sees a finite reference value
    ref_inf = ValueIterationResult('ddp', [GridFn(Grid([[0.0, 1.0]]), [np.inf, 0.0])])
    coarse = ValueIterationResult('ddp', [GridFn(Grid([[0.0, 0.5]]), [1.0, 1.0])])
    assert np.isnan(error_curve(coarse, ref_inf)[0])


def test_error_curve_horizon_mismatch():
    grid = make_uniform_grid([-1.0], [1.0], [3])
    with pytest.raises(ValueError):
        error_curve(_result([np.zeros(3)], grid), _result([np.zeros(3), np.zeros(3)], grid))


# ---------------------------------------------------------------------------
# Reference cache
# ---------------------------------------------------------------------------

def test_reference_cache_is_bit_exact(tmp_path):
    problem = get_preset('synthetic_separable').with_horizon(2)
    cold = make_reference(problem, 9, cache_dir=tmp_path)
    warm = make_reference(problem, 9, cache_dir=tmp_path)
    assert warm.metadata.get('cached') and not cold.metadata.get('cached')
    for a, b in zip(cold.costs, warm.costs):
        np.testing.assert_array_equal(a.values, b.values)
    for law_a, law_b in zip(cold.policies, warm.policies):
        for a, b in zip(law_a, law_b):
            np.testing.assert_array_equal(a.values, b.values)
    assert len(list(tmp_path.glob("ref_*.npz"))) == 1


def test_reference_key_depends_on_inputs():
    problem = get_preset('synthetic_separable')
    assert reference_key(problem, 41) == reference_key(get_preset('synthetic_separable'), 41)
    assert reference_key(problem, 41) != reference_key(problem, 81)
    assert reference_key(problem, 41) != reference_key(problem.with_horizon(3), 41)
    assert reference_key(problem, 41) != reference_key(get_preset('synthetic_joint'), 41)


# ---------------------------------------------------------------------------
# Runner
# ---------------------------------------------------------------------------

def test_run_writes_full_report(tmp_path, cache_dir):
    config = small_config(tmp_path)
    report = run(config)
    assert [(r['algorithm'], r['n']) for r in report.rows] == [
        ('cdp2', 11), ('cdp2', 21), ('ddp', 11), ('ddp', 21),
    ]
    for row in report.rows:
        assert len(row['errors']) == 3
        assert row['backward_time'] >= 0

    out = tmp_path / "results"
    for name in ('report.json', 'trajectory_costs.csv', 'error_curves.csv', 'timings.csv'):
        assert (out / name).exists(), name
    payload = json.loads((out / 'report.json').read_text())
    assert payload['problem'] == 'synthetic_separable' and payload['seed'] == 7
    trajectories = pd.read_csv(out / 'trajectory_costs.csv')
    assert len(trajectories) == 4 * 3
    print(report.to_frame().to_string(index=False))


def test_run_is_deterministic(tmp_path, cache_dir):
    config = small_config(tmp_path, algorithms=['ddp', 'ddp-mu', 'cdp2'], grid_sizes=[11])
    a = run(config, write=False)
    b = run(config, write=False)
    columns = ['algorithm', 'n', 'max_error', 'mean_relative_cost', 'infeasible_rollouts']
    pd.testing.assert_frame_equal(a.to_frame()[columns], b.to_frame()[columns])
    pd.testing.assert_frame_equal(pd.DataFrame(a.trajectories), pd.DataFrame(b.trajectories))
    assert {r['algorithm'] for r in a.rows} == {'ddp', 'ddp-mu', 'cdp2'}


def test_run_with_workers(tmp_path, cache_dir):
    config = small_config(tmp_path, grid_sizes=[5, 7], workers=2)
    sequential = run(small_config(tmp_path, grid_sizes=[5, 7]), write=False)
    concurrent = run(config, write=False)
    assert [r['max_error'] for r in concurrent.rows] == [r['max_error'] for r in sequential.rows]


def test_workers_keep_backward_passes_sequential(tmp_path, cache_dir, monkeypatch):
    import bench.runner

    solve = bench.runner.value_iteration
    lock = threading.Lock()
    active, peak = [0], [0]

    def tracked(*args, **kwargs):
        with lock:
            active[0] += 1
            peak[0] = max(peak[0], active[0])
        try:
            return solve(*args, **kwargs)
        finally:
            with lock:
                active[0] -= 1

    monkeypatch.setattr(bench.runner, 'value_iteration', tracked)
    report = run(small_config(tmp_path, grid_sizes=[5, 7, 9], workers=3))
    assert peak[0] == 1
    payload = json.loads((tmp_path / "results" / "report.json").read_text())
    assert payload['concurrent_rollouts'] is True
    assert run(small_config(tmp_path, grid_sizes=[5]), write=False).concurrent_rollouts is False
    assert len(report.rows) == 6


def test_run_config_errors(tmp_path, cache_dir):
    with pytest.raises(ConfigError):
        run(small_config(tmp_path, preset='nope'))
    with pytest.raises(ConfigError):
        run(small_config(tmp_path, preset='synthetic_joint'))
    with pytest.raises(ConfigError):
        run(small_config(tmp_path, preset=None, problem_file=str(tmp_path / "missing.json")))


def test_single_rollout(tmp_path):
    config = small_config(tmp_path)
    traj = single_rollout(config, 'cdp2', 11, [0.1, -0.2])
    assert traj.steps == 2 or traj.infeasible
    with pytest.raises(ConfigError):
        single_rollout(config, 'cdp2', 11, [0.1])


# ---------------------------------------------------------------------------
# Scaling
# ---------------------------------------------------------------------------

def test_scaling_study_needs_four_points():
    with pytest.raises(ValueError):
        scaling_study(get_preset('synthetic_separable'), 'cdp2', [5, 7, 9])


def test_measure_scaling_frame():
    frame = measure_scaling(get_preset('synthetic_separable').with_horizon(1), 'cdp2', [5, 7])
    assert list(frame.columns) == ['n', 'X', 'U', 'backward_time']
    assert frame['X'].tolist() == [25, 49]


def test_fit_slope():
    X = np.array([100.0, 400.0, 1600.0, 6400.0])
    frame = pd.DataFrame({'X': X, 'backward_time': 3e-6 * X ** 2})
    assert fit_slope(frame) == pytest.approx(2.0)


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

def test_config_save_and_load(tmp_path):
    path = tmp_path / "config.json"
    config = ExperimentConfig(preset='sir', grid_sizes=[5, 9], alpha=0.5, numeric_conjugate=True)
    config.save_to_file(str(path))
    loaded = ExperimentConfig.load_from_file(str(path))
    assert loaded == config

    assert ExperimentConfig.load_from_file(str(tmp_path / "absent.json")) == ExperimentConfig()


def test_config_load_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        ExperimentConfig.load_from_file(str(bad))
    unknown = tmp_path / "unknown.json"
    unknown.write_text(json.dumps({'preset': 'sir', 'colour': 'blue'}))
    with pytest.raises(ConfigError):
        ExperimentConfig.load_from_file(str(unknown))


@pytest.mark.parametrize("field, value", [
    ('algorithms', ['ddp', 'cdp9']),
    ('algorithms', []),
    ('grid_sizes', [1, 11]),
    ('reference_n', 1),
    ('horizon', 0),
    ('x0_count', 0),
    ('alpha', -1.0),
    ('workers', 0),
    ('log_level', 'VERBOSE'),
    ('y_counts', [1, 5]),
])
def test_config_validation(field, value):
    config = ExperimentConfig()
    setattr(config, field, value)
    with pytest.raises(ConfigError):
        config.validate()


# ---------------------------------------------------------------------------
# Command line
# ---------------------------------------------------------------------------

def test_cli_exit_codes(tmp_path, cache_dir):
    import main as app

    missing_config = str(tmp_path / "none.json")
    assert app.main(['run', '--config', missing_config, '--preset', 'nope']) == app.EXIT_CONFIG_ERROR
    assert app.main(['run', '--config', missing_config, '--alg', 'ddp,cdp9']) == app.EXIT_CONFIG_ERROR
    assert app.main(['run', '--config', missing_config, '--preset', 'synthetic_separable',
                     '--horizon', '1', '--alg', 'cdp2', '--n', '5', '--x0-count', '2',
                     '--reference-n', '9', '--out', str(tmp_path / "cli")]) == app.EXIT_OK
    assert (tmp_path / "cli" / "report.json").exists()
    assert app.main(['scaling', '--config', missing_config, '--n', '5,7']) == app.EXIT_CONFIG_ERROR


def test_cli_rollout(tmp_path):
    import main as app

    missing_config = str(tmp_path / "none.json")
    target = tmp_path / "trajectory.csv"
    code = app.main(['rollout', '--config', missing_config, '--preset', 'synthetic_separable',
                     '--horizon', '2', '--alg', 'cdp2', '--n', '7', '--x0', '0.5,-0.5', '--out', str(target)])
    assert code == app.EXIT_OK
    df = pd.read_csv(target)
    assert list(df.columns) == ['t', 'x_1', 'x_2', 'u_1', 'u_2', 'stage_cost']

    assert app.main(['rollout', '--config', missing_config, '--x0', '0.5']) == app.EXIT_CONFIG_ERROR


def test_cli_transform(tmp_path):
    import main as app

    grid = make_uniform_grid([-1.0, -1.0], [1.0, 1.0], [5, 5])
    f = GridFn.from_function(grid, lambda x: np.sum(x ** 2, axis=1))
    source, target = tmp_path / "f.csv", tmp_path / "f_conj.csv"
    save_gridfn(f, source)
    code = app.main(['transform', str(source), '--dual-lo', '-2,-2', '--dual-hi', '2,2',
                     '--dual-n', '9,9', '--out', str(target)])
    assert code == app.EXIT_OK
    expected = llt_nd(f, make_uniform_grid([-2.0, -2.0], [2.0, 2.0], [9, 9])).values
    np.testing.assert_array_equal(load_gridfn(target).values, expected.values)

    assert app.main(['transform', str(source), '--dual-lo', '-2', '--dual-hi', '2',
                     '--dual-n', '9', '--out', str(target)]) == app.EXIT_CONFIG_ERROR


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
