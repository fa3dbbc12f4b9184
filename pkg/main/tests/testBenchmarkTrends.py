"""
Desk-scale benchmark trends on the synthetic separable problem

These runs take minutes; select them with `pytest -m slow`.
"""
import sys
import os

import pytest

# Add the src directory to path for imports (from tests folder)
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from bench import ExperimentConfig, run, scaling_study
from problem import get_preset
from settings import RUNTIME_SETTINGS

pytestmark = pytest.mark.slow

SCHEDULE = [11, 21, 41, 81]


@pytest.fixture(scope="module")
def report(tmp_path_factory):
    out = tmp_path_factory.mktemp("trends")
    previous = RUNTIME_SETTINGS['cache_dir']
    RUNTIME_SETTINGS['cache_dir'] = str(out / "cache")
    try:
        config = ExperimentConfig(
            preset='synthetic_separable', algorithms=['ddp', 'cdp2'], grid_sizes=[11, 21],
            x0_count=10, seed=0, reference_n=41, output_dir=str(out / "results"),
        )
        yield run(config)
    finally:
        RUNTIME_SETTINGS['cache_dir'] = previous


def _row(report, algorithm, n):
    return next(r for r in report.rows if r['algorithm'] == algorithm and r['n'] == n)


def test_relative_cost_decreases_with_resolution(report):
    for algorithm in ('ddp', 'cdp2'):
        coarse = _row(report, algorithm, 11)['mean_relative_cost']
        fine = _row(report, algorithm, 21)['mean_relative_cost']
        print(f"📊 {algorithm}: relative cost {coarse:.4f} -> {fine:.4f}")
        assert fine < coarse


def test_cdp2_error_decreases_with_resolution(report):
    assert _row(report, 'cdp2', 21)['max_error'] < _row(report, 'cdp2', 11)['max_error']


def test_cdp2_backward_pass_is_faster(report):
    ddp = _row(report, 'ddp', 21)['backward_time']
    cdp2 = _row(report, 'cdp2', 21)['backward_time']
    print(f"⏱️ N=21: ddp {ddp:.3f}s, cdp2 {cdp2:.3f}s ({ddp / cdp2:.1f}x)")
    assert cdp2 * 5.0 <= ddp


@pytest.mark.parametrize("algorithm, expected", [('ddp', 2.0), ('cdp2', 1.0)])
def test_scaling_slopes(algorithm, expected):
    # Slopes do not depend on the horizon; two steps keep the 81^2 d-DP run short
    problem = get_preset('synthetic_separable').with_horizon(2)
    slope = scaling_study(problem, algorithm, SCHEDULE)
    assert slope == pytest.approx(expected, abs=0.3)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-m", "slow"]))
