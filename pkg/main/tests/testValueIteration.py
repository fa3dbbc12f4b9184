"""
Test script for multistep value iteration with d-DP and both d-CDP algorithms
"""
import sys
import os
import json

import numpy as np
import pytest

# Add the src directory to path for imports (from tests folder)
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from cdp import (
    ALGORITHMS, construct_Y, construct_Z, cdp1_step, cdp2_step, stage_cost_range, terminal_costs,
    value_iteration,
)
from grid import as_box, diam_grid, one_sided_hausdorff
from problem import Disturbance, ddp_step, get_preset, make_plan, presets


def _algorithms_for(problem):
    return [a for a in ALGORITHMS if a != 'cdp2' or problem.is_separable]


def test_single_step_horizon():
    problem = get_preset('synthetic_separable').with_horizon(1)
    plan = make_plan(problem, 11)
    terminal = terminal_costs(problem, plan)

    ddp = value_iteration(problem, plan, 'ddp')
    np.testing.assert_array_equal(ddp.costs[1].values, terminal.values)
    np.testing.assert_array_equal(ddp.costs[0].values, ddp_step(terminal, problem, plan)[0].values)
    assert ddp.horizon == 1 and len(ddp.policies) == 1

    Y = construct_Y(terminal, problem, plan, stage_cost_range(problem, plan))
    cdp2 = value_iteration(problem, plan, 'cdp2')
    expected = cdp2_step(terminal, problem, plan, Y, construct_Z(problem, plan))
    np.testing.assert_allclose(cdp2.costs[0].values, expected.values, rtol=1e-12, atol=1e-12)
    cdp1 = value_iteration(problem, plan, 'cdp1')
    np.testing.assert_allclose(cdp1.costs[0].values, cdp1_step(terminal, problem, plan, Y).values,
                               rtol=1e-12, atol=1e-12)
    assert cdp1.policies is None


@pytest.mark.parametrize("name", sorted(presets()))
def test_zero_disturbance_matches_deterministic(name):
    """W = {0} with probability one reproduces the deterministic recursion bit for bit"""
    base = get_preset(name).with_horizon(2)
    degenerate = base.with_disturbance(Disturbance(np.zeros((1, base.n)), np.ones(1)))
    deterministic = base.with_disturbance(None)
    plan = make_plan(base, 11)
    for algorithm in _algorithms_for(base):
        a = value_iteration(degenerate, plan, algorithm)
        b = value_iteration(deterministic, plan, algorithm)
        for Ja, Jb in zip(a.costs, b.costs):
            np.testing.assert_array_equal(Ja.values, Jb.values, err_msg=f"{name}/{algorithm}")


def test_cdp1_preserves_convexity_on_joint_problem():
    problem = get_preset('synthetic_joint')
    plan = make_plan(problem, 11)
    result = value_iteration(problem, plan, 'cdp1')
    assert problem.horizon == 10
    for t, J in enumerate(result.costs):
        assert np.all(np.isfinite(J.values)), f"t={t}"
        tensor = J.tensor
        scale = max(1.0, float(np.max(np.abs(tensor))))
        for axis in range(2):
            second = np.diff(tensor, n=2, axis=axis)
            assert np.all(second >= -1e-9 * scale), f"t={t}, axis {axis}"
    print("✅ d-CDP output is convex along both axes at every stage")


def test_numeric_conjugation_parity():
    """One cdp2 step with a numeric input conjugate stays within the conjugation error bound"""
    problem = get_preset('synthetic_separable').with_horizon(1)
    analytic_plan = make_plan(problem, 21)
    numeric_plan = make_plan(problem, 21, numeric_conjugate=True)
    analytic = value_iteration(problem, analytic_plan, 'cdp2')
    numeric = value_iteration(problem, numeric_plan, 'cdp2')
    assert numeric.metadata['numeric_conjugate'] and not analytic.metadata['numeric_conjugate']
    assert numeric.metadata['v_grid'] == [21, 21]

    # Both runs conjugate the same terminal cost, so they share Y
    Y = numeric.metadata['dual_grids']['Y']
    np.testing.assert_array_equal(Y.grid.points(), analytic.metadata['dual_grids']['Y'].grid.points())
    V = numeric.metadata['dual_grids']['conjugate'].grids[0].grid
    v = -(Y.grid.points() @ problem.input_matrix)

    lip = np.exp(2.0) * np.sqrt(2.0)
    dish_inputs = one_sided_hausdorff(problem.input_box, numeric_plan.input_grid)
    dish_v = one_sided_hausdorff(as_box(V.lo, V.hi), V)
    discretization = (np.max(np.linalg.norm(v, axis=1)) + lip) * dish_inputs
    interpolation = diam_grid(numeric_plan.input_grid) * dish_v
    bound = discretization + interpolation

    gap = np.max(np.abs(numeric.costs[0].values - analytic.costs[0].values))
    print(f"🔢 Numeric vs analytic conjugation: max gap {gap:.4f}, bound {bound:.4f}")
    assert gap <= bound + 1e-9


def test_pendulum_infeasible_regions():
    """d-DP marks infeasible states with +inf while d-CDP keeps finite values there"""
    problem = get_preset('pendulum').with_horizon(3)
    plan = make_plan(problem, 11)
    ddp = value_iteration(problem, plan, 'ddp')
    cdp2 = value_iteration(problem, plan, 'cdp2')
    assert np.any(np.isinf(ddp.costs[0].values))
    assert np.all(np.isfinite(cdp2.costs[0].values))


def test_value_iteration_errors():
    problem = get_preset('synthetic_joint').with_horizon(1)
    plan = make_plan(problem, 5)
    with pytest.raises(ValueError):
        value_iteration(problem, plan, 'cdp3')
    with pytest.raises(ValueError):
        value_iteration(problem, plan, 'cdp2')


def test_metadata_and_timings():
    problem = get_preset('synthetic_separable').with_horizon(3)
    result = value_iteration(problem, make_plan(problem, 11), 'cdp2')
    assert len(result.step_times) == 3
    assert all(t >= 0 for t in result.step_times)
    assert result.metadata['y_grid'] == [11, 11]
    assert result.metadata['z_grid'] == [11, 11]
    assert result.metadata['setup_time'] >= 0


def test_result_save(tmp_path):
    problem = get_preset('synthetic_separable').with_horizon(2)
    result = value_iteration(problem, make_plan(problem, 5), 'ddp')
    result.save(tmp_path / "vi")

    out = tmp_path / "vi"
    for t in range(3):
        assert (out / f"J_{t:03d}.csv").exists()
    assert (out / "mu_000_u1.csv").exists() and (out / "mu_001_u2.csv").exists()
    timing = json.loads((out / "timing.json").read_text())
    assert timing['algorithm'] == 'ddp'
    assert len(timing['step_times']) == 2
    assert timing['metadata']['state_grid'] == [5, 5]


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
