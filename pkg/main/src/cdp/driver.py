"""
Multistep value iteration with d-DP or one of the two d-CDP operators (cdp1, cdp2)
"""
import logging
import time
from typing import List, Optional

import numpy as np

from grid import GridFn
from problem import (
    ControlProblem, DiscretizationPlan, ValueIterationResult,
    ddp_step, ddp_step_stochastic, feasibility_check,
)
from .dual_grids import construct_Y, construct_Z, stage_cost_range
from .operators import NumericStageConjugate, build_stage_conjugate, cdp1_step, cdp2_step, expectation_filter

logger = logging.getLogger(__name__)

ALGORITHMS = ('ddp', 'cdp1', 'cdp2')


def terminal_costs(problem: ControlProblem, plan: DiscretizationPlan) -> GridFn:
    return GridFn(plan.state_grid, problem.terminal_value(plan.state_grid.points()))


def value_iteration(problem: ControlProblem, plan: DiscretizationPlan, algorithm: str) -> ValueIterationResult:
    """
    Backward recursion J_T = C_T, J_t = T_d[J_{t+1}] for t = T-1..0

    For d-CDP the cost-to-go is passed through the expectation filter when the
    problem has a disturbance, and Y is rebuilt from it at every step. V tables
    and Z are built once before the loop.

    Raises:
        ValueError: unknown algorithm, or cdp2 on a joint-cost problem
    """
    if algorithm not in ALGORITHMS:
        raise ValueError(f"Unknown algorithm '{algorithm}', expected one of {ALGORITHMS}")
    if algorithm == 'cdp2' and not problem.is_separable:
        raise ValueError(f"cdp2 requires a separable problem, '{problem.name}' has a joint stage cost")
    plan.validate(problem)

    T = problem.horizon
    costs: List[Optional[GridFn]] = [None] * (T + 1)
    costs[T] = terminal_costs(problem, plan)
    step_times = [0.0] * T
    metadata = {
        'problem': problem.name,
        'state_grid': list(plan.state_grid.shape),
        'input_grid': list(plan.input_grid.shape),
        'alpha': plan.alpha,
    }

    logger.info(f"🚀 Value iteration: {algorithm} on '{problem.name}' "
                f"(X={plan.state_grid.size}, U={plan.input_grid.size}, T={T})")

    if algorithm == 'ddp':
        policies = [None] * T
        feasibility_check(problem, plan)
        step = ddp_step if problem.disturbance is None else ddp_step_stochastic
        for t in range(T - 1, -1, -1):
            start = time.perf_counter()
            costs[t], policies[t] = step(costs[t + 1], problem, plan)
            step_times[t] = time.perf_counter() - start
            logger.debug(f"t={t}: {step_times[t]:.4f}s")
        result = ValueIterationResult(algorithm, costs, policies, step_times, metadata)
        logger.info(f"⏱️ {algorithm} finished in {result.total_time:.3f}s")
        return result

    setup_start = time.perf_counter()
    conjugate = build_stage_conjugate(problem, plan)
    cost_range = stage_cost_range(problem, plan)
    Z = construct_Z(problem, plan) if algorithm == 'cdp2' else None
    if algorithm == 'cdp2':
        input_conjugate = conjugate.input_conjugate if isinstance(conjugate, NumericStageConjugate) else None
        metadata['z_grid'] = list(Z.grid.shape)
    if isinstance(conjugate, NumericStageConjugate):
        metadata['v_grid'] = list(conjugate.grids[0].grid.shape)
    metadata['numeric_conjugate'] = bool(getattr(conjugate, 'numeric', False))
    metadata['setup_time'] = time.perf_counter() - setup_start

    last_Y = None
    for t in range(T - 1, -1, -1):
        start = time.perf_counter()
        J = costs[t + 1]
        if problem.disturbance is not None:
            J = expectation_filter(J, problem.disturbance)
        Y = construct_Y(J, problem, plan, cost_range)
        if algorithm == 'cdp1':
            costs[t] = cdp1_step(J, problem, plan, Y, conjugate)
        else:
            costs[t] = cdp2_step(J, problem, plan, Y, Z, input_conjugate)
        step_times[t] = time.perf_counter() - start
        last_Y = Y
        logger.debug(f"t={t}: {step_times[t]:.4f}s, Y half-widths {np.round(Y.half_widths, 4).tolist()}")

    metadata['y_grid'] = list(last_Y.grid.shape)
    metadata['dual_grids'] = {'Y': last_Y, 'Z': Z, 'conjugate': conjugate}
    result = ValueIterationResult(algorithm, costs, None, step_times, metadata)
    logger.info(f"⏱️ {algorithm} finished in {result.total_time:.3f}s")
    return result
