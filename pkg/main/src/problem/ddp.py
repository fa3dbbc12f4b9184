"""
Discrete DP (d-DP) operator and feasibility checking

For each grid state the operator enumerates the input grid:
    T_d[J](x) = min_{u in U_g} C(x, u) + LERP[J](f(x, u)),
with C taken as +inf when f(x, u) leaves the state box.
"""
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from grid import GridFn, lerp_eval
from settings import max_pairs
from .models import ControlProblem, DiscretizationPlan, Disturbance

logger = logging.getLogger(__name__)


class InfeasibleProblemError(ValueError):
    """No grid state has a feasible input, so the cost-to-go has an empty effective domain"""


@dataclass(frozen=True)
class FeasibilityReport:
    """Grid states without any admissible input on the input grid"""
    infeasible_indices: np.ndarray
    infeasible_states: np.ndarray
    total_states: int

    @property
    def is_feasible(self) -> bool:
        return self.infeasible_indices.size == 0

    @property
    def count(self) -> int:
        return int(self.infeasible_indices.size)


def _state_blocks(n_states: int, n_inputs: int):
    block = max(1, max_pairs() // max(1, n_inputs))
    for start in range(0, n_states, block):
        yield start, min(n_states, start + block)


def _admissible(problem: ControlProblem, nxt: np.ndarray, cost: np.ndarray) -> np.ndarray:
    b, u, n = nxt.shape
    inside = problem.state_box.contains(nxt.reshape(-1, n)).reshape(b, u)
    return inside & np.isfinite(cost)


def _expected_continuation(J_next: GridFn, points: np.ndarray, disturbance: Optional[Disturbance]) -> np.ndarray:
    if disturbance is None:
        return lerp_eval(J_next, points)
    acc = np.zeros(points.shape[0])
    for w, p in disturbance.outcomes():
        acc += p * lerp_eval(J_next, points + w)
    return acc


def _bellman(J_next: GridFn, problem: ControlProblem, plan: DiscretizationPlan,
             disturbance: Optional[Disturbance]) -> Tuple[GridFn, Tuple[GridFn, ...]]:
    xs = plan.state_grid.points()
    us = plan.input_grid.points()
    n = problem.n
    values = np.empty(xs.shape[0])
    choice = np.empty(xs.shape[0], dtype=np.intp)

    for start, stop in _state_blocks(xs.shape[0], us.shape[0]):
        xb = xs[start:stop]
        nxt = problem.next_states(xb, us)
        cost = problem.stage_cost_pairs(xb, us)
        feasible = _admissible(problem, nxt, cost)
        cont = _expected_continuation(J_next, nxt.reshape(-1, n), disturbance).reshape(cost.shape)
        q = np.where(feasible, cost + cont, np.inf)
        # argmin returns the first minimizer: lowest row-major input index
        idx = np.argmin(q, axis=1)
        values[start:stop] = q[np.arange(q.shape[0]), idx]
        choice[start:stop] = idx

    infeasible = ~np.isfinite(values)
    if infeasible.all():
        raise InfeasibleProblemError(
            f"No grid state of '{problem.name}' has a feasible input on a {plan.input_grid.shape} input grid"
        )
    policy = tuple(
        GridFn(plan.state_grid, np.where(infeasible, np.inf, us[choice, j]))
        for j in range(problem.m)
    )
    return GridFn(plan.state_grid, values), policy


def ddp_step(J_next: GridFn, problem: ControlProblem, plan: DiscretizationPlan) -> Tuple[GridFn, Tuple[GridFn, ...]]:
    """
    One deterministic d-DP step

    Returns:
        (costs, policy) where policy holds one GridFn per input component,
        with +inf at states that have no feasible input

    Raises:
        InfeasibleProblemError: no grid state has a feasible input
    """
    return _bellman(J_next, problem, plan, None)


def ddp_step_stochastic(J_next: GridFn, problem: ControlProblem,
                        plan: DiscretizationPlan) -> Tuple[GridFn, Tuple[GridFn, ...]]:
    """One d-DP step with the expectation over the disturbance inside the minimization"""
    if problem.disturbance is None:
        raise ValueError(f"Problem '{problem.name}' has no disturbance")
    return _bellman(J_next, problem, plan, problem.disturbance)


def feasibility_check(problem: ControlProblem, plan: DiscretizationPlan) -> FeasibilityReport:
    """List the grid states with no input u on the input grid keeping f(x, u) in the state box"""
    xs = plan.state_grid.points()
    us = plan.input_grid.points()
    has_input = np.zeros(xs.shape[0], dtype=bool)

    for start, stop in _state_blocks(xs.shape[0], us.shape[0]):
        xb = xs[start:stop]
        feasible = _admissible(problem, problem.next_states(xb, us), problem.stage_cost_pairs(xb, us))
        has_input[start:stop] = feasible.any(axis=1)

    bad = np.flatnonzero(~has_input)
    report = FeasibilityReport(infeasible_indices=bad, infeasible_states=xs[bad], total_states=xs.shape[0])
    if not report.is_feasible:
        logger.warning(f"⚠️ {report.count}/{report.total_states} grid states of '{problem.name}' "
                       f"have no feasible input on the input grid")
    else:
        logger.debug(f"✅ All {report.total_states} grid states of '{problem.name}' are feasible")
    return report
