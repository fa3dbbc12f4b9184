"""
Forward rollouts from computed costs-to-go or d-DP control laws
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from grid import GridFn, lerp_eval
from problem import ControlProblem, DiscretizationPlan, ValueIterationResult

logger = logging.getLogger(__name__)


@dataclass
class TrajectoryResult:
    """States x_0..x_T, inputs u_0..u_{T-1}, per-step costs and disturbance draws"""
    states: np.ndarray
    inputs: np.ndarray
    stage_costs: np.ndarray
    terminal_cost: float
    realized_cost: float
    disturbances: Optional[np.ndarray] = None
    infeasible: bool = False

    @property
    def steps(self) -> int:
        return int(self.inputs.shape[0])

    def to_frame(self) -> pd.DataFrame:
        """One row per time step; the last row holds the terminal state and terminal cost"""
        n = self.states.shape[1]
        m = self.inputs.shape[1] if self.inputs.ndim == 2 else 0
        rows = []
        for t in range(self.states.shape[0]):
            row = {'t': t}
            row.update({f"x_{i + 1}": self.states[t, i] for i in range(n)})
            last = t >= self.steps
            row.update({f"u_{j + 1}": (np.nan if last else self.inputs[t, j]) for j in range(m)})
            row['stage_cost'] = self.terminal_cost if last else self.stage_costs[t]
            rows.append(row)
        return pd.DataFrame(rows)

    def to_csv(self, filepath: Union[str, Path]):
        self.to_frame().to_csv(filepath, index=False, float_format='%.17g')
        logger.info(f"💾 Trajectory written to {filepath}")


def evaluate_trajectory(problem: ControlProblem, states, inputs) -> float:
    """
    Sum of stage costs plus terminal cost along a trajectory

    Raises:
        ValueError: when len(states) != len(inputs) + 1 or dimensions mismatch
    """
    states = np.atleast_2d(np.asarray(states, dtype=float))
    inputs = np.asarray(inputs, dtype=float).reshape(-1, problem.m) if np.size(inputs) else np.zeros((0, problem.m))
    if states.shape[1] != problem.n:
        raise ValueError(f"States need {problem.n} components, got {states.shape[1]}")
    if states.shape[0] != inputs.shape[0] + 1:
        raise ValueError(f"Expected {inputs.shape[0] + 1} states for {inputs.shape[0]} inputs, got {states.shape[0]}")
    total = 0.0
    for t in range(inputs.shape[0]):
        total += float(problem.stage_cost_value(states[t:t + 1], inputs[t:t + 1])[0])
    return total + float(problem.terminal_value(states[-1:])[0])


def _finish(problem: ControlProblem, states: List[np.ndarray], inputs: List[np.ndarray],
            stage_costs: List[float], draws: List[np.ndarray], infeasible: bool) -> TrajectoryResult:
    states_arr = np.array(states)
    inputs_arr = np.array(inputs).reshape(-1, problem.m)
    costs_arr = np.array(stage_costs, dtype=float)
    disturbances = np.array(draws).reshape(-1, problem.n) if problem.disturbance is not None else None
    if infeasible:
        return TrajectoryResult(states_arr, inputs_arr, costs_arr, np.inf, np.inf, disturbances, True)
    terminal = float(problem.terminal_value(states_arr[-1:])[0])
    realized = 0.0
    for c in costs_arr:
        realized += float(c)
    return TrajectoryResult(states_arr, inputs_arr, costs_arr, terminal, realized + terminal, disturbances, False)


def _greedy_input(problem: ControlProblem, x: np.ndarray, us: np.ndarray, J_next: GridFn) -> Tuple[int, float]:
    cost = problem.stage_cost_pairs(x[None, :], us)[0]
    nxt = problem.next_states(x[None, :], us)[0]
    feasible = problem.state_box.contains(nxt) & np.isfinite(cost)
    if problem.disturbance is None:
        cont = lerp_eval(J_next, nxt)
    else:
        cont = np.zeros(us.shape[0])
        for w, p in problem.disturbance.outcomes():
            cont += p * lerp_eval(J_next, nxt + w)
    q = np.where(feasible, cost + cont, np.inf)
    idx = int(np.argmin(q))
    return idx, float(q[idx])


def rollout_greedy(costs: ValueIterationResult, problem: ControlProblem, plan: DiscretizationPlan,
                   x0, rng_seed: Optional[int] = None) -> TrajectoryResult:
    """
    Greedy rollout w.r.t. computed costs-to-go

    At each step u_t minimizes C(x_t, u) + E LERP[J_{t+1}](f(x_t, u) + w) over the
    input grid; the disturbance is drawn after u_t is chosen.
    """
    if costs.horizon != problem.horizon:
        raise ValueError(f"Costs cover {costs.horizon} steps but the problem horizon is {problem.horizon}")
    rng = np.random.default_rng(rng_seed)
    us = plan.input_grid.points()
    x = np.asarray(x0, dtype=float).reshape(problem.n)
    states, inputs, stage_costs, draws = [x], [], [], []

    for t in range(problem.horizon):
        idx, value = _greedy_input(problem, x, us, costs.costs[t + 1])
        if not np.isfinite(value):
            logger.warning(f"⚠️ No feasible input at t={t} from x={np.round(x, 4).tolist()}, truncating trajectory")
            return _finish(problem, states, inputs, stage_costs, draws, infeasible=True)
        u = us[idx]
        stage_costs.append(float(problem.stage_cost_value(x[None, :], u[None, :])[0]))
        x_next = problem.dynamics(x[None, :], u[None, :])[0]
        if problem.disturbance is not None:
            w = problem.disturbance.sample(rng)
            draws.append(w)
            x_next = x_next + w
        inputs.append(u)
        states.append(x_next)
        x = x_next

    return _finish(problem, states, inputs, stage_costs, draws, infeasible=False)


def rollout_policy(policies: Sequence[Tuple[GridFn, ...]], problem: ControlProblem, x0,
                   rng_seed: Optional[int] = None) -> TrajectoryResult:
    """
    Rollout of d-DP control laws extended by LERP and clamped to the input box

    A +inf policy value marks a state without feasible input and truncates the rollout.
    """
    if len(policies) != problem.horizon:
        raise ValueError(f"Expected {problem.horizon} control laws, got {len(policies)}")
    rng = np.random.default_rng(rng_seed)
    x = np.asarray(x0, dtype=float).reshape(problem.n)
    states, inputs, stage_costs, draws = [x], [], [], []

    for t, law in enumerate(policies):
        raw = np.array([float(lerp_eval(component, x)[0]) for component in law])
        if not np.all(np.isfinite(raw)):
            logger.warning(f"⚠️ Control law undefined at t={t} for x={np.round(x, 4).tolist()}, truncating trajectory")
            return _finish(problem, states, inputs, stage_costs, draws, infeasible=True)
        u = problem.input_box.clip(raw)
        cost = float(problem.stage_cost_value(x[None, :], u[None, :])[0])
        if not np.isfinite(cost):
            return _finish(problem, states, inputs, stage_costs, draws, infeasible=True)
        stage_costs.append(cost)
        x_next = problem.dynamics(x[None, :], u[None, :])[0]
        if problem.disturbance is not None:
            w = problem.disturbance.sample(rng)
            draws.append(w)
            x_next = x_next + w
        inputs.append(u)
        states.append(x_next)
        x = x_next

    return _finish(problem, states, inputs, stage_costs, draws, infeasible=False)
