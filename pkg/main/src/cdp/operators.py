"""
d-CDP operators

cdp1 (input-affine dynamics, joint stage cost):
    phi_x(y) = C_x*(-f_i(x)' y) + J*_d(y)
    T[J](x) = max_{y in Y} <f_s(x), y> - phi_x(y)
cdp2 (constant B, separable cost):
    phi(y) = C_i*(-B' y) + J*_d(y)
    T[J](x) = C_s(x) + LERP[phi*_d](f_s(x))
"""
import logging
from typing import Callable, List, Optional

import numpy as np

from conjugate import ConjugateResult, approx_conjugate, llt_nd
from grid import GridFn, lerp_eval
from problem import ControlProblem, DiscretizationPlan, Disturbance
from settings import max_pairs
from .dual_grids import DualGridV, DualGridY, DualGridZ, construct_V, numeric_conj_stage_cost

logger = logging.getLogger(__name__)


class AnalyticStageConjugate:
    """C_x*(v) from the problem's closed form"""
    numeric = False

    def __init__(self, problem: ControlProblem):
        self.problem = problem

    def __call__(self, indices: np.ndarray, xs: np.ndarray, v: np.ndarray) -> np.ndarray:
        b, k, m = v.shape
        values = self.problem.partial_conjugate(np.repeat(xs, k, axis=0), v.reshape(-1, m))
        return values.reshape(b, k)


class NumericStageConjugate:
    """
    C_x*(v) from LLT tables on V grids, queried through LERP

    Separable problems share a single C_i table and subtract C_s(x).
    Joint problems keep one table per grid state.
    """
    numeric = True

    def __init__(self, tables: List[ConjugateResult], grids: List[DualGridV], offsets: Optional[np.ndarray] = None):
        self.tables = tables
        self.grids = grids
        self.offsets = offsets

    @classmethod
    def build(cls, problem: ControlProblem, plan: DiscretizationPlan) -> "NumericStageConjugate":
        us = plan.input_grid.points()
        counts = plan.resolved_v_counts
        if problem.is_separable:
            Cfn = GridFn(plan.input_grid, problem.stage_cost.input_cost(us))
            V = construct_V(Cfn, counts)
            offsets = problem.state_cost(plan.state_grid.points())
            return cls([numeric_conj_stage_cost(Cfn, V)], [V], offsets)

        tables, grids = [], []
        for x in plan.state_grid.points():
            costs = problem.stage_cost_pairs(x[None, :], us)[0]
            Cfn = GridFn(plan.input_grid, costs)
            V = construct_V(Cfn, counts)
            tables.append(numeric_conj_stage_cost(Cfn, V))
            grids.append(V)
        logger.debug(f"Built {len(tables)} per-state stage-cost conjugate tables")
        return cls(tables, grids)

    def __call__(self, indices: np.ndarray, xs: np.ndarray, v: np.ndarray) -> np.ndarray:
        b, k, m = v.shape
        if self.offsets is not None:
            shared = approx_conjugate(self.tables[0], v.reshape(-1, m)).reshape(b, k)
            return shared - self.offsets[indices][:, None]
        out = np.empty((b, k))
        for row, idx in enumerate(indices):
            out[row] = approx_conjugate(self.tables[idx], v[row])
        return out

    def input_conjugate(self, v: np.ndarray) -> np.ndarray:
        """C_i*(v) for the separable case"""
        return approx_conjugate(self.tables[0], v)


def build_stage_conjugate(problem: ControlProblem, plan: DiscretizationPlan):
    """Analytic conjugate when available and not overridden, LLT tables otherwise"""
    if problem.has_analytic_conjugate and not plan.numeric_conjugate:
        return AnalyticStageConjugate(problem)
    logger.info(f"🔢 Using numeric stage-cost conjugation for '{problem.name}'")
    return NumericStageConjugate.build(problem, plan)


def cdp1_step(J: GridFn, problem: ControlProblem, plan: DiscretizationPlan, Y: DualGridY,
              stage_conjugate: Optional[Callable] = None) -> GridFn:
    """
    One d-CDP step through the per-state dual maximization

    Args:
        J: Cost-to-go on the state grid
        problem: Input-affine problem (joint or separable cost)
        plan: Discretization plan
        Y: State-dual grid
        stage_conjugate: Callable (indices, xs, v) -> C_x*(v); defaults to the analytic form

    Returns:
        Updated cost-to-go on the state grid
    """
    stage_conjugate = stage_conjugate or AnalyticStageConjugate(problem)
    J_conj = llt_nd(J, Y.grid).values.values
    ypts = Y.grid.points()
    xs = plan.state_grid.points()
    out = np.empty(xs.shape[0])

    block = max(1, max_pairs() // ypts.shape[0])
    for start in range(0, xs.shape[0], block):
        stop = min(xs.shape[0], start + block)
        xb = xs[start:stop]
        v = -np.einsum('bnm,kn->bkm', problem.input_gain(xb), ypts)
        phi = stage_conjugate(np.arange(start, stop), xb, v) + J_conj[None, :]
        # max returns the same value as the lowest-index argmax
        out[start:stop] = np.max(problem.drift(xb) @ ypts.T - phi, axis=1)

    return GridFn(plan.state_grid, out)


def cdp2_step(J: GridFn, problem: ControlProblem, plan: DiscretizationPlan, Y: DualGridY, Z: DualGridZ,
              input_conjugate: Optional[Callable[[np.ndarray], np.ndarray]] = None) -> GridFn:
    """
    One d-CDP step for constant B and a separable cost (cdp2)

    Raises:
        ValueError: for joint-cost problems or when co(Z) does not cover f_s(X_g)
    """
    if not problem.is_separable:
        raise ValueError("cdp2_step requires a separable stage cost with constant B")
    input_conjugate = input_conjugate or problem.input_conjugate

    xs = plan.state_grid.points()
    fs = problem.drift(xs)
    if not Z.grid.contains(fs).all():
        raise ValueError("Z grid does not cover f_s(X_g)")

    J_conj = llt_nd(J, Y.grid).values.values
    ypts = Y.grid.points()
    phi = GridFn(Y.grid, np.asarray(input_conjugate(-ypts @ problem.input_matrix), dtype=float) + J_conj)
    phi_conj = llt_nd(phi, Z.grid)
    return GridFn(plan.state_grid, problem.state_cost(xs) + lerp_eval(phi_conj.values, fs))


def expectation_filter(J: GridFn, disturbance: Disturbance) -> GridFn:
    """E_w LERP[J](x + w) at every grid state"""
    xs = J.grid.points()
    acc = np.zeros(xs.shape[0])
    for w, p in disturbance.outcomes():
        acc += p * lerp_eval(J, xs + w)
    return GridFn(J.grid, acc)
