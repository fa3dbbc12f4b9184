"""
Error budgets of the d-CDP operators and of d-DP

cdp1:  -e2 <= T[J](x) - cdp1[J](x) <= e1(x)
cdp2:  -(e2 + e3) <= T[J](x) - cdp2[J](x) <= e1(x)
The distance of the subdifferential of T[J] (or T[J] - C_s) to Y is replaced by the
distance of a caller-supplied slope proxy.
"""
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from conjugate import slope_range
from grid import GridFn, diam_box, diam_grid, dist_point_to_grid, one_sided_hausdorff, one_sided_hausdorff_points
from problem import ControlProblem, DiscretizationPlan
from .dual_grids import DualGridY, DualGridZ


@dataclass(frozen=True)
class ErrorBudget:
    e1: GridFn
    e2: float
    e3: Optional[float] = None

    def __post_init__(self):
        if np.any(self.e1.values < 0) or self.e2 < 0 or (self.e3 is not None and self.e3 < 0):
            raise ValueError("Error budget entries must be nonnegative")

    @property
    def lower(self) -> float:
        """Magnitude of the lower bound on T[J] - T_d[J]"""
        return self.e2 + (self.e3 or 0.0)


def lipschitz_estimate(J: GridFn) -> float:
    """Euclidean norm of the per-dimension max(|lip-|, |lip+|)"""
    slopes = slope_range(J)
    return float(np.linalg.norm(np.maximum(np.abs(slopes.lower), np.abs(slopes.upper))))


def _slope_term(problem: ControlProblem, plan: DiscretizationPlan, Y: DualGridY,
                slope_proxy: np.ndarray, gain_norms: np.ndarray) -> np.ndarray:
    xs = plan.state_grid.points()
    proxy = np.asarray(slope_proxy, dtype=float).reshape(xs.shape[0], problem.n)
    dist = np.atleast_1d(dist_point_to_grid(proxy, Y.grid))
    drift_norms = np.linalg.norm(problem.drift(xs), axis=1)
    return (drift_norms + gain_norms * diam_box(problem.input_box) + diam_box(problem.state_box)) * dist


def _state_term(problem: ControlProblem, plan: DiscretizationPlan, Y: DualGridY, J: GridFn) -> float:
    return (diam_grid(Y.grid) + lipschitz_estimate(J)) * one_sided_hausdorff(problem.state_box, plan.state_grid)


def error_budget_alg1(problem: ControlProblem, plan: DiscretizationPlan, Y: DualGridY, J: GridFn,
                      slope_proxy: np.ndarray) -> ErrorBudget:
    """
    e1(x) = [|f_s(x)| + |f_i(x)| diam(U) + diam(X)] * dist(slope_proxy(x), Y_g)
    e2 = [diam(Y_g) + Lip(J)] * dish(X, X_g)
    """
    gains = problem.input_gain(plan.state_grid.points())
    gain_norms = np.linalg.norm(gains, ord=2, axis=(1, 2))
    e1 = _slope_term(problem, plan, Y, slope_proxy, gain_norms)
    return ErrorBudget(e1=GridFn(plan.state_grid, e1), e2=_state_term(problem, plan, Y, J))


def error_budget_alg2(problem: ControlProblem, plan: DiscretizationPlan, Y: DualGridY, Z: DualGridZ,
                      J: GridFn, slope_proxy: np.ndarray) -> ErrorBudget:
    """
    e1m(x) uses |B| in place of |f_i(x)|, with slope_proxy for the slope of T[J] - C_s.
    e3 = diam(Y_g) * dish(f_s(X_g), Z_g)
    """
    if problem.input_matrix is None:
        raise ValueError("cdp2 budget requires a constant input matrix B")
    n_states = plan.state_grid.size
    gain_norms = np.full(n_states, np.linalg.norm(problem.input_matrix, ord=2))
    e1 = _slope_term(problem, plan, Y, slope_proxy, gain_norms)
    fs = problem.drift(plan.state_grid.points())
    e3 = diam_grid(Y.grid) * one_sided_hausdorff_points(fs, Z.grid)
    return ErrorBudget(e1=GridFn(plan.state_grid, e1), e2=_state_term(problem, plan, Y, J), e3=float(e3))


def error_budget_ddp(lip_J: float, lip_ext: float, lip_C: float,
                     dish_state: float, dish_input) -> Tuple[float, np.ndarray]:
    """
    d-DP error terms
        e1 = [Lip(J) + Lip(ext J)] * dish(X, X_g)
        e2(x) = [Lip(J) + Lip(C)] * dish(U(x), U_g(x))

    Returns:
        (e1, e2) with e2 shaped like dish_input
    """
    e1 = (lip_J + lip_ext) * dish_state
    e2 = (lip_J + lip_C) * np.asarray(dish_input, dtype=float)
    return float(e1), e2
