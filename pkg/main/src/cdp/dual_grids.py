"""
Dual grid construction for the d-CDP operators

Y: state-dual grid, rebuilt from the current cost-to-go at every step.
Z: grid covering the image f_s(X_g), built once.
V: input-dual grid covering the slope box of the sampled stage cost, built once.
"""
import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from conjugate import ConjugateResult, llt_nd, slope_range
from grid import Grid, GridFn, SlopeBox, make_uniform_grid
from problem import ControlProblem, DiscretizationPlan
from settings import max_pairs

logger = logging.getLogger(__name__)

RELATIVE_PAD = 1e-9
DEGENERATE_HALF_WIDTH = 1e-6
MIN_V_COUNT = 4


@dataclass(frozen=True)
class DualGridY:
    grid: Grid
    c_max: float
    c_min: float
    j_max: float
    j_min: float
    alpha: float
    half_widths: np.ndarray
    degenerate: bool = False


@dataclass(frozen=True)
class DualGridZ:
    grid: Grid
    image_lo: np.ndarray
    image_hi: np.ndarray
    degenerate: bool = False


@dataclass(frozen=True)
class DualGridV:
    grid: Grid
    slopes: SlopeBox
    degenerate: bool = False


def stage_cost_range(problem: ControlProblem, plan: DiscretizationPlan) -> Tuple[float, float]:
    """
    (C^M, C^m) by enumeration

    Separable problems use the input cost over U_g. Joint problems enumerate
    X_g x U_g over admissible pairs (finite cost and f(x, u) in the state box).
    """
    us = plan.input_grid.points()
    if problem.is_separable:
        values = np.asarray(problem.stage_cost.input_cost(us), dtype=float)
        finite = values[np.isfinite(values)]
    else:
        xs = plan.state_grid.points()
        block = max(1, max_pairs() // us.shape[0])
        c_max, c_min = -np.inf, np.inf
        for start in range(0, xs.shape[0], block):
            xb = xs[start:start + block]
            cost = problem.stage_cost_pairs(xb, us)
            nxt = problem.next_states(xb, us)
            inside = problem.state_box.contains(nxt.reshape(-1, problem.n)).reshape(cost.shape)
            admissible = cost[inside & np.isfinite(cost)]
            if admissible.size:
                c_max = max(c_max, float(admissible.max()))
                c_min = min(c_min, float(admissible.min()))
        finite = np.array([c_max, c_min]) if np.isfinite(c_max) else np.array([])
    if finite.size == 0:
        logger.warning(f"⚠️ No admissible stage cost value found for '{problem.name}', using range (0, 0)")
        return 0.0, 0.0
    return float(finite.max()), float(finite.min())


def construct_Y(J: GridFn, problem: ControlProblem, plan: DiscretizationPlan,
                cost_range: Optional[Tuple[float, float]] = None) -> DualGridY:
    """
    Symmetric uniform state-dual grid

    Per dimension the half-width is alpha * (C^M + J^M - C^m - J^m) / diam(X_g_i).
    """
    c_max, c_min = cost_range if cost_range is not None else stage_cost_range(problem, plan)
    j_max, j_min = J.finite_max(), J.finite_min()
    spread = (c_max + j_max) - (c_min + j_min)
    widths = plan.state_grid.hi - plan.state_grid.lo
    counts = plan.resolved_y_counts

    degenerate = not np.isfinite(spread) or spread <= 1e-12 * max(1.0, abs(c_max) + abs(j_max))
    if degenerate:
        logger.warning("⚠️ Degenerate cost range for the Y grid, falling back to [-1, 1] per dimension")
        half = np.ones(problem.n)
    else:
        half = plan.alpha * spread / widths

    grid = make_uniform_grid(-half, half, counts)
    return DualGridY(grid=grid, c_max=c_max, c_min=c_min, j_max=j_max, j_min=j_min,
                     alpha=plan.alpha, half_widths=half, degenerate=degenerate)


def construct_Z(problem: ControlProblem, plan: DiscretizationPlan) -> DualGridZ:
    """Uniform grid over the padded bounding box of f_s(X_g)"""
    image = problem.drift(plan.state_grid.points())
    lo = image.min(axis=0)
    hi = image.max(axis=0)
    scale = np.maximum(1.0, np.maximum(np.abs(lo), np.abs(hi)))

    flat = (hi - lo) <= 1e-12 * scale
    degenerate = bool(flat.any())
    if degenerate:
        logger.warning(f"⚠️ f_s(X_g) is flat in dimensions {np.flatnonzero(flat).tolist()}, inflating the Z box")
    center = 0.5 * (lo + hi)
    z_lo = np.where(flat, center - DEGENERATE_HALF_WIDTH * scale, lo - RELATIVE_PAD * scale)
    z_hi = np.where(flat, center + DEGENERATE_HALF_WIDTH * scale, hi + RELATIVE_PAD * scale)

    grid = make_uniform_grid(z_lo, z_hi, plan.resolved_z_counts)
    return DualGridZ(grid=grid, image_lo=lo, image_hi=hi, degenerate=degenerate)


def construct_V(Cfn: GridFn, counts: Optional[Sequence[int]] = None) -> DualGridV:
    """
    Uniform input-dual grid whose interior covers the slope box of Cfn

    With k points per dimension the step is h = (lip+ - lip-) / (k - 3), so the
    grid spans [lip- - h, lip+ + h].
    """
    slopes = slope_range(Cfn)
    counts = list(counts) if counts is not None else list(Cfn.grid.shape)
    if any(k < MIN_V_COUNT for k in counts):
        logger.debug(f"V counts {counts} raised to at least {MIN_V_COUNT}")
        counts = [max(k, MIN_V_COUNT) for k in counts]

    lo = np.empty(slopes.dims)
    hi = np.empty(slopes.dims)
    degenerate = False
    for d in range(slopes.dims):
        width = slopes.upper[d] - slopes.lower[d]
        scale = max(1.0, abs(slopes.lower[d]), abs(slopes.upper[d]))
        if slopes.degenerate[d] or width <= 1e-12 * scale:
            center = 0.5 * (slopes.lower[d] + slopes.upper[d])
            lo[d], hi[d] = center - 1.0, center + 1.0
            degenerate = True
        else:
            step = width / (counts[d] - 3)
            lo[d], hi[d] = slopes.lower[d] - step, slopes.upper[d] + step
    if degenerate:
        logger.warning("⚠️ Degenerate slope range for the V grid, using a unit box fallback")

    return DualGridV(grid=make_uniform_grid(lo, hi, counts), slopes=slopes, degenerate=degenerate)


def numeric_conj_stage_cost(Cfn: GridFn, V: DualGridV) -> ConjugateResult:
    """Discrete conjugate of a sampled stage cost on its V grid"""
    return llt_nd(Cfn, V.grid)
