"""
Linear-time Legendre transform (LLT) and discrete conjugation utilities

The discrete conjugate of h over a finite set X is
    h*(y) = max_{x in X} <y, x> - h(x).
On a grid it factorizes into 1-D conjugates taken dimension by dimension.
"""
import logging
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from grid import Grid, GridFn, SlopeBox, lerp_eval

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConjugateResult:
    """Discrete conjugate table on a dual grid"""
    dual_grid: Grid
    values: GridFn

    def __call__(self, y) -> np.ndarray:
        return approx_conjugate(self, y)


def _lower_hull(xs: List[float], hs: List[float]):
    """Monotone-chain lower convex hull over points sorted by abscissa"""
    hx: List[float] = []
    hh: List[float] = []
    for x, h in zip(xs, hs):
        while len(hx) >= 2:
            x0, h0 = hx[-2], hh[-2]
            x1, h1 = hx[-1], hh[-1]
            # Drop the middle vertex when it does not lie strictly below the chord
            if (h1 - h0) * (x - x1) >= (h - h1) * (x1 - x0):
                hx.pop()
                hh.pop()
            else:
                break
        hx.append(x)
        hh.append(h)
    return hx, hh


def _llt_sorted(xs: List[float], hs: List[float], ys: List[float]) -> List[float]:
    """Core LLT on finite, sorted data: hull, then one merge pass with the dual points"""
    hx, hh = _lower_hull(xs, hs)
    slopes = [(hh[k + 1] - hh[k]) / (hx[k + 1] - hx[k]) for k in range(len(hx) - 1)]
    out = []
    k = 0
    last = len(slopes)
    for y in ys:
        while k < last and slopes[k] < y:
            k += 1
        out.append(y * hx[k] - hh[k])
    return out


def _check_increasing(arr: np.ndarray, name: str):
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"{name} must be a nonempty 1-D array")
    if arr.size > 1 and np.any(np.diff(arr) <= 0):
        raise ValueError(f"{name} must be strictly increasing")


def llt_1d(xs: Sequence[float], vals: Sequence[float], ys: Sequence[float]) -> np.ndarray:
    """
    Discrete conjugate of a 1-D sampled function on sorted dual points

    Args:
        xs: Strictly increasing primal points
        vals: Function values at xs, +inf allowed
        ys: Strictly increasing dual points

    Returns:
        Array of max_x {y*x - h(x)} for every y in ys
    """
    xs = np.asarray(xs, dtype=float)
    vals = np.asarray(vals, dtype=float)
    ys = np.asarray(ys, dtype=float)
    _check_increasing(xs, 'xs')
    _check_increasing(ys, 'ys')
    if vals.shape != xs.shape:
        raise ValueError("xs and vals must have the same length")
    if np.isnan(vals).any():
        raise ValueError("vals must not contain NaN")
    finite = np.isfinite(vals)
    if not finite.any():
        raise ValueError("llt_1d needs at least one finite value")
    return np.array(_llt_sorted(xs[finite].tolist(), vals[finite].tolist(), ys.tolist()))


def llt_nd(f: GridFn, dual_grid: Grid) -> ConjugateResult:
    """
    Factorized n-D LLT

    The conjugate is taken along dimension 0 for every slice, then along
    dimension 1 on the negated intermediate, and so on. A slice with no
    finite entry yields -inf, which the next pass reads as +inf.
    """
    grid = f.grid
    if grid.dims != dual_grid.dims:
        raise ValueError(f"Dimension mismatch: primal {grid.dims}, dual {dual_grid.dims}")

    current = f.tensor.astype(float, copy=True)
    for d in range(grid.dims):
        xs = grid.coords[d].tolist()
        ys = dual_grid.coords[d].tolist()
        if d > 0:
            current = -current

        moved = np.moveaxis(current, d, -1)
        lead_shape = moved.shape[:-1]
        rows = moved.reshape(-1, moved.shape[-1])
        out = np.empty((rows.shape[0], len(ys)))
        for r in range(rows.shape[0]):
            row = rows[r]
            finite = np.isfinite(row)
            if not finite.any():
                out[r] = -np.inf
            elif finite.all():
                out[r] = _llt_sorted(xs, row.tolist(), ys)
            else:
                idx = np.flatnonzero(finite)
                out[r] = _llt_sorted([xs[i] for i in idx], row[idx].tolist(), ys)
        current = np.moveaxis(out.reshape(lead_shape + (len(ys),)), -1, d)

    return ConjugateResult(dual_grid=dual_grid, values=GridFn(dual_grid, current.ravel()))


def brute_conjugate(f: GridFn, y) -> np.ndarray:
    """
    Exact enumeration of max_x <y, x> - h(x)

    Args:
        f: Discrete function
        y: One dual point (n,) or a batch (k, n)

    Returns:
        Array of shape (k,)
    """
    mask = f.finite_mask
    pts = f.grid.points()[mask]
    vals = f.values[mask]
    ys = np.atleast_2d(np.asarray(y, dtype=float))
    if f.grid.dims == 1 and ys.shape[0] == 1 and ys.shape[1] != 1:
        ys = ys.reshape(-1, 1)
    if ys.shape[1] != f.grid.dims:
        raise ValueError(f"Dual points need {f.grid.dims} coordinates")
    return np.max(ys @ pts.T - vals[None, :], axis=1)


def slope_range(f: GridFn) -> SlopeBox:
    """
    Per-dimension slope box from finite first forward and last backward differences

    Differences with a +inf endpoint are skipped. A dimension without any
    finite difference gets (0, 0) and is flagged degenerate.
    """
    grid = f.grid
    tensor = f.tensor
    lower = np.zeros(grid.dims)
    upper = np.zeros(grid.dims)
    degenerate = []

    for d, c in enumerate(grid.coords):
        if c.size < 2:
            degenerate.append(True)
            continue
        rows = np.moveaxis(tensor, d, -1).reshape(-1, c.size)
        with np.errstate(invalid='ignore'):
            diffs = np.diff(rows, axis=1) / np.diff(c)[None, :]
        valid = np.isfinite(rows[:, :-1]) & np.isfinite(rows[:, 1:])
        has_any = valid.any(axis=1)
        if not has_any.any():
            logger.warning(f"⚠️ Slope range of dimension {d} is degenerate (fewer than 2 finite collinear points)")
            degenerate.append(True)
            continue
        first = np.argmax(valid, axis=1)
        last = valid.shape[1] - 1 - np.argmax(valid[:, ::-1], axis=1)
        r = np.flatnonzero(has_any)
        lower[d] = float(np.min(diffs[r, first[r]]))
        upper[d] = float(np.max(diffs[r, last[r]]))
        degenerate.append(False)

    return SlopeBox(lower=lower, upper=upper, degenerate=tuple(degenerate))


def approx_conjugate(conj: ConjugateResult, y) -> np.ndarray:
    """LERP of a conjugate table, an over-approximation of the discrete conjugate"""
    return lerp_eval(conj.values, y)
