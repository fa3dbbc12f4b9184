"""
Geometric utilities over boxes and grids: diameters, distances, one-sided Hausdorff distance
"""
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .grid import Grid, _as_points


@dataclass(frozen=True)
class Box:
    """Axis-aligned box [lo, hi]"""
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lo, dtype=float))
        hi = np.atleast_1d(np.asarray(self.hi, dtype=float))
        if lo.shape != hi.shape:
            raise ValueError("Box bounds must have the same shape")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise ValueError("Box bounds must be finite")
        if np.any(lo > hi):
            raise ValueError(f"Box requires lo <= hi, got lo={lo.tolist()} hi={hi.tolist()}")
        object.__setattr__(self, 'lo', lo)
        object.__setattr__(self, 'hi', hi)

    @property
    def dims(self) -> int:
        return int(self.lo.size)

    @property
    def width(self) -> np.ndarray:
        return self.hi - self.lo

    def contains(self, x, rtol: float = 1e-9) -> np.ndarray:
        """Membership with an absolute slack of rtol times the box width per side"""
        pts = _as_points(x, self.dims)
        slack = rtol * np.maximum(self.width, 1.0)
        return np.all((pts >= self.lo - slack) & (pts <= self.hi + slack), axis=1)

    def clip(self, x) -> np.ndarray:
        return np.clip(x, self.lo, self.hi)

    @classmethod
    def of_grid(cls, grid: Grid) -> "Box":
        return cls(grid.lo, grid.hi)


def diam_box(box: Box) -> float:
    return float(np.linalg.norm(box.width))


def diam_grid(grid: Grid) -> float:
    return float(np.linalg.norm(grid.hi - grid.lo))


def _axis_distance(values: np.ndarray, coords: np.ndarray) -> np.ndarray:
    """Distance from each value to the nearest coordinate of a sorted array"""
    pos = np.searchsorted(coords, values)
    left = coords[np.clip(pos - 1, 0, coords.size - 1)]
    right = coords[np.clip(pos, 0, coords.size - 1)]
    return np.minimum(np.abs(values - left), np.abs(values - right))


def dist_point_to_grid(x, grid: Grid) -> Union[float, np.ndarray]:
    """
    Euclidean distance from point(s) to the nearest grid point

    The nearest point of a product set is found dimension by dimension.
    """
    pts = _as_points(x, grid.dims)
    sq = np.zeros(pts.shape[0])
    for d, c in enumerate(grid.coords):
        sq += _axis_distance(pts[:, d], c) ** 2
    out = np.sqrt(sq)
    return float(out[0]) if np.ndim(x) <= 1 and out.size == 1 else out


def one_sided_hausdorff(from_box: Box, to_grid: Grid) -> float:
    """
    sup over the box of the distance to the nearest grid point

    Per dimension the distance to a sorted coordinate set is piecewise linear,
    so its maximum over an interval sits at an endpoint or at a midpoint
    between consecutive coordinates. The squared per-dimension maxima add up.
    """
    if from_box.dims != to_grid.dims:
        raise ValueError("Box and grid dimensions differ")
    total = 0.0
    for d, c in enumerate(to_grid.coords):
        a, b = from_box.lo[d], from_box.hi[d]
        mids = 0.5 * (c[:-1] + c[1:])
        candidates = np.concatenate(([a, b], mids[(mids >= a) & (mids <= b)]))
        total += float(np.max(_axis_distance(candidates, c))) ** 2
    return float(np.sqrt(total))


def one_sided_hausdorff_points(points, to_grid: Grid) -> float:
    """max over a finite point set of the distance to the nearest grid point"""
    dist = dist_point_to_grid(np.atleast_2d(points), to_grid)
    return float(np.max(dist))


def subgrid_interior(grid: Grid) -> Grid:
    """Strip the first and last coordinate in every dimension"""
    if any(c.size < 3 for c in grid.coords):
        raise ValueError(f"Sub-grid extraction needs at least 3 points per dimension, got {grid.shape}")
    return Grid([c[1:-1] for c in grid.coords])


def as_box(lo: Sequence[float], hi: Sequence[float]) -> Box:
    return Box(np.asarray(lo, dtype=float), np.asarray(hi, dtype=float))
