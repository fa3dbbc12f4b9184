"""
Rectangular grids, discrete functions on them and the LERP extension

Values of a GridFn are stored row-major with dimension 0 slowest, which is
the layout produced by ``np.meshgrid(..., indexing='ij')``.
"""
import logging
from dataclasses import dataclass
from typing import Callable, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)

UNIFORM_RTOL = 1e-12


def _as_points(x, dims: int) -> np.ndarray:
    """Coerce a single point or a batch of points to shape (k, dims)"""
    pts = np.asarray(x, dtype=float)
    if pts.ndim == 0:
        pts = pts.reshape(1, 1)
    elif pts.ndim == 1:
        pts = pts.reshape(1, -1) if pts.shape[0] == dims else pts.reshape(-1, 1)
    if pts.shape[-1] != dims:
        raise ValueError(f"Expected points with {dims} coordinates, got shape {pts.shape}")
    return pts


class Grid:
    """
    Cartesian product of per-dimension sorted coordinate arrays
    """

    def __init__(self, coords: Sequence[Sequence[float]]):
        if len(coords) == 0:
            raise ValueError("A grid needs at least one dimension")

        arrays = []
        flags = []
        for i, c in enumerate(coords):
            arr = np.array(c, dtype=float).ravel()
            if arr.size < 1:
                raise ValueError(f"Dimension {i} has no coordinates")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"Dimension {i} has non-finite coordinates")
            if arr.size > 1 and np.any(np.diff(arr) <= 0):
                raise ValueError(f"Coordinates of dimension {i} must be strictly increasing")
            arr.setflags(write=False)
            arrays.append(arr)
            flags.append(self._detect_uniform(arr))

        self.coords: Tuple[np.ndarray, ...] = tuple(arrays)
        self.uniform_flags: Tuple[bool, ...] = tuple(flags)
        self._points = None

    @staticmethod
    def _detect_uniform(arr: np.ndarray) -> bool:
        if arr.size < 3:
            return arr.size == 2
        steps = np.diff(arr)
        return bool(np.all(np.abs(steps - steps[0]) <= UNIFORM_RTOL * abs(steps[0])))

    @property
    def dims(self) -> int:
        return len(self.coords)

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(c.size for c in self.coords)

    @property
    def size(self) -> int:
        """Cardinality of the grid"""
        return int(np.prod(self.shape))

    @property
    def lo(self) -> np.ndarray:
        return np.array([c[0] for c in self.coords])

    @property
    def hi(self) -> np.ndarray:
        return np.array([c[-1] for c in self.coords])

    def points(self) -> np.ndarray:
        """All grid points as a (size, dims) array in row-major order"""
        if self._points is None:
            mesh = np.meshgrid(*self.coords, indexing='ij')
            pts = np.stack([m.ravel() for m in mesh], axis=1)
            pts.setflags(write=False)
            self._points = pts
        return self._points

    def contains(self, x, atol: float = 0.0) -> np.ndarray:
        """Box membership test of points against co(grid)"""
        pts = _as_points(x, self.dims)
        return np.all((pts >= self.lo - atol) & (pts <= self.hi + atol), axis=1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Grid) or other.dims != self.dims:
            return False
        return all(np.array_equal(a, b) for a, b in zip(self.coords, other.coords))

    def __hash__(self):
        return hash(tuple(c.tobytes() for c in self.coords))

    def __repr__(self) -> str:
        return f"Grid(shape={self.shape}, lo={self.lo.tolist()}, hi={self.hi.tolist()})"


@dataclass(frozen=True)
class CellLocation:
    """Bracketing cell and per-dimension affine weights of located points"""
    cell_index: np.ndarray  # (k, n) int, lower corner of the cell
    weights: np.ndarray     # (k, n) float, outside [0, 1] when extrapolating

    def reconstruct(self, grid: Grid) -> np.ndarray:
        """Rebuild the located coordinates from cell corners and weights"""
        out = np.empty_like(self.weights)
        for d, c in enumerate(grid.coords):
            lower = c[self.cell_index[:, d]]
            upper = c[np.minimum(self.cell_index[:, d] + 1, c.size - 1)]
            out[:, d] = lower + self.weights[:, d] * (upper - lower)
        return out


@dataclass(frozen=True)
class SlopeBox:
    """Per-dimension minimal and maximal slopes of a discrete function"""
    lower: np.ndarray
    upper: np.ndarray
    degenerate: Tuple[bool, ...] = ()

    @property
    def dims(self) -> int:
        return int(self.lower.size)


def make_uniform_grid(lo: Sequence[float], hi: Sequence[float], counts: Sequence[int]) -> Grid:
    """
    Build an equally spaced grid with exact endpoints

    Args:
        lo: Lower corner, one entry per dimension
        hi: Upper corner, one entry per dimension
        counts: Number of points per dimension (at least 2)

    Returns:
        Grid with uniform spacing in every dimension
    """
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    counts = np.atleast_1d(np.asarray(counts, dtype=int))
    if not (lo.size == hi.size == counts.size):
        raise ValueError("lo, hi and counts must have one entry per dimension")
    if np.any(counts < 2):
        raise ValueError(f"Grid counts must be at least 2, got {counts.tolist()}")
    if np.any(lo >= hi):
        raise ValueError(f"Grid bounds must satisfy lo < hi, got lo={lo.tolist()} hi={hi.tolist()}")
    return Grid([np.linspace(a, b, int(k)) for a, b, k in zip(lo, hi, counts)])


def locate(grid: Grid, x) -> CellLocation:
    """
    Find the bracketing cell of each query point

    Interior ties resolve to the lower cell. Points outside co(grid) are
    assigned the nearest boundary cell and get weights outside [0, 1].
    Uniform dimensions use an O(1) index estimate; others use binary search.
    """
    pts = _as_points(x, grid.dims)
    if np.isnan(pts).any():
        raise ValueError("Cannot locate a point with NaN coordinates")

    k = pts.shape[0]
    cells = np.zeros((k, grid.dims), dtype=np.intp)
    weights = np.zeros((k, grid.dims), dtype=float)

    for d, c in enumerate(grid.coords):
        m = c.size
        xd = pts[:, d]
        if m == 1:
            # Single-coordinate dimension: constant along this axis
            cells[:, d] = 0
            weights[:, d] = 0.0
            continue
        if grid.uniform_flags[d]:
            step = (c[-1] - c[0]) / (m - 1)
            with np.errstate(invalid='ignore'):
                idx = np.ceil((xd - c[0]) / step) - 1
            idx = np.clip(np.nan_to_num(idx, nan=0.0, posinf=m - 2, neginf=0), 0, m - 2).astype(np.intp)
            # Snap to the exact searchsorted-left answer
            down = (idx > 0) & (xd <= c[idx])
            idx[down] -= 1
            up = (idx < m - 2) & (xd > c[idx + 1])
            idx[up] += 1
        else:
            idx = np.clip(np.searchsorted(c, xd, side='left') - 1, 0, m - 2)
        lower = c[idx]
        upper = c[idx + 1]
        cells[:, d] = idx
        weights[:, d] = (xd - lower) / (upper - lower)

    return CellLocation(cell_index=cells, weights=weights)


class GridFn:
    """
    Extended-real-valued function sampled on a Grid

    Values are ``+inf`` outside the effective domain; NaN and ``-inf`` are rejected.
    """

    def __init__(self, grid: Grid, values):
        vals = np.array(values, dtype=float).ravel()
        if vals.size != grid.size:
            raise ValueError(f"Expected {grid.size} values for grid {grid.shape}, got {vals.size}")
        if np.isnan(vals).any():
            raise ValueError("GridFn values must not contain NaN")
        if np.isneginf(vals).any():
            raise ValueError("GridFn values must not contain -inf")
        if not np.isfinite(vals).any():
            raise ValueError("GridFn needs at least one finite value (empty effective domain)")
        vals.setflags(write=False)
        self.grid = grid
        self.values = vals

    @classmethod
    def from_function(cls, grid: Grid, fn: Callable[[np.ndarray], np.ndarray]) -> "GridFn":
        """Discretize a vectorized callable over the grid points"""
        return cls(grid, np.asarray(fn(grid.points()), dtype=float))

    @property
    def tensor(self) -> np.ndarray:
        return self.values.reshape(self.grid.shape)

    @property
    def finite_mask(self) -> np.ndarray:
        return np.isfinite(self.values)

    def finite_min(self) -> float:
        return float(self.values[self.finite_mask].min())

    def finite_max(self) -> float:
        return float(self.values[self.finite_mask].max())

    def shifted(self, c: float) -> "GridFn":
        return GridFn(self.grid, self.values + c)

    def __call__(self, x) -> np.ndarray:
        return lerp_eval(self, x)

    def __repr__(self) -> str:
        return f"GridFn(grid={self.grid!r}, finite={int(self.finite_mask.sum())}/{self.values.size})"


def lerp_eval(f: GridFn, x) -> np.ndarray:
    """
    Multilinear interpolation and extrapolation of f at query points

    Args:
        f: Discrete function
        x: One point of shape (n,) or a batch of shape (k, n)

    Returns:
        Array of shape (k,). A corner holding +inf makes the result +inf
        whenever its weight is nonzero.
    """
    grid = f.grid
    loc = locate(grid, x)
    tensor = f.tensor
    k, n = loc.weights.shape

    acc = np.zeros(k)
    hit_inf = np.zeros(k, dtype=bool)
    upper_valid = [c.size > 1 for c in grid.coords]

    for corner in range(1 << n):
        idx = []
        w = np.ones(k)
        for d in range(n):
            bit = (corner >> d) & 1
            if bit and not upper_valid[d]:
                w = None
                break
            idx.append(loc.cell_index[:, d] + bit)
            w = w * (loc.weights[:, d] if bit else 1.0 - loc.weights[:, d])
        if w is None:
            continue
        v = tensor[tuple(idx)]
        inf_corner = np.isinf(v)
        hit_inf |= inf_corner & (w != 0.0)
        acc += w * np.where(inf_corner, 0.0, v)

    return np.where(hit_inf, np.inf, acc)
