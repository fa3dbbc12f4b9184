"""
Cost catalog with closed-form conjugates over boxes and balls

Every cost is a vectorized callable on (k, d) point arrays returning (k,)
values, and knows its conjugate restricted to a box:
    C*(v) = max_{u in box} <v, u> - C(u).
"""
import logging
from typing import Callable

import numpy as np

from grid import Box

logger = logging.getLogger(__name__)


def _points(u) -> np.ndarray:
    return np.atleast_2d(np.asarray(u, dtype=float))


def check_spd(R) -> np.ndarray:
    """Return R as a float matrix after checking symmetry and positive definiteness"""
    R = np.atleast_2d(np.asarray(R, dtype=float))
    if R.shape[0] != R.shape[1]:
        raise ValueError(f"R must be square, got shape {R.shape}")
    if not np.allclose(R, R.T, rtol=1e-12, atol=1e-12):
        raise ValueError("R must be symmetric")
    if np.min(np.linalg.eigvalsh(R)) <= 0:
        raise ValueError("R must be positive definite")
    return R


class QuadraticCost:
    """u' R u"""
    name = 'quadratic'

    def __init__(self, R):
        self.R = check_spd(R)
        self.diagonal = bool(np.allclose(self.R, np.diag(np.diag(self.R)), rtol=0, atol=0))

    def __call__(self, u) -> np.ndarray:
        u = _points(u)
        return np.einsum('ki,ij,kj->k', u, self.R, u)

    def conjugate_on_box(self, v, box: Box) -> np.ndarray:
        v = _points(v)
        if self.diagonal:
            u_hat = np.clip(v / (2.0 * np.diag(self.R)), box.lo, box.hi)
        else:
            u_hat = self._box_qp(v, box)
        return np.einsum('ki,ki->k', v, u_hat) - self(u_hat)

    def _box_qp(self, v: np.ndarray, box: Box, sweeps: int = 500, tol: float = 1e-14) -> np.ndarray:
        # Coordinate ascent on a strictly concave quadratic over a box
        R = self.R
        u = np.clip(np.linalg.solve(2.0 * R, v.T).T, box.lo, box.hi)
        for _ in range(sweeps):
            prev = u.copy()
            for i in range(R.shape[0]):
                coupling = 2.0 * (u @ R[i] - u[:, i] * R[i, i])
                u[:, i] = np.clip((v[:, i] - coupling) / (2.0 * R[i, i]), box.lo[i], box.hi[i])
            if np.max(np.abs(u - prev)) <= tol:
                break
        return u

    def conjugate_on_ball(self, v, radius: float) -> np.ndarray:
        v = _points(v)
        lam, Q = np.linalg.eigh(self.R)
        vt = v @ Q
        u_free = vt / (2.0 * lam)
        norms = np.linalg.norm(u_free, axis=1)
        inside = norms <= radius

        # Multiplier mu >= 0 with |(2R + 2 mu I)^-1 v| = radius, by bisection
        lo = np.zeros(v.shape[0])
        hi = np.linalg.norm(v, axis=1) / (2.0 * radius) + 1.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            n_mid = np.linalg.norm(vt / (2.0 * lam[None, :] + 2.0 * mid[:, None]), axis=1)
            too_long = n_mid > radius
            lo = np.where(too_long, mid, lo)
            hi = np.where(too_long, hi, mid)
        mu = np.where(inside, 0.0, hi)
        ut = vt / (2.0 * lam[None, :] + 2.0 * mu[:, None])
        u_hat = ut @ Q.T
        return np.einsum('ki,ki->k', v, u_hat) - self(u_hat)


class L1Cost:
    """sum_i |u_i|"""
    name = 'l1'

    def __call__(self, u) -> np.ndarray:
        return np.sum(np.abs(_points(u)), axis=1)

    def conjugate_on_box(self, v, box: Box) -> np.ndarray:
        v = _points(v)
        # Concave piecewise-linear per dimension: maximum at lo, hi or the kink
        kink = np.clip(0.0, box.lo, box.hi)
        candidates = [
            v * box.lo - np.abs(box.lo),
            v * box.hi - np.abs(box.hi),
            v * kink - np.abs(kink),
        ]
        return np.sum(np.maximum.reduce(candidates), axis=1)


class ExpL1Cost:
    """sum_i exp(|u_i|) - 1"""
    name = 'expl1'

    def __call__(self, u) -> np.ndarray:
        return np.sum(np.exp(np.abs(_points(u))) - 1.0, axis=1)

    def conjugate_on_box(self, v, box: Box) -> np.ndarray:
        v = _points(v)
        with np.errstate(divide='ignore'):
            magnitude = np.maximum(0.0, np.log(np.abs(v)))
        u_hat = np.clip(np.sign(v) * magnitude, box.lo, box.hi)
        return np.sum(v * u_hat - np.exp(np.abs(u_hat)) + 1.0, axis=1)


class LinearCost:
    """<c, u>"""
    name = 'linear'

    def __init__(self, c):
        self.c = np.atleast_1d(np.asarray(c, dtype=float))

    def __call__(self, u) -> np.ndarray:
        return _points(u) @ self.c

    def conjugate_on_box(self, v, box: Box) -> np.ndarray:
        shifted = _points(v) - self.c
        return np.sum(np.maximum(shifted * box.lo, shifted * box.hi), axis=1)


class ZeroCost:
    name = 'zero'

    def __call__(self, u) -> np.ndarray:
        return np.zeros(_points(u).shape[0])

    def conjugate_on_box(self, v, box: Box) -> np.ndarray:
        return LinearCost(np.zeros(box.dims)).conjugate_on_box(v, box)


def build_cost(kind: str, dims: int, params: dict = None):
    """Factory for catalog costs by name"""
    params = params or {}
    kind = kind.lower()
    if kind == 'quadratic':
        R = params.get('R')
        R = np.eye(dims) * float(params.get('weight', 1.0)) if R is None else R
        return QuadraticCost(R)
    if kind == 'l1':
        return L1Cost()
    if kind == 'expl1':
        return ExpL1Cost()
    if kind == 'linear':
        return LinearCost(params.get('c', np.zeros(dims)))
    if kind == 'zero':
        return ZeroCost()
    raise ValueError(f"Unknown cost kind '{kind}'")


def conj_quad_ball(R, radius: float) -> Callable[[np.ndarray], np.ndarray]:
    """Conjugate of u' R u restricted to the ball |u| <= radius"""
    if radius <= 0:
        raise ValueError("Ball radius must be positive")
    cost = QuadraticCost(R)
    return lambda v: cost.conjugate_on_ball(v, radius)


def conj_quad_box(R, box: Box) -> Callable[[np.ndarray], np.ndarray]:
    """Conjugate of u' R u restricted to a box containing the origin"""
    cost = QuadraticCost(R)
    return lambda v: cost.conjugate_on_box(v, box)


def conj_l1_box(box: Box) -> Callable[[np.ndarray], np.ndarray]:
    """Conjugate of |u|_1 restricted to a box"""
    return lambda v: L1Cost().conjugate_on_box(v, box)


def conj_expl1_box(box: Box) -> Callable[[np.ndarray], np.ndarray]:
    """
    Conjugate of sum_i exp(|u_i|) - 1 restricted to a box

    Per dimension the maximizer is clip(sign(v) * max(0, ln|v|), lo, hi),
    which gives the value 0 at v = 0.
    """
    return lambda v: ExpL1Cost().conjugate_on_box(v, box)
