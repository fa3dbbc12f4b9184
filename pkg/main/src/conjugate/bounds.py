"""
Error bounds for discrete and LERP-approximated conjugation
"""
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ConjBoundInputs:
    """
    Ingredients of the conjugation error bounds at a dual point y.

    The subgradient-based bound (needs a point of the subdifferential of the
    conjugate at y) is not evaluated; only the Lipschitz-based one is.
    """
    y: np.ndarray
    lipschitz_h: float
    hausdorff_primal: float
    diam_primal: float
    dist_dual: float

    def __post_init__(self):
        for name in ('lipschitz_h', 'hausdorff_primal', 'diam_primal', 'dist_dual'):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")

    def discretization_gap(self) -> float:
        return bound_e_tilde_2(self.y, self.lipschitz_h, self.hausdorff_primal)

    def interpolation_gap(self) -> float:
        return bound_lerp_conj(self.diam_primal, self.dist_dual)


def bound_e_tilde_2(y, lip_h: float, dish_primal: float) -> float:
    """Upper bound (|y| + Lip(h)) * dish(X, X_d) on h*(y) - h*_d(y)"""
    return float((np.linalg.norm(np.atleast_1d(y)) + lip_h) * dish_primal)


def bound_lerp_conj(diam_primal: float, dist_dual: float) -> float:
    """Upper bound diam(X_d) * dist(y, Y_g) on the LERP over-approximation of a discrete conjugate"""
    return float(diam_primal * dist_dual)
