"""
Problem definitions: input-affine control problems, disturbances, discretization plans
and value-iteration results
"""
import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from grid import Box, Grid, GridFn, make_uniform_grid, save_gridfn_csv

logger = logging.getLogger(__name__)

ArrayFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class Disturbance:
    """Additive disturbance with finite support and a probability mass function"""
    support: np.ndarray
    pmf: np.ndarray

    def __post_init__(self):
        support = np.atleast_2d(np.asarray(self.support, dtype=float))
        pmf = np.atleast_1d(np.asarray(self.pmf, dtype=float))
        if support.shape[0] != pmf.size:
            raise ValueError("Disturbance support and pmf sizes differ")
        if np.any(pmf < 0):
            raise ValueError("Disturbance pmf must be nonnegative")
        if abs(pmf.sum() - 1.0) > 1e-12:
            raise ValueError(f"Disturbance pmf must sum to 1, got {pmf.sum()!r}")
        if np.unique(support, axis=0).shape[0] != support.shape[0]:
            raise ValueError("Disturbance support points must be distinct")
        object.__setattr__(self, 'support', support)
        object.__setattr__(self, 'pmf', pmf)

    @classmethod
    def uniform(cls, support) -> "Disturbance":
        support = np.atleast_2d(np.asarray(support, dtype=float))
        return cls(support, np.full(support.shape[0], 1.0 / support.shape[0]))

    @classmethod
    def product_uniform(cls, *axes: Sequence[float]) -> "Disturbance":
        """Uniform pmf over the Cartesian product of per-dimension supports"""
        mesh = np.meshgrid(*[np.asarray(a, dtype=float) for a in axes], indexing='ij')
        return cls.uniform(np.stack([m.ravel() for m in mesh], axis=1))

    @property
    def dims(self) -> int:
        return int(self.support.shape[1])

    @property
    def size(self) -> int:
        return int(self.support.shape[0])

    def outcomes(self):
        """(w, p) pairs with p > 0; zero-mass points never enter an expectation"""
        for w, p in zip(self.support, self.pmf):
            if p > 0:
                yield w, float(p)

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        """Inverse-CDF draw of one support point"""
        cdf = np.cumsum(self.pmf)
        idx = int(np.searchsorted(cdf, rng.random(), side='right'))
        return self.support[min(idx, self.size - 1)]


@dataclass(frozen=True, eq=False)
class JointStageCost:
    """Stage cost C(x, u), +inf where a state-dependent input constraint fails"""
    cost: Callable[[np.ndarray, np.ndarray], np.ndarray]
    conjugate: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None  # C_x*(v)


@dataclass(frozen=True, eq=False)
class SeparableStageCost:
    """Stage cost C_s(x) + C_i(u)"""
    state_cost: ArrayFn
    input_cost: ArrayFn
    input_conjugate: Optional[ArrayFn] = None  # C_i*(v)


StageCost = Union[JointStageCost, SeparableStageCost]


@dataclass(frozen=True, eq=False)
class ControlProblem:
    """
    Finite-horizon input-affine problem x+ = f_s(x) + f_i(x) u (+ w)

    Exactly one of input_matrix (constant B) or input_dynamics (f_i) is set.
    The separable stage-cost form requires a constant B.
    """
    name: str
    n: int
    m: int
    horizon: int
    state_dynamics: ArrayFn
    stage_cost: StageCost
    terminal_cost: ArrayFn
    state_box: Box
    input_box: Box
    input_matrix: Optional[np.ndarray] = None
    input_dynamics: Optional[Callable[[np.ndarray], np.ndarray]] = None
    disturbance: Optional[Disturbance] = None
    default_alpha: float = 1.0
    fingerprint: str = ''

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("Horizon must be a positive integer")
        if (self.input_matrix is None) == (self.input_dynamics is None):
            raise ValueError("Provide exactly one of input_matrix (B) or input_dynamics (f_i)")
        if self.input_matrix is not None:
            B = np.asarray(self.input_matrix, dtype=float).reshape(self.n, self.m)
            object.__setattr__(self, 'input_matrix', B)
        if isinstance(self.stage_cost, SeparableStageCost) and self.input_matrix is None:
            raise ValueError("The separable stage-cost form requires a constant input matrix B")
        if not isinstance(self.stage_cost, (JointStageCost, SeparableStageCost)):
            raise ValueError("stage_cost must be a JointStageCost or a SeparableStageCost")
        if self.state_box.dims != self.n or self.input_box.dims != self.m:
            raise ValueError("Box dimensions do not match (n, m)")
        if self.disturbance is not None and self.disturbance.dims != self.n:
            raise ValueError("Disturbance dimension must equal the state dimension")

    @property
    def is_separable(self) -> bool:
        return isinstance(self.stage_cost, SeparableStageCost)

    @property
    def has_analytic_conjugate(self) -> bool:
        if self.is_separable:
            return self.stage_cost.input_conjugate is not None
        return self.stage_cost.conjugate is not None

    def with_horizon(self, horizon: int) -> "ControlProblem":
        return replace(self, horizon=int(horizon), fingerprint=f"{self.fingerprint}|T={horizon}")

    def with_disturbance(self, disturbance: Optional[Disturbance]) -> "ControlProblem":
        tag = 'none' if disturbance is None else f"W{disturbance.support.tobytes().hex()[:32]}"
        return replace(self, disturbance=disturbance, fingerprint=f"{self.fingerprint}|{tag}")

    # Dynamics -------------------------------------------------------------

    def input_gain(self, xs: np.ndarray) -> np.ndarray:
        """f_i at each state, shape (k, n, m)"""
        xs = np.atleast_2d(xs)
        if self.input_matrix is not None:
            return np.broadcast_to(self.input_matrix, (xs.shape[0], self.n, self.m))
        return np.asarray(self.input_dynamics(xs), dtype=float).reshape(xs.shape[0], self.n, self.m)

    def drift(self, xs: np.ndarray) -> np.ndarray:
        xs = np.atleast_2d(xs)
        return np.asarray(self.state_dynamics(xs), dtype=float).reshape(xs.shape[0], self.n)

    def next_states(self, xs: np.ndarray, us: np.ndarray) -> np.ndarray:
        """f(x, u) for every state/input combination, shape (k_x, k_u, n)"""
        fs = self.drift(xs)
        us = np.atleast_2d(us)
        if self.input_matrix is not None:
            return fs[:, None, :] + (us @ self.input_matrix.T)[None, :, :]
        return fs[:, None, :] + np.einsum('knm,um->kun', self.input_gain(xs), us)

    def dynamics(self, x: np.ndarray, u: np.ndarray) -> np.ndarray:
        """f(x, u) for paired rows of x and u, shape (k, n)"""
        x = np.atleast_2d(x)
        u = np.atleast_2d(u)
        return self.drift(x) + np.einsum('knm,km->kn', self.input_gain(x), u)

    # Costs ----------------------------------------------------------------

    def stage_cost_pairs(self, xs: np.ndarray, us: np.ndarray) -> np.ndarray:
        """C(x, u) for every state/input combination, shape (k_x, k_u)"""
        xs = np.atleast_2d(xs)
        us = np.atleast_2d(us)
        if self.is_separable:
            cs = np.asarray(self.stage_cost.state_cost(xs), dtype=float)
            ci = np.asarray(self.stage_cost.input_cost(us), dtype=float)
            return cs[:, None] + ci[None, :]
        kx, ku = xs.shape[0], us.shape[0]
        values = self.stage_cost.cost(np.repeat(xs, ku, axis=0), np.tile(us, (kx, 1)))
        return np.asarray(values, dtype=float).reshape(kx, ku)

    def stage_cost_value(self, x: np.ndarray, u: np.ndarray) -> np.ndarray:
        """C(x, u) for paired rows, shape (k,)"""
        x = np.atleast_2d(x)
        u = np.atleast_2d(u)
        if self.is_separable:
            return np.asarray(self.stage_cost.state_cost(x), dtype=float) + \
                np.asarray(self.stage_cost.input_cost(u), dtype=float)
        return np.asarray(self.stage_cost.cost(x, u), dtype=float)

    def state_cost(self, xs: np.ndarray) -> np.ndarray:
        return np.asarray(self.stage_cost.state_cost(np.atleast_2d(xs)), dtype=float)

    def terminal_value(self, xs: np.ndarray) -> np.ndarray:
        return np.asarray(self.terminal_cost(np.atleast_2d(xs)), dtype=float)

    def partial_conjugate(self, xs: np.ndarray, v: np.ndarray) -> np.ndarray:
        """
        Analytic C_x*(v) for paired rows of x and v

        For the separable form this is C_i*(v) - C_s(x).
        """
        if not self.has_analytic_conjugate:
            raise ValueError(f"Problem '{self.name}' has no analytic stage-cost conjugate")
        if self.is_separable:
            return np.asarray(self.stage_cost.input_conjugate(v), dtype=float) - self.state_cost(xs)
        return np.asarray(self.stage_cost.conjugate(xs, v), dtype=float)

    def input_conjugate(self, v: np.ndarray) -> np.ndarray:
        if not self.is_separable or self.stage_cost.input_conjugate is None:
            raise ValueError(f"Problem '{self.name}' has no analytic input-cost conjugate")
        return np.asarray(self.stage_cost.input_conjugate(np.atleast_2d(v)), dtype=float)


@dataclass(frozen=True, eq=False)
class DiscretizationPlan:
    """Primal grids plus size hints for the dual grids Y, Z and V"""
    state_grid: Grid
    input_grid: Grid
    y_counts: Optional[Tuple[int, ...]] = None
    z_counts: Optional[Tuple[int, ...]] = None
    v_counts: Optional[Tuple[int, ...]] = None
    alpha: float = 1.0
    numeric_conjugate: bool = False

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        for name in ('y_counts', 'z_counts', 'v_counts'):
            counts = getattr(self, name)
            if counts is not None:
                counts = tuple(int(c) for c in counts)
                if any(c < 2 for c in counts):
                    raise ValueError(f"{name} entries must be at least 2")
                object.__setattr__(self, name, counts)

    def validate(self, problem: ControlProblem):
        """Check that the plan fits the problem dimensions and boxes"""
        if self.state_grid.dims != problem.n or self.input_grid.dims != problem.m:
            raise ValueError("Plan grid dimensions do not match the problem")
        if not problem.state_box.contains(self.state_grid.points()).all():
            raise ValueError("State grid leaves the state box")
        if not problem.input_box.contains(self.input_grid.points()).all():
            raise ValueError("Input grid leaves the input box")
        for name, dims in (('y_counts', problem.n), ('z_counts', problem.n), ('v_counts', problem.m)):
            counts = getattr(self, name)
            if counts is not None and len(counts) != dims:
                raise ValueError(f"{name} needs {dims} entries")

    @property
    def resolved_y_counts(self) -> Tuple[int, ...]:
        return self.y_counts or self.state_grid.shape

    @property
    def resolved_z_counts(self) -> Tuple[int, ...]:
        return self.z_counts or self.state_grid.shape

    @property
    def resolved_v_counts(self) -> Tuple[int, ...]:
        return self.v_counts or self.input_grid.shape


def make_plan(problem: ControlProblem, n_state: int, n_input: Optional[int] = None,
              alpha: Optional[float] = None, y_counts=None, z_counts=None, v_counts=None,
              numeric_conjugate: bool = False) -> DiscretizationPlan:
    """
    Uniform plan with n_state points per state dimension and n_input per input dimension

    n_input defaults to n_state; alpha defaults to the problem's own value.
    """
    n_input = n_state if n_input is None else n_input

    def expand(counts, dims):
        if counts is None:
            return None
        counts = [int(counts)] * dims if np.isscalar(counts) else [int(c) for c in counts]
        return tuple(counts)

    plan = DiscretizationPlan(
        state_grid=make_uniform_grid(problem.state_box.lo, problem.state_box.hi, [n_state] * problem.n),
        input_grid=make_uniform_grid(problem.input_box.lo, problem.input_box.hi, [n_input] * problem.m),
        y_counts=expand(y_counts, problem.n),
        z_counts=expand(z_counts, problem.n),
        v_counts=expand(v_counts, problem.m),
        alpha=problem.default_alpha if alpha is None else float(alpha),
        numeric_conjugate=numeric_conjugate,
    )
    plan.validate(problem)
    return plan


@dataclass
class ValueIterationResult:
    """Costs-to-go J_0..J_T on the state grid, optional d-DP control laws and timings"""
    algorithm: str
    costs: List[GridFn]
    policies: Optional[List[Tuple[GridFn, ...]]] = None
    step_times: List[float] = field(default_factory=list)
    metadata: Dict[str, object] = field(default_factory=dict)

    @property
    def horizon(self) -> int:
        return len(self.costs) - 1

    @property
    def total_time(self) -> float:
        return float(sum(self.step_times))

    @property
    def state_grid(self) -> Grid:
        return self.costs[0].grid

    def save(self, directory: Union[str, Path]):
        """Write one CSV per time step and a timing JSON"""
        out = Path(directory)
        out.mkdir(parents=True, exist_ok=True)
        for t, J in enumerate(self.costs):
            save_gridfn_csv(J, out / f"J_{t:03d}.csv")
        if self.policies is not None:
            for t, law in enumerate(self.policies):
                for j, component in enumerate(law):
                    save_gridfn_csv(component, out / f"mu_{t:03d}_u{j + 1}.csv")
        timing = {
            'algorithm': self.algorithm,
            'step_times': self.step_times,
            'total_time': self.total_time,
            'metadata': {k: v for k, v in self.metadata.items() if isinstance(v, (int, float, str, list))},
        }
        with open(out / 'timing.json', 'w') as fh:
            json.dump(timing, fh, indent=2)
        logger.info(f"💾 Value iteration result written to {out}")
