"""
Named benchmark problems

synthetic_separable / synthetic_joint: linear 2-state, 2-input system on [-1,1]^2
with quadratic state cost and exponential input cost; the joint variant adds the
state-dependent input constraint x + u <= (2, 2).
sir: vaccination control of an SIR epidemic model (input-affine, non-constant f_i).
pendulum: Euler-discretized noisy inverted pendulum; some grid states have no
feasible input.
"""
import logging
from dataclasses import replace
from typing import Callable, Dict

import numpy as np

from grid import Box
from .costs import ExpL1Cost, QuadraticCost, conj_expl1_box, conj_quad_box
from .models import ControlProblem, Disturbance, JointStageCost, SeparableStageCost

logger = logging.getLogger(__name__)

SYNTHETIC_A = np.array([[-0.5, 2.0], [1.0, 3.0]])
SYNTHETIC_B = np.array([[1.0, 0.5], [1.0, 1.0]])
SYNTHETIC_NOISE = (-0.1, 0.0, 0.1)

SIR_ALPHA = 2.0
SIR_BETA = 0.1
SIR_GAMMA = 100.0
SIR_U_MAX = 0.8

PENDULUM_TAU = 0.05
PENDULUM_ALPHA = 118.6445
PENDULUM_BETA = -1.599
PENDULUM_GAMMA = 29.5398
PENDULUM_NOISE_STEPS = (-0.05, -0.025, 0.0, 0.025, 0.05)


def _squared_norm(x: np.ndarray) -> np.ndarray:
    return np.sum(np.atleast_2d(x) ** 2, axis=1)


def synthetic_separable() -> ControlProblem:
    input_box = Box(np.full(2, -2.0), np.full(2, 2.0))
    return ControlProblem(
        name='synthetic_separable',
        n=2, m=2, horizon=10,
        state_dynamics=lambda x: np.atleast_2d(x) @ SYNTHETIC_A.T,
        input_matrix=SYNTHETIC_B,
        stage_cost=SeparableStageCost(
            state_cost=_squared_norm,
            input_cost=ExpL1Cost(),
            input_conjugate=conj_expl1_box(input_box),
        ),
        terminal_cost=_squared_norm,
        state_box=Box(np.full(2, -1.0), np.full(2, 1.0)),
        input_box=input_box,
        fingerprint='preset:synthetic_separable',
    )


def _joint_cost(x: np.ndarray, u: np.ndarray) -> np.ndarray:
    admissible = np.all(x + u <= 2.0, axis=1)
    return np.where(admissible, _squared_norm(x) + ExpL1Cost()(u), np.inf)


def _joint_conjugate(x: np.ndarray, v: np.ndarray) -> np.ndarray:
    # Per-dimension input box [-2, min(2, 2 - x_i)] always contains the origin on X
    x = np.atleast_2d(x)
    v = np.atleast_2d(v)
    upper = np.minimum(2.0, 2.0 - x)
    with np.errstate(divide='ignore'):
        magnitude = np.maximum(0.0, np.log(np.abs(v)))
    u_hat = np.clip(np.sign(v) * magnitude, -2.0, upper)
    return np.sum(v * u_hat - np.exp(np.abs(u_hat)) + 1.0, axis=1) - _squared_norm(x)


def synthetic_joint() -> ControlProblem:
    return ControlProblem(
        name='synthetic_joint',
        n=2, m=2, horizon=10,
        state_dynamics=lambda x: np.atleast_2d(x) @ SYNTHETIC_A.T,
        input_matrix=SYNTHETIC_B,
        stage_cost=JointStageCost(cost=_joint_cost, conjugate=_joint_conjugate),
        terminal_cost=_squared_norm,
        state_box=Box(np.full(2, -1.0), np.full(2, 1.0)),
        input_box=Box(np.full(2, -2.0), np.full(2, 2.0)),
        fingerprint='preset:synthetic_joint',
    )


def synthetic_separable_noisy() -> ControlProblem:
    base = synthetic_separable().with_disturbance(Disturbance.product_uniform(SYNTHETIC_NOISE, SYNTHETIC_NOISE))
    return _renamed(base, 'synthetic_separable_noisy')


def synthetic_joint_noisy() -> ControlProblem:
    base = synthetic_joint().with_disturbance(Disturbance.product_uniform(SYNTHETIC_NOISE, SYNTHETIC_NOISE))
    return _renamed(base, 'synthetic_joint_noisy')


def _sir_drift(x: np.ndarray) -> np.ndarray:
    x = np.atleast_2d(x)
    s, i = x[:, 0], x[:, 1]
    return np.stack([s - SIR_ALPHA * s * i, (1.0 - SIR_BETA) * i + SIR_ALPHA * s * i], axis=1)


def _sir_gain(x: np.ndarray) -> np.ndarray:
    x = np.atleast_2d(x)
    s, i = x[:, 0], x[:, 1]
    col = np.stack([-s + SIR_ALPHA * s * i, -SIR_ALPHA * s * i], axis=1)
    return col[:, :, None]


def _sir_cost(x: np.ndarray, u: np.ndarray) -> np.ndarray:
    return SIR_GAMMA * np.atleast_2d(x)[:, 1] + np.atleast_2d(u)[:, 0]


def _sir_conjugate(x: np.ndarray, v: np.ndarray) -> np.ndarray:
    # max over u in [0, u_max] of (v - 1) u, minus gamma * i
    v = np.atleast_2d(v)[:, 0]
    return np.maximum(0.0, SIR_U_MAX * (v - 1.0)) - SIR_GAMMA * np.atleast_2d(x)[:, 1]


def sir() -> ControlProblem:
    return ControlProblem(
        name='sir',
        n=2, m=1, horizon=3,
        state_dynamics=_sir_drift,
        input_dynamics=_sir_gain,
        stage_cost=JointStageCost(cost=_sir_cost, conjugate=_sir_conjugate),
        terminal_cost=lambda x: np.atleast_2d(x)[:, 1].astype(float),
        state_box=Box(np.array([0.0, 0.0]), np.array([1.0, 0.5])),
        input_box=Box(np.array([0.0]), np.array([SIR_U_MAX])),
        default_alpha=0.5,
        fingerprint='preset:sir',
    )


def _pendulum_drift(x: np.ndarray) -> np.ndarray:
    x = np.atleast_2d(x)
    theta, omega = x[:, 0], x[:, 1]
    return np.stack([
        theta + PENDULUM_TAU * omega,
        omega + PENDULUM_TAU * (PENDULUM_ALPHA * np.sin(theta) + PENDULUM_BETA * omega),
    ], axis=1)


def pendulum() -> ControlProblem:
    input_box = Box(np.array([-3.0]), np.array([3.0]))
    steps = np.asarray(PENDULUM_NOISE_STEPS)
    return ControlProblem(
        name='pendulum',
        n=2, m=1, horizon=50,
        state_dynamics=_pendulum_drift,
        # Forward Euler: the input enters the velocity through tau * gamma
        input_matrix=np.array([[0.0], [PENDULUM_TAU * PENDULUM_GAMMA]]),
        stage_cost=SeparableStageCost(
            state_cost=_squared_norm,
            input_cost=QuadraticCost(np.eye(1)),
            input_conjugate=conj_quad_box(np.eye(1), input_box),
        ),
        terminal_cost=_squared_norm,
        state_box=Box(np.array([-np.pi / 4, -np.pi]), np.array([np.pi / 4, np.pi])),
        input_box=input_box,
        disturbance=Disturbance.product_uniform(np.pi / 4 * steps, np.pi * steps),
        fingerprint='preset:pendulum',
    )


def _renamed(problem: ControlProblem, name: str) -> ControlProblem:
    return replace(problem, name=name, fingerprint=f"preset:{name}")


PRESET_FACTORIES: Dict[str, Callable[[], ControlProblem]] = {
    'synthetic_separable': synthetic_separable,
    'synthetic_joint': synthetic_joint,
    'synthetic_separable_noisy': synthetic_separable_noisy,
    'synthetic_joint_noisy': synthetic_joint_noisy,
    'sir': sir,
    'pendulum': pendulum,
}


def presets() -> Dict[str, ControlProblem]:
    """All named problems, freshly built"""
    return {name: factory() for name, factory in PRESET_FACTORIES.items()}


def get_preset(name: str) -> ControlProblem:
    if name not in PRESET_FACTORIES:
        raise KeyError(f"Unknown preset '{name}'. Available: {', '.join(sorted(PRESET_FACTORIES))}")
    return PRESET_FACTORIES[name]()
