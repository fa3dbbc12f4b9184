"""
Custom problem loading from a JSON description

Example file:
    {
      "name": "double_integrator",
      "n": 2, "m": 1, "horizon": 20,
      "A": [[1, 0.1], [0, 1]], "B": [[0], [0.1]],
      "state_box": {"lo": [-1, -1], "hi": [1, 1]},
      "input_box": {"lo": [-1], "hi": [1]},
      "state_cost": {"kind": "quadratic"},
      "input_cost": {"kind": "l1"},
      "terminal_cost": {"kind": "quadratic", "weight": 10},
      "disturbance": {"support": [[0, -0.01], [0, 0.01]], "pmf": [0.5, 0.5]},
      "alpha": 1.0
    }
"""
import hashlib
import json
import logging
from pathlib import Path
from typing import List, Optional, Union

import numpy as np
from pydantic import BaseModel, Field, ValidationError, model_validator

from grid import Box
from .costs import build_cost
from .models import ControlProblem, Disturbance, SeparableStageCost

logger = logging.getLogger(__name__)


class BoxSpec(BaseModel):
    lo: List[float]
    hi: List[float]

    @model_validator(mode='after')
    def _ordered(self):
        if len(self.lo) != len(self.hi):
            raise ValueError("box lo and hi must have the same length")
        if any(a > b for a, b in zip(self.lo, self.hi)):
            raise ValueError("box requires lo <= hi")
        return self


class CostSpec(BaseModel):
    kind: str = Field(pattern=r'^(quadratic|l1|expl1|linear|zero)$')
    weight: Optional[float] = None
    R: Optional[List[List[float]]] = None
    c: Optional[List[float]] = None


class DisturbanceSpec(BaseModel):
    support: List[List[float]]
    pmf: List[float]


class ProblemSpec(BaseModel):
    name: str = 'custom'
    n: int = Field(ge=1)
    m: int = Field(ge=1)
    horizon: int = Field(ge=1)
    A: List[List[float]]
    B: List[List[float]]
    state_box: BoxSpec
    input_box: BoxSpec
    state_cost: CostSpec
    input_cost: CostSpec
    terminal_cost: CostSpec
    disturbance: Optional[DisturbanceSpec] = None
    alpha: float = Field(default=1.0, gt=0)

    @model_validator(mode='after')
    def _shapes(self):
        if np.shape(self.A) != (self.n, self.n):
            raise ValueError(f"A must be {self.n}x{self.n}")
        if np.shape(self.B) != (self.n, self.m):
            raise ValueError(f"B must be {self.n}x{self.m}")
        if len(self.state_box.lo) != self.n or len(self.input_box.lo) != self.m:
            raise ValueError("box dimensions do not match n and m")
        return self


def _cost_params(spec: CostSpec) -> dict:
    return {k: v for k, v in spec.model_dump().items() if k != 'kind' and v is not None}


def problem_from_spec(spec: ProblemSpec) -> ControlProblem:
    """Build a separable linear ControlProblem from a validated description"""
    A = np.asarray(spec.A, dtype=float)
    input_box = Box(np.asarray(spec.input_box.lo), np.asarray(spec.input_box.hi))
    input_cost = build_cost(spec.input_cost.kind, spec.m, _cost_params(spec.input_cost))
    disturbance = None
    if spec.disturbance is not None:
        disturbance = Disturbance(np.asarray(spec.disturbance.support), np.asarray(spec.disturbance.pmf))

    canonical = json.dumps(spec.model_dump(), sort_keys=True)
    digest = hashlib.sha256(canonical.encode()).hexdigest()[:16]

    return ControlProblem(
        name=spec.name,
        n=spec.n, m=spec.m, horizon=spec.horizon,
        state_dynamics=lambda x: np.atleast_2d(x) @ A.T,
        input_matrix=np.asarray(spec.B, dtype=float),
        stage_cost=SeparableStageCost(
            state_cost=build_cost(spec.state_cost.kind, spec.n, _cost_params(spec.state_cost)),
            input_cost=input_cost,
            input_conjugate=lambda v: input_cost.conjugate_on_box(v, input_box),
        ),
        terminal_cost=build_cost(spec.terminal_cost.kind, spec.n, _cost_params(spec.terminal_cost)),
        state_box=Box(np.asarray(spec.state_box.lo), np.asarray(spec.state_box.hi)),
        input_box=input_box,
        disturbance=disturbance,
        default_alpha=spec.alpha,
        fingerprint=f"file:{digest}",
    )


def load_problem_file(filepath: Union[str, Path]) -> ControlProblem:
    """
    Load and validate a custom problem description

    Raises:
        ValueError: if the file is missing, not JSON, or fails validation
    """
    path = Path(filepath)
    if not path.exists():
        raise ValueError(f"Problem file not found: {path}")
    try:
        with open(path, 'r') as fh:
            payload = json.load(fh)
        spec = ProblemSpec.model_validate(payload)
    except json.JSONDecodeError as e:
        raise ValueError(f"Problem file {path} is not valid JSON: {e}") from e
    except ValidationError as e:
        raise ValueError(f"Problem file {path} failed validation: {e}") from e
    logger.info(f"📄 Problem '{spec.name}' loaded from {path}")
    return problem_from_spec(spec)
