"""
High-resolution d-DP reference solutions with an on-disk cache
"""
import hashlib
import logging
from pathlib import Path
from typing import Optional, Union

import numpy as np

from cdp import value_iteration
from grid import GridFn
from problem import ControlProblem, ValueIterationResult, make_plan
from settings import RUNTIME_SETTINGS

logger = logging.getLogger(__name__)


def reference_key(problem: ControlProblem, n_ref: int) -> str:
    payload = f"{problem.fingerprint or problem.name}|N={int(n_ref)}|T={problem.horizon}"
    return hashlib.sha256(payload.encode('utf-8')).hexdigest()[:24]


def _store(result: ValueIterationResult, path: Path):
    costs = np.stack([J.values for J in result.costs])
    policies = np.stack([np.stack([c.values for c in law]) for law in result.policies])
    np.savez(path, costs=costs, policies=policies, step_times=np.asarray(result.step_times))


def _restore(path: Path, problem: ControlProblem, n_ref: int) -> ValueIterationResult:
    grid = make_plan(problem, n_ref).state_grid
    with np.load(path) as data:
        costs = [GridFn(grid, row) for row in data['costs']]
        policies = [tuple(GridFn(grid, comp) for comp in law) for law in data['policies']]
        step_times = [float(s) for s in data['step_times']]
    return ValueIterationResult('ddp', costs, policies, step_times,
                                {'problem': problem.name, 'reference_n': int(n_ref), 'cached': True})


def make_reference(problem: ControlProblem, n_ref: int,
                   cache_dir: Optional[Union[str, Path]] = None) -> ValueIterationResult:
    """
    d-DP solution with n_ref points per state and input dimension

    Results are cached as .npz keyed by problem fingerprint, n_ref and horizon, so a
    warm rerun returns bit-identical values.
    """
    cache = Path(cache_dir if cache_dir is not None else RUNTIME_SETTINGS['cache_dir'])
    cache.mkdir(parents=True, exist_ok=True)
    path = cache / f"ref_{reference_key(problem, n_ref)}.npz"

    if path.exists():
        logger.info(f"📦 Reference for '{problem.name}' at N={n_ref} loaded from cache")
        return _restore(path, problem, n_ref)

    logger.info(f"🔄 Computing reference for '{problem.name}' at N={n_ref}")
    result = value_iteration(problem, make_plan(problem, n_ref), 'ddp')
    result.metadata['reference_n'] = int(n_ref)
    _store(result, path)
    logger.info(f"💾 Reference cached at {path}")
    return result
