"""
Benchmark report: error curves, relative trajectory costs and timings per (algorithm, N)
"""
import json
import logging
import platform
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Union

import numpy as np
import pandas as pd

from grid import lerp_eval
from problem import ValueIterationResult

logger = logging.getLogger(__name__)


def error_curve(result: ValueIterationResult, reference: ValueIterationResult) -> np.ndarray:
    """
    Max-abs error over the result grid of J_t against the LERP-extended reference J_t

    Only states where the reference is finite are compared. A time step without such
    states yields NaN.
    """
    if result.horizon != reference.horizon:
        raise ValueError(f"Horizon mismatch: {result.horizon} vs reference {reference.horizon}")
    xs = result.state_grid.points()
    errors = np.empty(result.horizon + 1)
    for t, (J, J_ref) in enumerate(zip(result.costs, reference.costs)):
        ref = lerp_eval(J_ref, xs)
        mask = np.isfinite(ref)
        if not mask.any():
            errors[t] = np.nan
            continue
        values = J.values[mask]
        diff = np.where(np.isfinite(values), np.abs(values - ref[mask]), np.inf)
        errors[t] = float(diff.max())
    return errors


def environment_metadata() -> Dict[str, str]:
    return {
        'python': sys.version.split()[0],
        'numpy': np.__version__,
        'pandas': pd.__version__,
        'platform': platform.platform(),
        'machine': platform.machine(),
    }


@dataclass
class BenchmarkReport:
    """One row per (algorithm, N) plus per-x0 trajectory costs and environment metadata"""
    problem: str
    reference_n: int
    seed: int
    concurrent_rollouts: bool = False
    rows: List[Dict[str, object]] = field(default_factory=list)
    trajectories: List[Dict[str, object]] = field(default_factory=list)
    environment: Dict[str, str] = field(default_factory=environment_metadata)

    def add_row(self, algorithm: str, n: int, errors: np.ndarray, relative_costs: np.ndarray,
                backward_time: float, forward_time: float, infeasible: int):
        finite = relative_costs[np.isfinite(relative_costs)]
        self.rows.append({
            'algorithm': algorithm,
            'n': int(n),
            'errors': [float(e) for e in errors],
            'max_error': float(np.nanmax(errors)) if np.any(~np.isnan(errors)) else float('nan'),
            'mean_relative_cost': float(finite.mean()) if finite.size else float('inf'),
            'infeasible_rollouts': int(infeasible),
            'backward_time': float(backward_time),
            'forward_time': float(forward_time),
        })

    def sort(self):
        self.rows.sort(key=lambda r: (r['algorithm'], r['n']))
        self.trajectories.sort(key=lambda r: (r['algorithm'], r['n'], r['x0_index']))

    def to_frame(self) -> pd.DataFrame:
        """Summary table, one row per (algorithm, N)"""
        frame = pd.DataFrame(self.rows)
        if frame.empty:
            return frame
        return frame.drop(columns=['errors'])

    def error_frame(self) -> pd.DataFrame:
        records = []
        for row in self.rows:
            for t, e in enumerate(row['errors']):
                records.append({'algorithm': row['algorithm'], 'n': row['n'], 't': t, 'max_abs_error': e})
        return pd.DataFrame(records)

    def timing_frame(self) -> pd.DataFrame:
        return pd.DataFrame([{k: r[k] for k in ('algorithm', 'n', 'backward_time', 'forward_time')}
                             for r in self.rows])

    def to_dict(self) -> Dict[str, object]:
        return {
            'problem': self.problem,
            'reference_n': self.reference_n,
            'seed': self.seed,
            'concurrent_rollouts': self.concurrent_rollouts,
            'rows': self.rows,
            'environment': self.environment,
        }

    def to_json(self, filepath: Union[str, Path]):
        with open(filepath, 'w') as f:
            json.dump(self.to_dict(), f, indent=2, default=str)

    def write(self, output_dir: Union[str, Path]) -> Path:
        """Write report.json, trajectory_costs.csv, error_curves.csv and timings.csv"""
        out = Path(output_dir)
        out.mkdir(parents=True, exist_ok=True)
        self.to_json(out / 'report.json')
        pd.DataFrame(self.trajectories).to_csv(out / 'trajectory_costs.csv', index=False, float_format='%.17g')
        self.error_frame().to_csv(out / 'error_curves.csv', index=False, float_format='%.17g')
        self.timing_frame().to_csv(out / 'timings.csv', index=False)
        logger.info(f"💾 Benchmark report written to {out}")
        return out
