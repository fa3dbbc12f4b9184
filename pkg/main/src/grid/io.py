"""
GridFn serialization: CSV (x_1..x_n, value) and structured JSON {dims, coords, values}
"""
import json
import logging
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd

from .grid import Grid, GridFn

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def gridfn_to_frame(f: GridFn) -> pd.DataFrame:
    """One row per grid point in row-major order"""
    pts = f.grid.points()
    data = {f"x_{d + 1}": pts[:, d] for d in range(f.grid.dims)}
    data['value'] = f.values
    return pd.DataFrame(data)


def gridfn_from_frame(df: pd.DataFrame) -> GridFn:
    """Rebuild a GridFn from its tabular form, checking the row order"""
    xcols = [c for c in df.columns if c.startswith('x_')]
    if not xcols or 'value' not in df.columns:
        raise ValueError("GridFn table needs columns x_1..x_n and value")
    xcols = sorted(xcols, key=lambda c: int(c.split('_')[1]))
    grid = Grid([np.unique(df[c].to_numpy(dtype=float)) for c in xcols])
    if grid.size != len(df):
        raise ValueError(f"Table has {len(df)} rows but its coordinates span {grid.size} grid points")
    if not np.array_equal(grid.points(), df[xcols].to_numpy(dtype=float)):
        raise ValueError("Table rows are not in row-major grid order")
    values = pd.to_numeric(df['value'], errors='raise').to_numpy(dtype=float)
    return GridFn(grid, values)


def save_gridfn_csv(f: GridFn, filepath: PathLike):
    gridfn_to_frame(f).to_csv(filepath, index=False, float_format='%.17g')
    logger.debug(f"💾 GridFn written to {filepath}")


def load_gridfn_csv(filepath: PathLike) -> GridFn:
    df = pd.read_csv(filepath)
    return gridfn_from_frame(df)


def gridfn_to_dict(f: GridFn) -> dict:
    return {
        'dims': f.grid.dims,
        'coords': [c.tolist() for c in f.grid.coords],
        'values': ['inf' if np.isinf(v) else float(v) for v in f.values],
    }


def gridfn_from_dict(payload: dict) -> GridFn:
    coords = payload['coords']
    if int(payload.get('dims', len(coords))) != len(coords):
        raise ValueError("JSON 'dims' does not match the number of coordinate arrays")
    values = [np.inf if v == 'inf' else float(v) for v in payload['values']]
    return GridFn(Grid(coords), values)


def save_gridfn_json(f: GridFn, filepath: PathLike):
    with open(filepath, 'w') as fh:
        json.dump(gridfn_to_dict(f), fh, indent=2)
    logger.debug(f"💾 GridFn written to {filepath}")


def load_gridfn_json(filepath: PathLike) -> GridFn:
    with open(filepath, 'r') as fh:
        return gridfn_from_dict(json.load(fh))


def load_gridfn(filepath: PathLike) -> GridFn:
    """Load a GridFn from .csv or .json based on the file suffix"""
    suffix = Path(filepath).suffix.lower()
    if suffix == '.json':
        return load_gridfn_json(filepath)
    if suffix == '.csv':
        return load_gridfn_csv(filepath)
    raise ValueError(f"Unsupported GridFn file type: {suffix}")


def save_gridfn(f: GridFn, filepath: PathLike):
    suffix = Path(filepath).suffix.lower()
    if suffix == '.json':
        save_gridfn_json(f, filepath)
    elif suffix == '.csv':
        save_gridfn_csv(f, filepath)
    else:
        raise ValueError(f"Unsupported GridFn file type: {suffix}")
