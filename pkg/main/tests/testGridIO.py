"""
Test script for GridFn CSV and JSON serialization
"""
import sys
import os

import numpy as np
import pandas as pd
import pytest

# Add the src directory to path for imports (from tests folder)
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from grid import Grid, GridFn, gridfn_from_frame, gridfn_to_frame, load_gridfn, save_gridfn


def _sample() -> GridFn:
    g = Grid([[0.0, 0.25, 1.0], [-1.0, 1.0]])
    return GridFn(g, [0.1, np.inf, 1.0 / 3.0, -2.5, 7.0, np.inf])


def test_csv_layout(tmp_path):
    f = _sample()
    path = tmp_path / "J.csv"
    save_gridfn(f, path)

    df = pd.read_csv(path)
    assert list(df.columns) == ['x_1', 'x_2', 'value']
    assert len(df) == 6
    # Row-major order, dimension 0 slowest
    assert df['x_1'].tolist() == [0.0, 0.0, 0.25, 0.25, 1.0, 1.0]
    assert 'inf' in path.read_text()

    back = load_gridfn(path)
    assert back.grid == f.grid
    np.testing.assert_array_equal(back.values, f.values)
    print("✅ CSV round trip preserved values bit-for-bit")


def test_json_layout(tmp_path):
    f = _sample()
    path = tmp_path / "J.json"
    save_gridfn(f, path)
    back = load_gridfn(path)
    assert back.grid == f.grid
    np.testing.assert_array_equal(back.values, f.values)


def test_frame_rejects_shuffled_rows():
    df = gridfn_to_frame(_sample()).iloc[::-1].reset_index(drop=True)
    with pytest.raises(ValueError):
        gridfn_from_frame(df)


def test_frame_rejects_missing_columns():
    with pytest.raises(ValueError):
        gridfn_from_frame(pd.DataFrame({'x_1': [0.0, 1.0]}))


def test_unknown_suffix(tmp_path):
    with pytest.raises(ValueError):
        save_gridfn(_sample(), tmp_path / "J.parquet")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
