"""
Test script for grids, discrete functions, LERP and grid geometry
"""
import sys
import os

import numpy as np
import pytest

# Add the src directory to path for imports (from tests folder)
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from grid import (
    Box, Grid, GridFn, as_box, diam_box, diam_grid, dist_point_to_grid, lerp_eval, locate,
    make_uniform_grid, one_sided_hausdorff, subgrid_interior,
)


def test_make_uniform_grid():
    """Equal spacing with exact endpoints"""
    g = make_uniform_grid([0.0], [1.0], [3])
    np.testing.assert_array_equal(g.coords[0], [0.0, 0.5, 1.0])
    assert g.uniform_flags == (True,)

    g2 = make_uniform_grid([-1, -1], [1, 1], [21, 21])
    assert g2.size == 441
    assert g2.points().shape == (441, 2)
    assert g2.coords[0][0] == -1.0 and g2.coords[0][-1] == 1.0
    print("✅ Uniform grids built")


@pytest.mark.parametrize("lo, hi, counts", [([0.0], [1.0], [1]), ([1.0], [1.0], [3]), ([2.0], [1.0], [3])])
def test_make_uniform_grid_rejects_bad_input(lo, hi, counts):
    with pytest.raises(ValueError):
        make_uniform_grid(lo, hi, counts)


def test_grid_rejects_unsorted_coordinates():
    with pytest.raises(ValueError):
        Grid([[0.0, 0.5, 0.5]])
    with pytest.raises(ValueError):
        Grid([[1.0, 0.0]])


def test_nonuniform_flag():
    g = Grid([[0.0, 0.1, 0.5, 1.0], [0.0, 1.0, 2.0]])
    assert g.uniform_flags == (False, True)


def test_points_are_row_major():
    g = Grid([[0.0, 1.0], [10.0, 20.0, 30.0]])
    pts = g.points()
    np.testing.assert_array_equal(pts[:3], [[0, 10], [0, 20], [0, 30]])
    np.testing.assert_array_equal(pts[3], [1, 10])


def test_locate_examples():
    g = Grid([[0.0, 1.0]])
    loc = locate(g, 0.25)
    assert loc.cell_index[0, 0] == 0 and loc.weights[0, 0] == pytest.approx(0.25)

    loc = locate(g, 2.0)
    assert loc.cell_index[0, 0] == 0 and loc.weights[0, 0] == pytest.approx(2.0)

    # Tie on an interior plane goes to the lower cell with weight 1
    g3 = Grid([[0.0, 0.5, 1.0]])
    loc = locate(g3, 0.5)
    assert loc.cell_index[0, 0] == 0 and loc.weights[0, 0] == 1.0


def test_locate_uniform_matches_binary_search():
    """The O(1) path on a uniform grid agrees with the nonuniform path"""
    uniform = make_uniform_grid([-1.0], [2.0], [31])
    # Same coordinates, forced through binary search
    generic = Grid([uniform.coords[0]])
    generic.uniform_flags = (False,)
    rng = np.random.default_rng(3)
    xs = np.concatenate([rng.uniform(-2, 3, 500), uniform.coords[0]])
    a, b = locate(uniform, xs.reshape(-1, 1)), locate(generic, xs.reshape(-1, 1))
    np.testing.assert_array_equal(a.cell_index, b.cell_index)
    np.testing.assert_allclose(a.weights, b.weights, rtol=1e-12, atol=1e-12)


def test_locate_reconstruct_roundtrip():
    g = Grid([[0.0, 0.3, 1.0, 1.7], [-2.0, 0.0, 5.0]])
    rng = np.random.default_rng(0)
    x = np.column_stack([rng.uniform(-1, 3, 200), rng.uniform(-4, 7, 200)])
    rebuilt = locate(g, x).reconstruct(g)
    np.testing.assert_allclose(rebuilt, x, rtol=1e-12, atol=1e-12)


def test_locate_rejects_nan():
    with pytest.raises(ValueError):
        locate(Grid([[0.0, 1.0]]), np.nan)


def test_lerp_examples():
    """Hand multilinear average, grid-point exactness and extrapolation"""
    g = Grid([[0.0, 1.0], [0.0, 1.0]])
    # Row-major values for (0,0), (0,1), (1,0), (1,1)
    f = GridFn(g, [0.0, 2.0, 1.0, 3.0])
    assert lerp_eval(f, [0.5, 0.5])[0] == pytest.approx(1.5)
    assert lerp_eval(f, [1.0, 0.0])[0] == 1.0

    f1 = GridFn(Grid([[0.0, 1.0]]), [0.0, 1.0])
    assert lerp_eval(f1, 2.0)[0] == pytest.approx(2.0)


def test_lerp_exact_at_grid_points():
    g = Grid([[0.0, 0.2, 0.7, 1.0], [-1.0, 0.0, 1.0]])
    rng = np.random.default_rng(1)
    f = GridFn(g, rng.normal(size=g.size))
    np.testing.assert_allclose(lerp_eval(f, g.points()), f.values, rtol=1e-12, atol=1e-12)


def test_lerp_affine_along_axis_segments():
    g = make_uniform_grid([0, 0], [1, 1], [5, 4])
    rng = np.random.default_rng(2)
    f = GridFn(g, rng.normal(size=g.size))
    a = np.array([0.3, 0.4])
    b = np.array([0.45, 0.4])
    mid = 0.5 * (a + b)
    expected = 0.5 * (lerp_eval(f, a)[0] + lerp_eval(f, b)[0])
    assert lerp_eval(f, mid)[0] == pytest.approx(expected, rel=1e-12, abs=1e-12)


def test_lerp_reproduces_affine_functions_everywhere():
    g = make_uniform_grid([-1, -1], [1, 1], [4, 6])
    f = GridFn.from_function(g, lambda x: 2.0 * x[:, 0] - 3.0 * x[:, 1] + 0.5)
    x = np.array([[0.1, 0.2], [3.0, -2.0], [-1.5, 0.9]])
    np.testing.assert_allclose(lerp_eval(f, x), 2.0 * x[:, 0] - 3.0 * x[:, 1] + 0.5, rtol=1e-12, atol=1e-12)


def test_lerp_inf_propagation():
    f = GridFn(Grid([[0.0, 1.0, 2.0]]), [0.0, 1.0, np.inf])
    # Grid point next to an infinite corner keeps its own value
    assert lerp_eval(f, 1.0)[0] == 1.0
    assert np.isinf(lerp_eval(f, 1.5)[0])
    assert np.isinf(lerp_eval(f, 2.0)[0])
    assert lerp_eval(f, 0.5)[0] == pytest.approx(0.5)


def test_gridfn_validation():
    g = Grid([[0.0, 1.0]])
    with pytest.raises(ValueError):
        GridFn(g, [0.0])
    with pytest.raises(ValueError):
        GridFn(g, [0.0, np.nan])
    with pytest.raises(ValueError):
        GridFn(g, [0.0, -np.inf])
    with pytest.raises(ValueError):
        GridFn(g, [np.inf, np.inf])


def test_gridfn_helpers():
    g = Grid([[0.0, 1.0, 2.0]])
    f = GridFn(g, [3.0, np.inf, -1.0])
    assert f.finite_min() == -1.0 and f.finite_max() == 3.0
    np.testing.assert_array_equal(f.finite_mask, [True, False, True])
    shifted = f.shifted(2.0)
    np.testing.assert_array_equal(shifted.values, [5.0, np.inf, 1.0])


def test_subgrid_interior():
    assert subgrid_interior(Grid([[0, 1, 2]])).coords[0].tolist() == [1.0]
    sub = subgrid_interior(Grid([[0, 1, 2, 3], [0, 1, 2]]))
    assert sub.coords[0].tolist() == [1.0, 2.0] and sub.coords[1].tolist() == [1.0]
    with pytest.raises(ValueError):
        subgrid_interior(Grid([[0, 1]]))


def test_one_sided_hausdorff():
    assert one_sided_hausdorff(as_box([0], [1]), Grid([[0, 0.5, 1]])) == pytest.approx(0.25)
    assert one_sided_hausdorff(as_box([0], [1]), Grid([[0, 1]])) == pytest.approx(0.5)
    assert one_sided_hausdorff(as_box([0], [0]), Grid([[-1, 0, 1]])) == 0.0
    # Half the cell diagonal on a uniform 2-D grid
    box = as_box([-1, -1], [1, 1])
    assert one_sided_hausdorff(box, make_uniform_grid([-1, -1], [1, 1], [3, 3])) == pytest.approx(np.sqrt(0.5))


def test_one_sided_hausdorff_halves_under_refinement():
    box = as_box([-1, 0], [1, 2])
    values = [one_sided_hausdorff(box, make_uniform_grid(box.lo, box.hi, [k, k])) for k in (3, 5, 9, 17)]
    for coarse, fine in zip(values, values[1:]):
        assert fine == pytest.approx(coarse / 2, rel=1e-12)


def test_diameters_and_distance():
    assert diam_box(as_box([-1, -1], [1, 1])) == pytest.approx(2 * np.sqrt(2))
    assert diam_grid(Grid([[0, 1], [0, 1]])) == pytest.approx(np.sqrt(2))
    assert dist_point_to_grid([0.3], Grid([[0, 1]])) == pytest.approx(0.3)
    batch = dist_point_to_grid(np.array([[0.3], [0.9], [4.0]]), Grid([[0, 1]]))
    np.testing.assert_allclose(batch, [0.3, 0.1, 3.0])


def test_box_contains_with_tolerance():
    box = Box(np.array([-1.0]), np.array([1.0]))
    assert box.contains(np.array([[1.0 + 1e-12]]))[0]
    assert not box.contains(np.array([[1.0 + 1e-6]]))[0]


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
