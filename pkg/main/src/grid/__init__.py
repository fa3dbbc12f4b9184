"""
Grid Module
Rectangular grids, discrete functions and the LERP extension operator
"""
from .grid import Grid, GridFn, CellLocation, SlopeBox, make_uniform_grid, locate, lerp_eval
from .geometry import (
    Box, as_box, diam_box, diam_grid, dist_point_to_grid,
    one_sided_hausdorff, one_sided_hausdorff_points, subgrid_interior,
)
from .io import (
    gridfn_to_frame, gridfn_from_frame, load_gridfn, save_gridfn,
    load_gridfn_csv, save_gridfn_csv, load_gridfn_json, save_gridfn_json,
)

__all__ = [
    'Grid', 'GridFn', 'CellLocation', 'SlopeBox', 'make_uniform_grid', 'locate', 'lerp_eval',
    'Box', 'as_box', 'diam_box', 'diam_grid', 'dist_point_to_grid',
    'one_sided_hausdorff', 'one_sided_hausdorff_points', 'subgrid_interior',
    'gridfn_to_frame', 'gridfn_from_frame', 'load_gridfn', 'save_gridfn',
    'load_gridfn_csv', 'save_gridfn_csv', 'load_gridfn_json', 'save_gridfn_json',
]
