from .grids import TimeGrid, align_indices, make_tilde_grid, refine_grid, uniform_grid
from .paths import (
    CoupledPathPair,
    dump_paths_csv,
    interpolate_on,
    sample_bridge,
    sample_brownian,
    sample_coupled,
)
from .rng import RngStream, standard_normals, streams_for

__all__ = [
    'TimeGrid', 'align_indices', 'make_tilde_grid', 'refine_grid', 'uniform_grid',
    'CoupledPathPair', 'dump_paths_csv', 'interpolate_on', 'sample_bridge',
    'sample_brownian', 'sample_coupled', 'RngStream', 'standard_normals', 'streams_for',
]
