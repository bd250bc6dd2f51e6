"""
Brownian paths, bridges and the coupled pair

Paths are arrays of values on a fine TimeGrid. Every sampler accepts a single
RngStream (one path) or a sequence of streams (one row per stream).
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.errors import DomainError
from .grids import TimeGrid, align_indices, uniform_grid
from .rng import RngLike, standard_normals


def _cumulative(increments: np.ndarray) -> np.ndarray:
    zeros = np.zeros(increments.shape[:-1] + (1,))
    return np.concatenate([zeros, np.cumsum(increments, axis=-1)], axis=-1)


def sample_brownian(fine: TimeGrid, rng: RngLike) -> np.ndarray:
    """
    Brownian path on a fine grid

    Args:
        fine: Time grid
        rng: RngStream or sequence of RngStreams

    Returns:
        Array of shape (steps+1,) or (len(rng), steps+1), starting at 0
    """
    z = standard_normals(rng, fine.steps)
    return _cumulative(z * np.sqrt(fine.dt))


def interpolate_on(pi: TimeGrid, fine: TimeGrid, w: np.ndarray) -> np.ndarray:
    """
    Piecewise linear interpolation of w through its values at the points of pi

    The result equals w bitwise at every pi point.

    Raises:
        GridAlignmentError: if pi is not contained in the fine grid
    """
    idx = align_indices(pi, fine)
    if pi.end != fine.end:
        raise DomainError("pi and the fine grid must share their end point")
    k = np.searchsorted(pi.times, fine.times, side='right') - 1
    k = np.clip(k, 0, pi.steps - 1)
    left = pi.times[k]
    weight = (fine.times - left) / (pi.times[k + 1] - left)
    w = np.asarray(w, dtype=float)
    out = (1.0 - weight) * w[..., idx[k]] + weight * w[..., idx[k + 1]]
    out[..., idx] = w[..., idx]
    return out


def sample_bridge(length: float, steps: int, rng: RngLike) -> np.ndarray:
    """
    Brownian bridge from 0 to 0 over [0, length] on a uniform grid

    Built as B_u = W_u - (u/length) W_length from a fresh Brownian path,
    which is exact in law.
    """
    if length <= 0.0:
        raise DomainError(f"length must be positive, got {length}")
    if steps < 1:
        raise DomainError(f"steps must be positive, got {steps}")
    grid = uniform_grid(steps, length)
    w = sample_brownian(grid, rng)
    bridge = w - (grid.times / length) * w[..., -1:]
    bridge[..., 0] = 0.0
    bridge[..., -1] = 0.0
    return bridge


@dataclass(frozen=True, eq=False)
class CoupledPathPair:
    """Two Brownian paths on one fine grid that agree at the points of pi"""
    fine: TimeGrid
    pi: TimeGrid
    w: np.ndarray
    w_tilde: np.ndarray
    pi_indices: np.ndarray


def sample_coupled(pi: TimeGrid, fine: TimeGrid, rng: RngLike) -> CoupledPathPair:
    """
    Sample (W, W~) with W~ = interpolation of W on pi plus independent bridges

    The bridges come from a second Brownian path minus its own interpolation
    on pi, which gives independent bridges on every pi interval. W~ is then
    overwritten with W at the pi points, so the two agree bitwise there.

    Args:
        pi: Observation grid ending at fine.end
        fine: Fine grid containing pi; a pi interval of one fine step gets a zero bridge
        rng: RngStream or sequence of RngStreams

    Returns:
        CoupledPathPair
    """
    idx = align_indices(pi, fine)
    w = sample_brownian(fine, rng)
    fresh = sample_brownian(fine, rng)
    w_tilde = interpolate_on(pi, fine, w) + (fresh - interpolate_on(pi, fine, fresh))
    w_tilde[..., idx] = w[..., idx]
    return CoupledPathPair(fine=fine, pi=pi, w=w, w_tilde=w_tilde, pi_indices=idx)


def dump_paths_csv(path: str, fine: TimeGrid, w: np.ndarray,
                   w_tilde: Optional[np.ndarray] = None) -> None:
    """Write one path (and optionally its coupled partner) as t,w[,w_tilde] rows"""
    columns = [fine.times, np.asarray(w, dtype=float)]
    header = 't,w'
    if w_tilde is not None:
        columns.append(np.asarray(w_tilde, dtype=float))
        header += ',w_tilde'
    np.savetxt(path, np.column_stack(columns), fmt='%.17g', delimiter=',', header=header, comments='')
