"""
Time grids

Coarse observation grids and the fine grids that refine them.
"""

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from src.errors import DomainError, GridAlignmentError


@dataclass(frozen=True, eq=False)
class TimeGrid:
    """Strictly increasing times starting at 0"""
    times: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or t.size < 2:
            raise DomainError("a time grid needs at least two points")
        if t[0] != 0.0:
            raise DomainError(f"a time grid starts at 0, got {t[0]}")
        if np.any(np.diff(t) <= 0.0):
            raise DomainError("time grid is not strictly increasing")
        object.__setattr__(self, 'times', t)

    @property
    def steps(self) -> int:
        return self.times.size - 1

    @property
    def end(self) -> float:
        return float(self.times[-1])

    @property
    def dt(self) -> np.ndarray:
        return np.diff(self.times)

    @property
    def max_step(self) -> float:
        return float(self.dt.max())

    def is_uniform(self) -> bool:
        return bool(np.allclose(self.dt, self.end / self.steps, rtol=1e-12, atol=0.0))


def uniform_grid(steps: int, end: float = 1.0) -> TimeGrid:
    """k * end / steps for k = 0..steps"""
    if steps < 1:
        raise DomainError(f"steps must be positive, got {steps}")
    times = end * np.arange(steps + 1) / steps
    times[-1] = end
    return TimeGrid(times)


def make_tilde_grid(n: int, extra: Optional[Iterable[float]] = None) -> TimeGrid:
    """
    Observation grid with 5n points: all j/(4n) plus n further points

    The further points are the given extras, padded with midpoints of the
    earliest intervals of the j/(4n) lattice that hold no point yet. At most
    n of the 2n lattice intervals in [1/2, 1] get split, so at least n of
    them keep length exactly 1/(4n).

    Args:
        n: Grid index
        extra: Up to n points in (0, 1) off the j/(4n) lattice

    Returns:
        TimeGrid with times[0] = 0 and 5n further points ending at 1
    """
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    extra = sorted(float(t) for t in (extra or ()))
    if len(extra) > n:
        raise DomainError(f"at most {n} extra points allowed, got {len(extra)}")
    lattice = np.arange(1, 4 * n + 1) / (4 * n)
    for t in extra:
        if not 0.0 < t < 1.0:
            raise DomainError(f"extra point {t} must lie in (0, 1)")
        if np.any(np.isclose(lattice, t, rtol=0.0, atol=1e-15)):
            raise DomainError(f"extra point {t} lies on the j/(4n) lattice")
    if len(set(extra)) != len(extra):
        raise DomainError("extra points must be distinct")

    occupied = {int(t * 4 * n) for t in extra}
    padding = []
    cell = 0
    while len(extra) + len(padding) < n:
        if cell not in occupied:
            padding.append((2 * cell + 1) / (8 * n))
        cell += 1
    times = np.concatenate([[0.0], np.sort(np.concatenate([lattice, extra, padding]))])
    return TimeGrid(times)


def align_indices(coarse: TimeGrid, fine: TimeGrid, atol: float = 1e-12) -> np.ndarray:
    """
    Indices of the fine grid that carry the coarse points

    Raises:
        GridAlignmentError: if a coarse point is not a fine grid point
    """
    idx = np.searchsorted(fine.times, coarse.times - atol)
    idx = np.minimum(idx, fine.steps)
    if np.any(np.abs(fine.times[idx] - coarse.times) > atol):
        bad = coarse.times[np.abs(fine.times[idx] - coarse.times) > atol][0]
        raise GridAlignmentError(f"coarse point {bad:g} is not on the fine grid")
    return idx


def refine_grid(grid: TimeGrid, factor: int) -> TimeGrid:
    """Split every interval into `factor` equal parts"""
    if factor < 1:
        raise DomainError(f"factor must be positive, got {factor}")
    t = grid.times
    parts = [t[:-1] + (t[1:] - t[:-1]) * k / factor for k in range(factor)]
    times = np.concatenate([np.stack(parts, axis=1).ravel(), [t[-1]]])
    return TimeGrid(times)
