"""
Occupation mismatch

Time the solution X and the drift-free proxy x0 + W spend on opposite sides
of a level xi, over [0, delta].
"""

import math
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.drift.library import DriftSpec
from src.errors import DomainError, ExperimentAbortError
from src.noise.grids import TimeGrid, uniform_grid
from src.noise.paths import sample_brownian
from src.noise.rng import streams_for
from src.solver.euler import reference_solution
from .rates import fit_rate
from .runner import abort_fraction, run_replications

logger = logging.getLogger(__name__)


@dataclass
class OccupationSeries:
    """Second moments of the mismatch time per delta, with a log-log slope"""
    xi: float
    x0: float
    entries: List[Tuple[float, float, float]] = field(default_factory=list)
    fitted_slope: Optional[float] = None
    slope_stderr: Optional[float] = None
    intercept: Optional[float] = None
    aborted: int = 0

    @property
    def exact(self) -> bool:
        return all(m == 0.0 for _, m, _ in self.entries)


class OccupationTask:
    """Per-chunk mismatch times for every delta, plus an abort flag"""

    def __init__(self, mu: DriftSpec, x0: float, xi: float, deltas: Sequence[float],
                 fine: TimeGrid, seed: int):
        self.mu = mu
        self.x0 = x0
        self.xi = xi
        self.deltas = list(deltas)
        self.fine = fine
        self.seed = seed

    def __call__(self, start: int, stop: int) -> np.ndarray:
        w = sample_brownian(self.fine, streams_for(self.seed, start, stop))
        x = reference_solution(self.mu, self.x0, self.fine, w)
        # right end points: at u = 0 both sides sit at x0
        opposite = ((x.values[:, 1:] - self.xi) * (self.x0 + w[:, 1:] - self.xi)) <= 0.0
        occupied = np.cumsum(opposite * self.fine.dt, axis=-1)
        out = np.empty((stop - start, len(self.deltas) + 1))
        for k, delta in enumerate(self.deltas):
            step = int(round(delta / self.fine.end * self.fine.steps))
            out[:, k] = occupied[:, step - 1]
        out[:, -1] = x.aborted
        return out


def occupation_mismatch(mu: DriftSpec, x0: float, xi: float, deltas: Sequence[float],
                        reps: int, seed: int, steps_per_min_delta: int = 256,
                        workers: Optional[int] = None,
                        chunk_size: Optional[int] = None) -> OccupationSeries:
    """
    Estimate E[(int_0^delta 1{(X_u - xi)(x0 + W_u - xi) <= 0} du)^2] for each delta

    One uniform grid over [0, max(deltas)] serves every delta; each delta must
    be a multiple of its step.

    Args:
        mu: Drift coefficient
        x0: Initial value
        xi: Level
        deltas: Window lengths in (0, 1]
        reps: Replications
        seed: Seed of the replication streams
        steps_per_min_delta: Fine steps inside the shortest window

    Returns:
        OccupationSeries with (delta, second moment, stderr) entries
    """
    deltas = sorted(float(d) for d in deltas)
    if not deltas or any(not 0.0 < d <= 1.0 for d in deltas):
        raise DomainError("deltas must lie in (0, 1]")
    horizon = deltas[-1]
    steps = int(round(horizon / deltas[0] * steps_per_min_delta))
    fine = uniform_grid(steps, horizon)
    for d in deltas:
        k = d / horizon * steps
        if abs(k - round(k)) > 1e-9:
            raise DomainError(f"delta={d} is not a multiple of the grid step {horizon / steps:g}")

    rows = run_replications(OccupationTask(mu, x0, xi, deltas, fine, seed), reps, workers, chunk_size)
    aborted = rows[:, -1].astype(bool)
    limit = abort_fraction()
    if aborted.sum() > limit * reps:
        raise ExperimentAbortError(f"{int(aborted.sum())} of {reps} replications aborted",
                                   aborted=int(aborted.sum()), reps=reps)

    series = OccupationSeries(xi=xi, x0=x0, aborted=int(aborted.sum()))
    for k, delta in enumerate(deltas):
        squares = rows[~aborted, k] ** 2
        mean = float(np.mean(squares))
        stderr = float(np.std(squares, ddof=1)) / math.sqrt(squares.size) if squares.size > 1 else 0.0
        series.entries.append((delta, mean, stderr))

    positive = [(d, m, e) for d, m, e in series.entries if m > 0.0]
    if len(positive) >= 3:
        series.fitted_slope, series.slope_stderr, series.intercept = fit_rate(positive)
    return series
