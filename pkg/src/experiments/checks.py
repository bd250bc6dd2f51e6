"""
Structural checks behind the transform-check and sobolev commands
"""

import math
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.drift.fractional import decay_bound, eval_h, eval_mu_s, mu_s_at_zero
from src.drift.library import DriftSpec
from src.drift.sobolev import (
    SeminormStudy,
    h_fourier_tail_bound,
    seminorm_fourier_side,
    seminorm_refinement_study,
)
from src.errors import DomainError
from src.noise.grids import uniform_grid
from src.noise.paths import sample_brownian
from src.noise.rng import RngStream, streams_for
from src.solver.euler import euler_multiplicative, reference_solution
from src.transform.zvonkin import TransformTable, build_transform, eval_b, eval_G, eval_Ginv
from .config import ExperimentConfig
from .runner import run_replications

logger = logging.getLogger(__name__)

BOUND_SLACK = 1.0e-6
ROUND_TRIP_SAMPLES = 1000


@dataclass
class ConsistencySeries:
    """Mean |G(X_1) - Y_1| per fine grid size"""
    entries: List[Tuple[int, float, float]] = field(default_factory=list)
    aborted: int = 0

    @property
    def decreasing(self) -> bool:
        means = [m for _, m, _ in self.entries]
        # rounding level: the two routes agree up to summation order
        if max(means, default=0.0) <= 1.0e-12:
            return True
        return all(b < a for a, b in zip(means, means[1:]))


class ConsistencyTask:
    """Per-chunk |G(X_1) - Y_1| on each subsampled grid, plus abort flags"""

    def __init__(self, mu: DriftSpec, x0: float, table: TransformTable,
                 steps_list: Sequence[int], seed: int):
        self.mu = mu
        self.x0 = x0
        self.table = table
        self.steps_list = list(steps_list)
        self.seed = seed

    def __call__(self, start: int, stop: int) -> np.ndarray:
        finest = max(self.steps_list)
        w = sample_brownian(uniform_grid(finest), streams_for(self.seed, start, stop))
        y0 = eval_G(self.table, self.x0)
        out = np.zeros((stop - start, len(self.steps_list), 2))
        for k, steps in enumerate(self.steps_list):
            grid = uniform_grid(steps)
            w_sub = w[:, ::finest // steps]
            x = reference_solution(self.mu, self.x0, grid, w_sub)
            y = euler_multiplicative(self.table, y0, grid, w_sub)
            outside = np.abs(x.terminal) > self.table.x_max
            gx = np.interp(x.terminal, self.table.x_grid, self.table.G_vals)
            out[:, k, 0] = np.abs(gx - y.terminal)
            out[:, k, 1] = x.aborted | y.aborted | outside
        return out


def transform_consistency(mu: DriftSpec, x0: float, table: TransformTable,
                          steps_list: Sequence[int], reps: int, seed: int,
                          workers: Optional[int] = None,
                          chunk_size: Optional[int] = None) -> ConsistencySeries:
    """
    Compare G applied to the Euler solution with Euler-Maruyama for dY = b(Y) dW

    Each replication draws one Brownian path on the finest grid and
    subsamples it for the coarser ones.

    Args:
        mu: Drift coefficient
        x0: Initial value
        table: Transform table of mu
        steps_list: Increasing grid sizes, each dividing the largest
        reps: Replications
        seed: Seed of the replication streams

    Returns:
        ConsistencySeries
    """
    steps_list = sorted(steps_list)
    finest = steps_list[-1]
    if any(finest % m for m in steps_list):
        raise DomainError("every grid size must divide the largest one")
    task = ConsistencyTask(mu, x0, table, steps_list, seed)
    rows = run_replications(task, reps, workers, chunk_size)

    series = ConsistencySeries()
    for k, steps in enumerate(steps_list):
        aborted = rows[:, k, 1].astype(bool)
        series.aborted = max(series.aborted, int(aborted.sum()))
        values = rows[~aborted, k, 0]
        stderr = float(np.std(values, ddof=1)) / math.sqrt(values.size) if values.size > 1 else 0.0
        series.entries.append((steps, float(np.mean(values)), stderr))
    return series


@dataclass
class TransformCheckReport:
    label: str
    l1_norm: float
    c1: float
    c2: float
    lower_bound: float
    upper_bound: float
    bounds_ok: bool
    round_trip_error: float
    lipschitz_estimate: float
    lipschitz_bound: float
    consistency: ConsistencySeries
    closed_form_error: Optional[float] = None

    @property
    def passed(self) -> bool:
        return (self.bounds_ok and self.round_trip_error <= 1.0e-10
                and self.lipschitz_estimate <= self.lipschitz_bound
                and self.consistency.decreasing
                and (self.closed_form_error is None or self.closed_form_error <= 1.0e-6))


def transform_check(config: ExperimentConfig, workers: Optional[int] = None,
                    chunk_size: Optional[int] = None) -> TransformCheckReport:
    """
    Check the transform of the configured drift

    Covers the bounds exp(-2|mu|_1) <= G' <= exp(2|mu|_1), the G o G^-1
    round trip, the Lipschitz constant of b, the closed form of the
    indicator drift and pathwise consistency under two grid doublings.
    """
    mu = config.build_drift()
    table = build_transform(mu, config.drift_range, config.transform_step)
    lower, upper = math.exp(-2.0 * mu.l1_norm), math.exp(2.0 * mu.l1_norm)
    bounds_ok = table.c1 >= lower * (1.0 - BOUND_SLACK) and table.c2 <= upper * (1.0 + BOUND_SLACK)

    rng = RngStream(config.seed, 0)
    xs = rng.uniform(-table.x_max, table.x_max, ROUND_TRIP_SAMPLES)
    round_trip = float(np.max(np.abs(eval_Ginv(table, eval_G(table, xs)) - xs)))

    ys = np.sort(rng.uniform(table.y_min, table.y_max, 2 * ROUND_TRIP_SAMPLES))
    ys = ys[np.concatenate([[True], np.diff(ys) > 0.0])]
    slopes = np.abs(np.diff(eval_b(table, ys))) / np.diff(ys)
    lipschitz = float(slopes.max()) if slopes.size else 0.0
    # each interpolation cell moves the secant slope by O(step)
    lipschitz_bound = 2.0 * mu.sup_norm * (1.0 + 2.0 * mu.sup_norm * table.step) + 1e-12

    closed_form = None
    if mu.kind == 'indicator_01':
        g1 = 0.5 * (1.0 - math.exp(-2.0))
        closed_form = abs(eval_G(table, 1.0) - g1)

    fine = config.fine_steps
    consistency = transform_consistency(mu, config.x0, table, [fine // 4, fine // 2, fine],
                                        config.reps, config.seed, workers, chunk_size)
    report = TransformCheckReport(
        label=mu.label, l1_norm=mu.l1_norm, c1=table.c1, c2=table.c2,
        lower_bound=lower, upper_bound=upper, bounds_ok=bounds_ok,
        round_trip_error=round_trip, lipschitz_estimate=lipschitz,
        lipschitz_bound=lipschitz_bound, consistency=consistency,
        closed_form_error=closed_form,
    )
    if not report.passed:
        logger.warning("Transform check for %s did not pass", mu.label)
    return report


@dataclass
class SobolevReport:
    s: float
    cutoffs: List[float]
    fourier_values: List[float]
    fourier_tail_bounds: List[float]
    fourier_monotone: bool
    fourier_bounded: bool
    study: SeminormStudy
    decay_violation: Optional[float] = None
    evenness_error: Optional[float] = None
    origin_error: Optional[float] = None

    @property
    def passed(self) -> bool:
        checks = [self.fourier_monotone, self.fourier_bounded]
        if self.decay_violation is not None:
            checks.append(self.decay_violation <= 0.0)
        return all(checks)


def sobolev_check(config: ExperimentConfig) -> SobolevReport:
    """
    Regularity diagnostics for h_s and the configured drift

    The Fourier-side integral of h_s must grow with the cutoff and stay at
    most 2. For mu_s the decay envelope is checked on |x| in [1, 50] and the
    value at 0 is compared with its closed form.
    """
    s = config.s
    cutoffs = sorted(config.cutoffs)
    values = [seminorm_fourier_side(s, lambda x: eval_h(s, x), c) for c in cutoffs]
    tol = 1.0e-9
    monotone = all(b >= a - tol for a, b in zip(values, values[1:]))
    bounded = all(v <= 2.0 + tol for v in values)

    mu = config.build_drift()
    study = seminorm_refinement_study(mu, config.seminorm_s, config.p,
                                      min(mu.domain, config.drift_range), mesh=config.mesh,
                                      doublings=4)
    report = SobolevReport(
        s=s, cutoffs=cutoffs, fourier_values=values,
        fourier_tail_bounds=[h_fourier_tail_bound(c) for c in cutoffs],
        fourier_monotone=monotone, fourier_bounded=bounded, study=study,
    )
    if mu.kind == 'mu_s':
        params = config.drift_params
        points = np.linspace(1.0, 50.0, 197)
        mu_sampled = eval_mu_s(params, points)
        excess = np.abs(mu_sampled) - decay_bound(s, points) - 2.0 * params.quad.abs_tol
        report.decay_violation = float(excess.max())
        inner = points[points <= mu.domain]
        report.evenness_error = float(np.max(np.abs(mu(inner) - mu(-inner)))) if inner.size else 0.0
        report.origin_error = abs(eval_mu_s(params, 0.0) - mu_s_at_zero(s))
    return report
