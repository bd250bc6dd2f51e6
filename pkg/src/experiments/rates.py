"""
Strong error rates

Monte Carlo estimates of the Euler error and of the distance between the two
solutions driven by a coupled noise pair, with log-log rate fits.
"""

import math
import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from src.drift.library import DriftSpec
from src.errors import DomainError, ExperimentAbortError
from src.noise.grids import TimeGrid, make_tilde_grid, uniform_grid
from src.noise.paths import sample_brownian, sample_coupled
from src.noise.rng import streams_for
from src.solver.euler import euler_additive, reference_solution
from src.transform.zvonkin import TransformTable, build_transform
from .config import ExperimentConfig
from .runner import abort_fraction, run_replications

logger = logging.getLogger(__name__)

COUPLING_P = 2.0

_TARGET_SLOPES = {'indicator_01': -0.75, 'hat': -1.0}


@dataclass
class RateEntry:
    n: int
    error: float
    stderr: float
    reps: int
    aborted: int = 0
    fooling_bound: Optional[float] = None
    transformed: Optional[float] = None
    transformed_stderr: Optional[float] = None


@dataclass
class RateSeries:
    """Errors per grid size with the fitted log-log slope"""
    kind: str
    entries: List[RateEntry] = field(default_factory=list)
    fitted_slope: Optional[float] = None
    slope_stderr: Optional[float] = None
    intercept: Optional[float] = None
    exact: bool = False
    target_slope: Optional[float] = None
    monotone: Optional[bool] = None

    @property
    def ns(self) -> List[int]:
        return [e.n for e in self.entries]

    @property
    def errors(self) -> List[float]:
        return [e.error for e in self.entries]


def fit_rate(entries: Sequence) -> Tuple[float, float, float]:
    """
    Weighted least squares of ln(error) on ln(n)

    Weights are 1 / (stderr / error)^2. When any standard error is zero the
    fit falls back to unit weights and the slope error comes from the
    residuals.

    Args:
        entries: (n, error, stderr) triples or RateEntry objects, at least 3

    Returns:
        (slope, slope_stderr, intercept)

    Raises:
        DomainError: for fewer than 3 entries or a nonpositive error
    """
    rows = [(e.n, e.error, e.stderr) if isinstance(e, RateEntry) else tuple(e) for e in entries]
    if len(rows) < 3:
        raise DomainError(f"a rate fit needs at least 3 entries, got {len(rows)}")
    n, err, se = (np.array(col, dtype=float) for col in zip(*rows))
    if np.any(err <= 0.0):
        raise DomainError("rate fits need positive errors")
    x, y = np.log(n), np.log(err)

    if np.all(se > 0.0):
        coef, cov = np.polyfit(x, y, 1, w=err / se, cov='unscaled')
        return float(coef[0]), float(math.sqrt(cov[0, 0])), float(coef[1])

    coef = np.polyfit(x, y, 1)
    residual = y - np.polyval(coef, x)
    spread = float(np.sum((x - x.mean()) ** 2))
    dof = len(x) - 2
    slope_se = math.sqrt(float(residual @ residual) / dof / spread) if dof > 0 else 0.0
    return float(coef[0]), slope_se, float(coef[1])


def moment_error(samples: np.ndarray, p: float) -> Tuple[float, float]:
    """
    E[|D|^p]^(1/p) from samples of |D|^p, with a delta-method standard error
    """
    m = float(np.mean(samples))
    if m == 0.0:
        return 0.0, 0.0
    se_m = float(np.std(samples, ddof=1)) / math.sqrt(samples.size) if samples.size > 1 else 0.0
    error = m ** (1.0 / p)
    return error, error * se_m / (p * m)


def _check_aborts(aborted: int, reps: int, n: int) -> None:
    limit = abort_fraction()
    if aborted > limit * reps:
        raise ExperimentAbortError(
            f"{aborted} of {reps} replications aborted at n={n} (limit {limit:.2%})",
            aborted=aborted, reps=reps)
    if aborted:
        logger.warning("%d of %d replications aborted at n=%d", aborted, reps, n)


def _fit_series(series: RateSeries) -> RateSeries:
    if all(e.error == 0.0 for e in series.entries):
        series.exact = True
        return series
    positive = [e for e in series.entries if e.error > 0.0]
    if len(positive) < len(series.entries):
        logger.warning("%d grid sizes gave error 0 and are left out of the fit",
                       len(series.entries) - len(positive))
    if len(positive) >= 3:
        series.fitted_slope, series.slope_stderr, series.intercept = fit_rate(positive)
    return series


def _target_slope(mu: DriftSpec, s: float) -> Optional[float]:
    if mu.kind == 'mu_s':
        return -(1.0 + s) / 2.0
    return _TARGET_SLOPES.get(mu.kind)


class EulerErrorTask:
    """Per-chunk |X_ref - X_n|^p and abort flags for every n"""

    def __init__(self, mu: DriftSpec, x0: float, n_list: Sequence[int], fine: TimeGrid,
                 seed: int, p: float, sup_norm: bool = False):
        self.mu = mu
        self.x0 = x0
        self.n_list = list(n_list)
        self.fine = fine
        self.seed = seed
        self.p = p
        self.sup_norm = sup_norm

    def __call__(self, start: int, stop: int) -> np.ndarray:
        w = sample_brownian(self.fine, streams_for(self.seed, start, stop))
        ref = reference_solution(self.mu, self.x0, self.fine, w)
        out = np.empty((stop - start, len(self.n_list), 2))
        for k, n in enumerate(self.n_list):
            coarse = euler_additive(self.mu, self.x0, n, w, self.fine)
            if self.sup_norm:
                diff = np.max(np.abs(ref.values - coarse.values), axis=-1)
            else:
                diff = np.abs(ref.terminal - coarse.terminal)
            out[:, k, 0] = diff ** self.p
            out[:, k, 1] = ref.aborted | coarse.aborted
        return out


def estimate_euler_rate(config: ExperimentConfig, workers: Optional[int] = None,
                        chunk_size: Optional[int] = None) -> RateSeries:
    """
    Strong error of the continuous-time Euler scheme against the fine reference

    Coarse schemes and the reference share the Brownian path of each
    replication.

    Args:
        config: Experiment configuration
        workers: Worker processes
        chunk_size: Replications per work unit

    Returns:
        RateSeries of kind euler_rate; exact is set when every error is 0

    Raises:
        ExperimentAbortError: when too many replications left the drift range
    """
    config.validate('rate')
    mu = config.build_drift()
    fine = uniform_grid(config.fine_steps)
    task = EulerErrorTask(mu, config.x0, config.n_list, fine, config.seed, config.p, config.sup_norm)
    rows = run_replications(task, config.reps, workers, chunk_size)

    series = RateSeries(kind='euler_sup_rate' if config.sup_norm else 'euler_rate',
                        target_slope=_target_slope(mu, config.s))
    for k, n in enumerate(config.n_list):
        aborted = rows[:, k, 1].astype(bool)
        _check_aborts(int(aborted.sum()), config.reps, n)
        error, stderr = moment_error(rows[~aborted, k, 0], config.p)
        series.entries.append(RateEntry(n, error, stderr, config.reps, int(aborted.sum())))
    return _fit_series(series)


class CouplingTask:
    """Per-chunk |X_1 - X~_1|^p, abort flags and the transformed distance"""

    def __init__(self, mu: DriftSpec, x0: float, pis: Sequence[TimeGrid], fine: TimeGrid,
                 seed: int, p: float, table: Optional[TransformTable] = None):
        self.mu = mu
        self.x0 = x0
        self.pis = list(pis)
        self.fine = fine
        self.seed = seed
        self.p = p
        self.table = table

    def __call__(self, start: int, stop: int) -> np.ndarray:
        out = np.zeros((stop - start, len(self.pis), 3))
        for k, pi in enumerate(self.pis):
            pair = sample_coupled(pi, self.fine, streams_for(self.seed, start, stop, tag=k + 1))
            x = reference_solution(self.mu, self.x0, self.fine, pair.w)
            x_tilde = reference_solution(self.mu, self.x0, self.fine, pair.w_tilde)
            aborted = x.aborted | x_tilde.aborted
            out[:, k, 0] = np.abs(x.terminal - x_tilde.terminal) ** self.p
            if self.table is not None:
                grid = self.table.x_grid
                aborted |= (np.abs(x.terminal) > self.table.x_max) | (np.abs(x_tilde.terminal) > self.table.x_max)
                g = np.interp(x.terminal, grid, self.table.G_vals)
                g_tilde = np.interp(x_tilde.terminal, grid, self.table.G_vals)
                out[:, k, 2] = np.abs(g - g_tilde) ** self.p
            out[:, k, 1] = aborted
        return out


def estimate_coupling_distance(config: ExperimentConfig,
                               grid_builder: Callable[[int], TimeGrid] = make_tilde_grid,
                               workers: Optional[int] = None,
                               chunk_size: Optional[int] = None) -> RateSeries:
    """
    Distance E[|X_1 - X~_1|^2]^(1/2) between solutions driven by a coupled pair

    Both solutions are fine-grid Euler paths. The fooling bound reported with
    each entry is half the distance. For drifts with finite L1 norm the
    distance after the transform G is reported as well.

    Args:
        config: Experiment configuration
        grid_builder: Maps n to an observation grid contained in the fine grid
        workers: Worker processes
        chunk_size: Replications per work unit

    Returns:
        RateSeries of kind coupling_distance with a monotonicity flag
    """
    config.validate('couple')
    mu = config.build_drift()
    fine = uniform_grid(config.fine_steps)
    pis = [grid_builder(n) for n in config.n_list]
    table = None
    if mu.has_finite_l1:
        table = build_transform(mu, config.drift_range, config.transform_step)
    task = CouplingTask(mu, config.x0, pis, fine, config.seed, COUPLING_P, table)
    rows = run_replications(task, config.reps, workers, chunk_size)

    series = RateSeries(kind='coupling_distance', target_slope=_target_slope(mu, config.s))
    for k, n in enumerate(config.n_list):
        aborted = rows[:, k, 1].astype(bool)
        _check_aborts(int(aborted.sum()), config.reps, n)
        error, stderr = moment_error(rows[~aborted, k, 0], COUPLING_P)
        entry = RateEntry(n, error, stderr, config.reps, int(aborted.sum()), fooling_bound=0.5 * error)
        if table is not None:
            entry.transformed, entry.transformed_stderr = moment_error(rows[~aborted, k, 2], COUPLING_P)
        series.entries.append(entry)

    series.monotone = all(
        b.error <= a.error + 2.0 * math.hypot(a.stderr, b.stderr)
        for a, b in zip(series.entries, series.entries[1:]))
    if not series.monotone:
        logger.warning("Coupling distance is not nonincreasing in n within 2 standard errors")
    return _fit_series(series)
