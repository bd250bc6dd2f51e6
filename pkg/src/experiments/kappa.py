"""
Kappa functional

kappa(z) = int_0^1 (exp(i z W_t) - exp(i z W~_t)) dt for the pair coupled at
the single observation time 1.
"""

import math
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate

from src.errors import DomainError
from src.noise.grids import TimeGrid, uniform_grid
from src.noise.paths import sample_coupled
from src.noise.rng import streams_for
from .runner import run_replications

logger = logging.getLogger(__name__)

QUAD_TOL = 1.0e-8
MIN_FINE_STEPS = 2 ** 10


@dataclass
class KappaReport:
    """E|kappa(z)|^2 by quadrature and by Monte Carlo"""
    z: float
    quadrature_value: float
    mc_value: float
    mc_stderr: float
    reps: int
    fine_steps: int
    max_modulus: float

    @property
    def deviation(self) -> float:
        """|quadrature - mc| in units of the Monte Carlo standard error"""
        if self.mc_stderr == 0.0:
            return 0.0 if self.quadrature_value == self.mc_value else math.inf
        return abs(self.quadrature_value - self.mc_value) / self.mc_stderr

    @property
    def agrees(self) -> bool:
        return self.deviation <= 3.0


def _integrand(t: float, s: float, z: float) -> float:
    z2 = z * z
    return math.exp(-0.5 * z2 * (t - s)) * -math.expm1(-z2 * s * (1.0 - t))


def kappa_quadrature(z: float = 1.0) -> float:
    """
    E|kappa(z)|^2 = 4 int_0^1 int_s^1 exp(-z^2 (t-s)/2) (1 - exp(-z^2 s (1-t))) dt ds

    Nested adaptive quadrature to absolute tolerance 1e-8.
    """
    if z == 0.0:
        return 0.0
    value, _ = integrate.dblquad(_integrand, 0.0, 1.0, lambda s: s, lambda s: 1.0,
                                 args=(z,), epsabs=QUAD_TOL / 4.0, epsrel=0.0)
    return 4.0 * value


def kappa_riemann_oracle(z: float = 1.0, cells: int = 1000) -> float:
    """
    Midpoint double sum over cells^2 cells of the symmetric form
    2 (exp(-z^2 |t-s|/2) - exp(-z^2 (t+s-2ts)/2)) on the unit square
    """
    u = (np.arange(cells) + 0.5) / cells
    s, t = np.meshgrid(u, u, indexing='ij')
    z2 = z * z
    body = np.exp(-0.5 * z2 * np.abs(t - s)) - np.exp(-0.5 * z2 * (t + s - 2.0 * t * s))
    return float(2.0 * body.sum() / cells ** 2)


class KappaTask:
    """Per-chunk |kappa(z)|^2 by the trapezoid rule in time"""

    def __init__(self, z: float, fine: TimeGrid, seed: int):
        self.z = z
        self.fine = fine
        self.seed = seed

    def __call__(self, start: int, stop: int) -> np.ndarray:
        pi = TimeGrid(np.array([0.0, 1.0]))
        pair = sample_coupled(pi, self.fine, streams_for(self.seed, start, stop))
        diff = np.exp(1j * self.z * pair.w) - np.exp(1j * self.z * pair.w_tilde)
        kappa = integrate.trapezoid(diff, self.fine.times, axis=-1)
        return np.abs(kappa) ** 2


def kappa_mc(z: float, reps: int, fine_steps: int, seed: int,
             workers: Optional[int] = None, chunk_size: Optional[int] = None) -> KappaReport:
    """
    Monte Carlo estimate of E|kappa(z)|^2 next to the quadrature value

    Args:
        z: Frequency
        reps: Replications
        fine_steps: Uniform time steps, at least 2^10
        seed: Seed of the replication streams
        workers: Worker processes
        chunk_size: Replications per work unit

    Returns:
        KappaReport
    """
    if fine_steps < MIN_FINE_STEPS:
        raise DomainError(f"fine_steps must be at least {MIN_FINE_STEPS}, got {fine_steps}")
    fine = uniform_grid(fine_steps)
    squares = run_replications(KappaTask(z, fine, seed), reps, workers, chunk_size)
    mean = float(np.mean(squares))
    stderr = float(np.std(squares, ddof=1)) / math.sqrt(reps) if reps > 1 else 0.0
    report = KappaReport(
        z=z,
        quadrature_value=kappa_quadrature(z),
        mc_value=mean,
        mc_stderr=stderr,
        reps=reps,
        fine_steps=fine_steps,
        max_modulus=float(np.sqrt(squares.max())) if squares.size else 0.0,
    )
    if not report.agrees:
        logger.warning("kappa(%g): quadrature %.6g and Monte Carlo %.6g differ by %.1f standard errors",
                       z, report.quadrature_value, report.mc_value, report.deviation)
    return report
