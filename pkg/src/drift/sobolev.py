"""
Sobolev Diagnostics
Numerical estimates of fractional Sobolev seminorms of drift coefficients
"""

import math
import logging
from dataclasses import dataclass, field
from typing import Callable, List

import numpy as np
from scipy import integrate

from src.errors import DomainError

logger = logging.getLogger(__name__)


def _breakpoints(cutoff: float) -> List[float]:
    points = [0.0]
    edge = 1.0
    while edge < cutoff:
        points.append(edge)
        edge *= 10.0
    points.append(cutoff)
    return points


def seminorm_fourier_side(s: float, f_hat: Callable[[float], float], cutoff: float) -> float:
    """
    Fourier-side seminorm integral int_{-cutoff}^{cutoff} |x|^(2s) |f_hat(x)|^2 dx

    The normalising constant c_s of the Fourier characterisation is not
    applied.

    Args:
        s: Smoothness order
        f_hat: Scalar function of a real argument
        cutoff: Half width of the integration range

    Returns:
        Value of the truncated integral
    """
    if cutoff <= 0.0:
        raise DomainError(f"cutoff must be positive, got {cutoff}")

    def integrand(x):
        return abs(x) ** (2.0 * s) * abs(f_hat(x)) ** 2

    total = 0.0
    points = _breakpoints(cutoff)
    for a, b in zip(points[:-1], points[1:]):
        right, _ = integrate.quad(integrand, a, b, limit=200)
        left, _ = integrate.quad(integrand, -b, -a, limit=200)
        total += right + left
    return total


def h_fourier_tail_bound(cutoff: float) -> float:
    """Bound 2 / ln(e + cutoff) on the part of the h_s integral beyond cutoff"""
    return 2.0 / math.log(math.e + cutoff)


def _midpoints(domain_half_width: float, mesh: int):
    if mesh < 16:
        raise DomainError(f"mesh must be at least 16, got {mesh}")
    if domain_half_width <= 0.0:
        raise DomainError(f"domain_half_width must be positive, got {domain_half_width}")
    step = 2.0 * domain_half_width / mesh
    return -domain_half_width + step * (np.arange(mesh) + 0.5), step


def seminorm_direct(f: Callable, s: float, p: float, domain_half_width: float, mesh: int) -> float:
    """
    Double Riemann sum of int int |f(x)-f(y)|^p / |x-y|^(1+sp) over [-L, L]^2

    Cells on the diagonal are left out; their contribution is bounded by
    seminorm_band_bound.

    Args:
        f: Vectorised drift (a DriftSpec or any callable)
        s: Smoothness order in (0, 1)
        p: Integrability exponent, at least 1
        domain_half_width: L
        mesh: Number of cells per axis

    Returns:
        Nonnegative estimate of the truncated seminorm integral
    """
    if not 0.0 < s < 1.0:
        raise DomainError(f"s must lie in (0, 1), got {s}")
    if p < 1.0:
        raise DomainError(f"p must be at least 1, got {p}")
    x, step = _midpoints(domain_half_width, mesh)
    values = np.asarray(f(x), dtype=float)

    total = 0.0
    for lag in range(1, mesh):
        diffs = np.abs(values[lag:] - values[:-lag]) ** p
        total += 2.0 * float(np.sum(diffs)) / (lag * step) ** (1.0 + s * p)
    return total * step * step


def seminorm_band_bound(f: Callable, s: float, p: float, domain_half_width: float,
                        mesh: int, holder_exponent: float = 1.0) -> float:
    """
    Bound on the diagonal band |x-y| < 2L/mesh left out by seminorm_direct

    Uses a local Hoelder estimate |f(x)-f(y)| <= C |x-y|^alpha with C read off
    neighbouring cells.
    """
    x, step = _midpoints(domain_half_width, mesh)
    values = np.asarray(f(x), dtype=float)
    alpha = holder_exponent
    if alpha <= s:
        return math.inf
    constant = float(np.max(np.abs(np.diff(values)))) / step ** alpha
    exponent = (alpha - s) * p
    return 4.0 * domain_half_width * constant ** p * step ** exponent / exponent


@dataclass
class SeminormStudy:
    """Seminorm estimates under successive mesh doublings"""
    s: float
    p: float
    meshes: List[int] = field(default_factory=list)
    values: List[float] = field(default_factory=list)
    band_bounds: List[float] = field(default_factory=list)
    increment_ratios: List[float] = field(default_factory=list)
    diverging: bool = False


def seminorm_refinement_study(f: Callable, s: float, p: float, domain_half_width: float,
                              mesh: int = 32, doublings: int = 5,
                              growth_factor: float = 1.0,
                              holder_exponent: float = 1.0) -> SeminormStudy:
    """
    Refine the mesh and flag divergence of the seminorm estimate

    The estimate is declared divergent when the increment between successive
    doublings grows by more than growth_factor twice in a row.

    Args:
        f: Vectorised drift
        s: Smoothness order
        p: Integrability exponent
        domain_half_width: L
        mesh: Initial mesh
        doublings: Number of mesh doublings
        growth_factor: Threshold on the ratio of successive increments
        holder_exponent: Local Hoelder exponent used for the band bound

    Returns:
        SeminormStudy
    """
    if doublings < 3:
        raise DomainError("at least 3 doublings are needed to judge convergence")
    study = SeminormStudy(s=s, p=p)
    for k in range(doublings + 1):
        m = mesh * 2 ** k
        study.meshes.append(m)
        study.values.append(seminorm_direct(f, s, p, domain_half_width, m))
        study.band_bounds.append(
            seminorm_band_bound(f, s, p, domain_half_width, m, holder_exponent))

    increments = np.diff(study.values)
    for a, b in zip(increments[:-1], increments[1:]):
        study.increment_ratios.append(float(b / a) if a != 0.0 else (math.inf if b > 0 else 0.0))
    last = study.increment_ratios[-2:]
    study.diverging = all(r > growth_factor for r in last)
    if study.diverging:
        logger.warning("Seminorm estimate for s=%s, p=%s keeps growing under refinement", s, p)
    return study
