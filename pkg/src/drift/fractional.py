"""
Fractional Drift
Evaluates h_s and its cosine transform mu_s(x) = 2 * int_0^inf cos(xz) h_s(z) dz
"""

import math
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple, Union

import numpy as np
from scipy import integrate, special

from src.errors import DomainError, QuadratureAccuracyError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

NODES_PER_PERIOD = 8

# (e+z)^2 |h_s''(z)| <= H2_BOUND * h_s(z) for all z >= 0 and s in (1/2, 1)
H2_BOUND = 10.0

_X_CHUNK = 256


def check_s(s: float) -> None:
    """Reject smoothness parameters outside the open interval (1/2, 1)"""
    if not 0.5 < s < 1.0:
        raise DomainError(f"s must lie in the open interval (1/2, 1), got {s}")


def _as_output(values: np.ndarray, scalar: bool) -> ArrayLike:
    return float(values[0]) if scalar else values


def eval_h(s: float, x: ArrayLike) -> ArrayLike:
    """
    Evaluate h_s(x) = 1 / ((e+|x|)^(1/2+s) * ln(e+|x|))

    Args:
        s: Smoothness parameter in (1/2, 1)
        x: Point or array of points

    Returns:
        h_s at x, same shape as x
    """
    check_s(s)
    scalar = np.ndim(x) == 0
    u = math.e + np.abs(np.atleast_1d(np.asarray(x, dtype=float)))
    return _as_output(1.0 / (u ** (0.5 + s) * np.log(u)), scalar)


def eval_h_prime(s: float, z: ArrayLike) -> ArrayLike:
    """Derivative of h_s on [0, inf)"""
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=float))
    u = math.e + z
    log_u = np.log(u)
    h = 1.0 / (u ** (0.5 + s) * log_u)
    return _as_output(-h * (0.5 + s + 1.0 / log_u) / u, scalar)


def h_tail_integral(s: float, z: float) -> float:
    """Exact value of int_z^inf h_s, which equals E1((s - 1/2) * ln(e + z))"""
    check_s(s)
    return float(special.exp1((s - 0.5) * math.log(math.e + z)))


@dataclass(frozen=True)
class QuadratureSettings:
    """Truncation and panel layout of the cosine quadrature"""
    z_max: float = 1.0e12
    panels: int = 64
    abs_tol: float = 1.0e-5
    z_core: float = 16.0

    def __post_init__(self):
        if self.z_max < 1.0:
            raise DomainError(f"z_max must be at least 1, got {self.z_max}")
        if self.panels < 4:
            raise DomainError(f"panels must be at least 4, got {self.panels}")
        if not self.abs_tol > 0.0:
            raise DomainError(f"abs_tol must be positive, got {self.abs_tol}")
        if not 0.0 < self.z_core <= self.z_max:
            raise DomainError(f"z_core must lie in (0, z_max], got {self.z_core}")

    @property
    def max_resolved_x(self) -> float:
        """Largest |x| whose cosine period holds NODES_PER_PERIOD core panels"""
        return 2.0 * math.pi * self.panels / NODES_PER_PERIOD


@dataclass(frozen=True)
class FractionalDriftParams:
    """Parameters of the drift mu_s"""
    s: float = 0.75
    quad: QuadratureSettings = QuadratureSettings()

    def __post_init__(self):
        check_s(self.s)

    def tail_residual_bound(self, x: ArrayLike) -> ArrayLike:
        """Bound on the error of the analytic tail correction at x != 0"""
        hp = abs(eval_h_prime(self.s, self.quad.z_max))
        x = np.asarray(x, dtype=float)
        with np.errstate(divide='ignore'):
            return np.where(x == 0.0, 0.0, hp / np.square(x))

    def truncation_bound(self) -> float:
        """Upper bound (e+Z)^(1/2-s) / (s-1/2) on int_Z^inf h_s"""
        return (math.e + self.quad.z_max) ** (0.5 - self.s) / (self.s - 0.5)


def _growth(params: FractionalDriftParams) -> float:
    # Linear interpolation on a panel of width g*(e+z) misses h_s by at most
    # H2_BOUND * g^2 * h_s / 12 per unit length. A quarter of abs_tol goes here.
    share = 0.25 * params.quad.abs_tol
    return math.sqrt(12.0 * share / (H2_BOUND * h_tail_integral(params.s, 0.0)))


@lru_cache(maxsize=8)
def _filon_nodes(params: FractionalDriftParams) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes on [0, z_max] and the values of h_s at them"""
    quad = params.quad
    g = _growth(params)
    core = [0.0]
    z = 0.0
    while z < quad.z_core:
        z = min(z + min(g * (math.e + z), 1.0 / quad.panels), quad.z_core)
        core.append(z)
    steps = math.ceil(math.log((math.e + quad.z_max) / (math.e + quad.z_core)) / math.log1p(g))
    graded = (math.e + quad.z_core) * np.power(1.0 + g, np.arange(1, steps + 1)) - math.e
    graded[-1] = quad.z_max
    nodes = np.concatenate([np.asarray(core), graded[graded > quad.z_core]])
    logger.debug("Filon layout for s=%s: %d nodes up to z=%g", params.s, nodes.size, quad.z_max)
    return nodes, eval_h(params.s, nodes)


def _sin_shape(theta: np.ndarray) -> np.ndarray:
    """(sin t - t cos t) / t^2 with a series branch near zero"""
    out = np.empty_like(theta)
    small = np.abs(theta) < 1.0e-2
    t = theta[small]
    out[small] = t / 3.0 - t ** 3 / 30.0 + t ** 5 / 840.0
    t = theta[~small]
    out[~small] = (np.sin(t) - t * np.cos(t)) / (t * t)
    return out


def _filon_cosine(x: np.ndarray, nodes: np.ndarray, values: np.ndarray) -> np.ndarray:
    """
    Composite Filon rule for int cos(xz) L(z) dz, L the piecewise linear
    interpolant of the sampled values
    """
    width = np.diff(nodes)
    centre = 0.5 * (nodes[:-1] + nodes[1:])
    mean = 0.5 * (values[:-1] + values[1:])
    rise = values[1:] - values[:-1]

    phase = np.outer(x, centre)
    theta = 0.5 * np.outer(x, width)
    even_part = width * mean * np.cos(phase) * np.sinc(theta / math.pi)
    odd_part = 0.5 * width * rise * np.sin(phase) * _sin_shape(theta)
    return np.sum(even_part - odd_part, axis=1)


def _low_frequency_tail(s: float, z_max: float, x: float, epsabs: float) -> float:
    """
    int_{z_max}^inf cos(xz) h_s(z) dz for x too small for the asymptotic form

    With u = xz the integrand is h_s(u/x)/x. On u < 1 the cosine is written as
    1 - 2 sin^2(u/2) so the exact tail of h_s carries the bulk, and the
    oscillatory rest on [max(x z_max, 1), inf) goes to QUADPACK's Fourier rule.
    """
    def scaled(u):
        return eval_h(s, u / x) / x

    a = x * z_max
    total, error = 0.0, 0.0
    if a < 1.0:
        bulk = h_tail_integral(s, z_max) - h_tail_integral(s, 1.0 / x)
        dent, err = integrate.quad(lambda u: 2.0 * math.sin(0.5 * u) ** 2 * scaled(u), a, 1.0,
                                   epsabs=epsabs, epsrel=0.0, limit=200)
        total += bulk - dent
        error += err
    wave, err = integrate.quad(scaled, max(a, 1.0), np.inf, weight='cos', wvar=1.0, epsabs=epsabs)
    total += wave
    error += err
    if error > 2.0 * epsabs:
        raise QuadratureAccuracyError(f"tail at x={x:g} reached only {error:.3g}")
    return total


def _tail(params: FractionalDriftParams, x: np.ndarray) -> np.ndarray:
    """Contribution of [z_max, inf), exact at x = 0 and asymptotic for most x"""
    s = params.s
    z = params.quad.z_max
    out = np.empty_like(x)
    with np.errstate(divide='ignore'):
        zero = ~np.isfinite(1.0 / x)
    out[zero] = h_tail_integral(s, z)

    residual = params.tail_residual_bound(np.where(zero, 1.0, x))
    low = ~zero & (residual > 0.5 * params.quad.abs_tol)
    for i in np.flatnonzero(low):
        out[i] = _low_frequency_tail(s, z, float(x[i]), 0.1 * params.quad.abs_tol)

    rest = ~zero & ~low
    xs = x[rest]
    if xs.size:
        hz = eval_h(s, z)
        hpz = eval_h_prime(s, z)
        out[rest] = -np.sin(xs * z) * hz / xs - np.cos(xs * z) * hpz / (xs * xs)
    return out


def eval_mu_s(params: FractionalDriftParams, x: ArrayLike) -> ArrayLike:
    """
    Evaluate mu_s(x) = 2 * int_0^inf cos(xz) h_s(z) dz

    The integral over [0, z_max] uses the composite Filon rule. The tail is
    added analytically, or through QAWF when x is too small for the asymptotic
    form, so the absolute error stays within 2 * abs_tol.

    Args:
        params: Drift parameters with quadrature settings
        x: Point or array of points

    Returns:
        mu_s at x, same shape as x

    Raises:
        QuadratureAccuracyError: if a cosine period is resolved by fewer than
            8 core panels or the tail correction is not accurate enough
    """
    scalar = np.ndim(x) == 0
    ax = np.abs(np.atleast_1d(np.asarray(x, dtype=float))).ravel()
    limit = params.quad.max_resolved_x
    if np.any(ax > limit):
        raise QuadratureAccuracyError(
            f"|x| up to {ax.max():g} needs more than {params.quad.panels} panels per unit "
            f"(resolved up to |x| = {limit:g})")

    nodes, values = _filon_nodes(params)
    out = np.empty_like(ax)
    for start in range(0, ax.size, _X_CHUNK):
        part = ax[start:start + _X_CHUNK]
        out[start:start + _X_CHUNK] = _filon_cosine(part, nodes, values)
    out = 2.0 * (out + _tail(params, ax))
    if scalar:
        return float(out[0])
    return out.reshape(np.shape(x))


def mu_s_at_zero(s: float) -> float:
    """Closed form mu_s(0) = 2 * E1(s - 1/2)"""
    return 2.0 * h_tail_integral(s, 0.0)


def decay_bound(s: float, x: ArrayLike) -> ArrayLike:
    """Envelope 4(3/2+s)/x^2 on |mu_s(x)|"""
    return 4.0 * (1.5 + s) / np.square(x)


@dataclass(frozen=True, eq=False)
class MuTable:
    """Tabulated mu_s on [-x_max, x_max] for fast interpolation"""
    s: float
    x: np.ndarray
    values: np.ndarray
    interp_error: float

    @property
    def x_max(self) -> float:
        return float(self.x[-1])

    def __call__(self, x: ArrayLike) -> ArrayLike:
        """Linear interpolation, zero outside the table"""
        return np.interp(x, self.x, self.values, left=0.0, right=0.0)


def cache_grid(x_max: float, step: float = 2.0e-3, x_floor: float = 1.0e-10,
               ratio: float = 1.01) -> np.ndarray:
    """
    Symmetric grid that is geometric on (0, 1] and uniform on [1, x_max]

    mu_s is only Hoelder continuous at the origin, so nodes crowd there.
    """
    if not ratio > 1.0:
        raise DomainError(f"ratio must exceed 1, got {ratio}")
    inner = x_floor * np.power(ratio, np.arange(math.ceil(math.log(1.0 / x_floor) / math.log(ratio))))
    inner = inner[inner < min(1.0, x_max)]
    if x_max > 1.0:
        outer = 1.0 + step * np.arange(math.ceil((x_max - 1.0) / step))
        outer = outer[outer < x_max]
    else:
        outer = np.empty(0)
    positive = np.concatenate([inner, outer, [x_max]])
    return np.concatenate([-positive[::-1], [0.0], positive])


def _table_error(params: FractionalDriftParams, half: np.ndarray, half_values: np.ndarray,
                 sample_every: int) -> float:
    # the cell touching the origin carries the Hoelder cusp and is left out
    mids = 0.5 * (half[1:-1] + half[2:])[::sample_every]
    if not mids.size:
        return 0.0
    exact = eval_mu_s(params, mids)
    return float(np.max(np.abs(exact - np.interp(mids, half, half_values))))


def build_mu_table(params: FractionalDriftParams, x_max: float,
                   step: float = 2.0e-3, ratio: float = 1.01, sample_every: int = 16,
                   max_refinements: int = 4) -> MuTable:
    """
    Precompute mu_s on a cache grid

    The grid is refined until the interpolation error measured at cell
    midpoints is at most abs_tol; each refinement halves the uniform step
    and the excess ratio - 1 of the geometric part.

    Args:
        params: Drift parameters
        x_max: Half width of the tabulated range
        step: Initial grid step on |x| >= 1
        ratio: Initial ratio of the geometric part on (0, 1]
        sample_every: Interpolation error is measured at the midpoint of
            every sample_every-th cell
        max_refinements: Refinements tried before giving up

    Returns:
        MuTable with the measured interpolation error

    Raises:
        QuadratureAccuracyError: if the error stays above abs_tol
    """
    if x_max <= 0.0:
        raise DomainError(f"x_max must be positive, got {x_max}")
    tol = params.quad.abs_tol
    for attempt in range(max_refinements + 1):
        grid = cache_grid(x_max, step, ratio=ratio)
        half = grid[grid >= 0.0]
        half_values = eval_mu_s(params, half)
        interp_error = _table_error(params, half, half_values, sample_every)
        if interp_error <= tol:
            break
        logger.debug("mu_s table error %.3g above %.3g with step=%g ratio=%g, refining",
                     interp_error, tol, step, ratio)
        step *= 0.5
        ratio = 1.0 + 0.5 * (ratio - 1.0)
    else:
        raise QuadratureAccuracyError(
            f"mu_s table interpolation error {interp_error:.3g} exceeds abs_tol {tol:.3g} "
            f"after {max_refinements} refinements")

    values = np.concatenate([half_values[:0:-1], half_values])
    logger.info("Tabulated mu_%s on %d nodes over [-%g, %g], interpolation error %.3g",
                params.s, grid.size, x_max, x_max, interp_error)
    return MuTable(s=params.s, x=grid, values=values, interp_error=interp_error)


def save_mu_table(path: str, table: MuTable) -> None:
    """Write the table as two-column CSV with 17 significant digits"""
    data = np.column_stack([table.x, table.values])
    np.savetxt(path, data, fmt='%.17g', delimiter=',', header='x,mu_s', comments='')


def load_mu_table(path: str, s: float, interp_error: float = float('nan')) -> MuTable:
    """Read a table written by save_mu_table"""
    data = np.loadtxt(path, delimiter=',', skiprows=1, ndmin=2)
    return MuTable(s=s, x=data[:, 0], values=data[:, 1], interp_error=interp_error)
