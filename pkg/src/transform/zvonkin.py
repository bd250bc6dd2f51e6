"""
Zvonkin Transform
Tabulates G(x) = int_0^x exp(-2 int_0^y mu) dy and the diffusion b = G' o G^-1
"""

import math
import logging
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from src.drift.library import DriftSpec
from src.errors import DomainError, TransformRangeError

logger = logging.getLogger(__name__)

# slack on range checks, in units of the table step
_RANGE_SLACK = 1.0e-9


@dataclass(frozen=True, eq=False)
class TransformTable:
    """
    Tabulated transform on a uniform grid over [-x_max, x_max]

    The grid always has a node at the origin, where T = G = 0 and G' = 1.
    """
    x_grid: np.ndarray
    T_vals: np.ndarray
    G_vals: np.ndarray
    Gp_vals: np.ndarray
    c1: float
    c2: float
    step: float
    origin_index: int
    l1_norm: float

    @property
    def x_max(self) -> float:
        return float(self.x_grid[-1])

    @property
    def y_min(self) -> float:
        return float(self.G_vals[0])

    @property
    def y_max(self) -> float:
        return float(self.G_vals[-1])


def build_transform(mu: DriftSpec, x_max: float, step: float = 1.0e-4) -> TransformTable:
    """
    Build the transform table for a drift with finite L1 norm

    T is accumulated cell by cell with the midpoint rule, so a drift with
    jumps at grid nodes is integrated exactly; G is the cumulative trapezoid
    of G' = exp(-2T). Both integrals run outward from the origin.

    Args:
        mu: Drift coefficient
        x_max: Half width of the grid
        step: Requested grid step, at most 1e-3 * x_max

    Returns:
        TransformTable

    Raises:
        DomainError: for an infinite L1 norm or a step that is too coarse
    """
    if not mu.has_finite_l1:
        raise DomainError(f"drift {mu.label} has infinite L1 norm; the transform is undefined")
    if x_max <= 0.0:
        raise DomainError(f"x_max must be positive, got {x_max}")
    if not 0.0 < step <= 1.0e-3 * x_max:
        raise DomainError(f"step must lie in (0, 1e-3 * x_max], got {step}")
    if x_max > mu.domain:
        raise DomainError(f"x_max={x_max:g} exceeds the range {mu.domain:g} on which {mu.label} is tabulated")

    cells = int(math.ceil(x_max / step))
    h = x_max / cells
    right = h * np.arange(cells + 1)
    right[-1] = x_max
    left = -right[::-1]

    def accumulate(nodes):
        mids = 0.5 * (nodes[1:] + nodes[:-1])
        increments = np.asarray(mu(mids), dtype=float) * np.diff(nodes)
        return np.concatenate([[0.0], np.cumsum(increments)])

    # walk from the origin: left side is integrated on the reversed grid
    T_right = accumulate(right)
    T_left = accumulate(right * -1.0)[::-1]
    x_grid = np.concatenate([left[:-1], right])
    T_vals = np.concatenate([T_left[:-1], T_right])
    Gp_vals = np.exp(-2.0 * T_vals)

    G_right = integrate.cumulative_trapezoid(Gp_vals[cells:], right, initial=0.0)
    G_left = integrate.cumulative_trapezoid(Gp_vals[cells::-1], -right, initial=0.0)[::-1]
    G_vals = np.concatenate([G_left[:-1], G_right])

    if np.any(np.diff(G_vals) <= 0.0):
        raise DomainError("tabulated G is not strictly increasing; refine the step")

    table = TransformTable(
        x_grid=x_grid,
        T_vals=T_vals,
        G_vals=G_vals,
        Gp_vals=Gp_vals,
        c1=float(Gp_vals.min()),
        c2=float(Gp_vals.max()),
        step=h,
        origin_index=cells,
        l1_norm=mu.l1_norm,
    )
    logger.info("Transform for %s on %d nodes, G' in [%.6g, %.6g]",
                mu.label, x_grid.size, table.c1, table.c2)
    return table


def _check_range(values, low: float, high: float, what: str, slack: float):
    values = np.asarray(values, dtype=float)
    if np.any(values < low - slack) or np.any(values > high + slack):
        raise TransformRangeError(
            f"{what} outside the tabulated range [{low:g}, {high:g}]")


def _interp(x, xp, fp):
    scalar = np.ndim(x) == 0
    out = np.interp(x, xp, fp)
    return float(out) if scalar else out


def eval_G(table: TransformTable, x):
    """Linear interpolation of G; raises TransformRangeError for |x| > x_max"""
    _check_range(x, -table.x_max, table.x_max, "x", _RANGE_SLACK * table.step)
    return _interp(x, table.x_grid, table.G_vals)


def eval_Gprime(table: TransformTable, x):
    """Linear interpolation of G' = exp(-2T)"""
    _check_range(x, -table.x_max, table.x_max, "x", _RANGE_SLACK * table.step)
    return _interp(x, table.x_grid, table.Gp_vals)


def eval_Ginv(table: TransformTable, y):
    """
    Inverse of the interpolated G

    The interpolant is piecewise linear and strictly increasing, so its
    inverse is the piecewise linear interpolant with the axes swapped:
    np.interp does the bisection on G_vals and the local linear solve.
    """
    _check_range(y, table.y_min, table.y_max, "y", _RANGE_SLACK * table.step)
    return _interp(y, table.G_vals, table.x_grid)


def eval_b(table: TransformTable, y):
    """b(y) = G'(G^-1(y))"""
    return eval_Gprime(table, eval_Ginv(table, y))


def dump_transform_csv(path: str, table: TransformTable, every: int = 1) -> None:
    """Write (x, T, G, G') rows, keeping every `every`-th node"""
    data = np.column_stack([table.x_grid, table.T_vals, table.G_vals, table.Gp_vals])[::every]
    np.savetxt(path, data, fmt='%.17g', delimiter=',', header='x,T,G,Gprime', comments='')
