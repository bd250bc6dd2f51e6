"""
Euler schemes
Continuous-time Euler for dX = mu(X) dt + dW and Euler-Maruyama for dY = b(Y) dW
"""

import logging
from dataclasses import dataclass

import numpy as np

from src.drift.library import DriftSpec
from src.errors import DomainError
from src.noise.grids import TimeGrid, align_indices, uniform_grid
from src.transform.zvonkin import TransformTable

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SdePath:
    """
    Solution values on a fine grid

    values has the shape of the driving noise: one row per replication when
    the noise is batched. aborted marks rows that left the tabulated range.
    """
    fine: TimeGrid
    values: np.ndarray
    x0: float
    scheme: str
    aborted: np.ndarray

    @property
    def terminal(self) -> np.ndarray:
        return self.values[..., -1]


def pairwise_sum(terms: np.ndarray) -> np.ndarray:
    """Sum along the last axis by a balanced binary tree of additions"""
    terms = np.asarray(terms, dtype=float)
    while terms.shape[-1] > 1:
        if terms.shape[-1] % 2:
            pad = np.zeros(terms.shape[:-1] + (1,))
            terms = np.concatenate([terms, pad], axis=-1)
        terms = terms[..., 0::2] + terms[..., 1::2]
    return terms[..., 0]


def euler_additive(mu: DriftSpec, x0: float, n: int, w: np.ndarray, fine: TimeGrid) -> SdePath:
    """
    Continuous-time Euler scheme with n drift steps

    The drift is frozen at the last coarse point and the noise is taken from
    w at every fine point, so X_t = x0 + w_t + D_t with a piecewise linear
    drift displacement D. The terminal displacement is a tree sum of the
    per-step increments; a constant drift on a dyadic grid is therefore
    integrated without rounding.

    Args:
        mu: Drift coefficient
        x0: Initial value
        n: Number of drift steps (coarse points k * T / n)
        w: Brownian path(s) on the fine grid, shape (..., fine.steps+1)
        fine: Fine grid containing the coarse points

    Returns:
        SdePath labelled euler_coarse(n)

    Raises:
        GridAlignmentError: if a coarse point is not on the fine grid
    """
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    w = np.asarray(w, dtype=float)
    if w.shape[-1] != fine.steps + 1:
        raise DomainError("noise path does not match the fine grid")
    coarse = uniform_grid(n, fine.end)
    idx = align_indices(coarse, fine)

    batch = w.shape[:-1]
    base = x0 + w
    values = np.empty_like(base)
    values[..., 0] = base[..., 0]
    displacement = np.zeros(batch)
    increments = np.empty(batch + (n,))
    aborted = np.zeros(batch, dtype=bool)

    for i in range(n):
        state = base[..., idx[i]] + displacement
        aborted |= np.abs(state) > mu.domain
        drift = np.asarray(mu(state), dtype=float)
        h = coarse.times[i + 1] - coarse.times[i]
        increments[..., i] = drift * h

        a, b = idx[i] + 1, idx[i + 1] + 1
        elapsed = fine.times[a:b] - coarse.times[i]
        values[..., a:b] = base[..., a:b] + displacement[..., None] + drift[..., None] * elapsed
        displacement = displacement + increments[..., i]

    values[..., -1] = base[..., -1] + pairwise_sum(increments)
    if np.any(aborted):
        logger.debug("%d of %d Euler paths left the drift range", int(aborted.sum()), aborted.size)
    return SdePath(fine=fine, values=values, x0=x0, scheme=f'euler_coarse({n})', aborted=aborted)


def reference_solution(mu: DriftSpec, x0: float, fine: TimeGrid, w: np.ndarray) -> SdePath:
    """
    Fine-grid Euler solution used as the exact solution

    Experiments pair it with coarse schemes of at most fine.steps / 16 steps.
    """
    if not fine.is_uniform():
        raise DomainError("the reference solution needs a uniform fine grid")
    path = euler_additive(mu, x0, fine.steps, w, fine)
    return SdePath(fine=fine, values=path.values, x0=x0, scheme='euler_fine', aborted=path.aborted)


def euler_multiplicative(table: TransformTable, y0: float, fine: TimeGrid, w: np.ndarray) -> SdePath:
    """
    Euler-Maruyama for dY = b(Y) dW with b = G' o G^-1 from a transform table

    Rows that leave [G(-x_max), G(x_max)] are marked aborted and held at the
    boundary for the rest of the path.

    Args:
        table: Transform table
        y0: Initial value in the range of G
        fine: Time grid
        w: Brownian path(s) on the fine grid

    Returns:
        SdePath labelled euler_maruyama
    """
    if not table.y_min <= y0 <= table.y_max:
        raise DomainError(f"y0={y0:g} is outside the range of G")
    w = np.asarray(w, dtype=float)
    if w.shape[-1] != fine.steps + 1:
        raise DomainError("noise path does not match the fine grid")
    dw = np.diff(w, axis=-1)
    values = np.empty_like(w)
    values[..., 0] = y0
    state = np.full(w.shape[:-1], float(y0))
    aborted = np.zeros(w.shape[:-1], dtype=bool)

    for k in range(fine.steps):
        diffusion = np.interp(np.interp(state, table.G_vals, table.x_grid), table.x_grid, table.Gp_vals)
        state = state + diffusion * dw[..., k]
        outside = (state < table.y_min) | (state > table.y_max)
        aborted |= outside
        state = np.clip(state, table.y_min, table.y_max)
        values[..., k + 1] = state

    if np.any(aborted):
        logger.debug("%d of %d transformed paths left the table range", int(aborted.sum()), aborted.size)
    return SdePath(fine=fine, values=values, x0=y0, scheme='euler_maruyama', aborted=aborted)
