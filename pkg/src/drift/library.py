"""
Drift Library
Bounded measurable drift coefficients with sup-norm and L1-norm metadata
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from src.errors import DomainError
from .fractional import (
    FractionalDriftParams,
    MuTable,
    build_mu_table,
    decay_bound,
)

DRIFT_KINDS = ('mu_s', 'indicator_01', 'hat', 'zero', 'constant')

_CLI_KINDS = {
    'mu-s': 'mu_s',
    'indicator': 'indicator_01',
    'hat': 'hat',
    'zero': 'zero',
}


class ZeroDrift:
    """mu = 0"""

    def __call__(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))


class ConstantDrift:
    """mu = c"""

    def __init__(self, c: float):
        self.c = float(c)

    def __call__(self, x):
        return np.full_like(np.asarray(x, dtype=float), self.c)


class IndicatorDrift:
    """mu = 1 on [0, 1], zero elsewhere"""

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return ((x >= 0.0) & (x <= 1.0)).astype(float)


class HatDrift:
    """mu = (1 - |x|) on [-1, 1], zero elsewhere"""

    def __call__(self, x):
        return np.maximum(1.0 - np.abs(np.asarray(x, dtype=float)), 0.0)


@dataclass(frozen=True, eq=False)
class DriftSpec:
    """
    A bounded drift coefficient

    eval is vectorised and picklable so specs can be shipped to worker
    processes. domain is the half width outside of which eval is not trusted
    (the mu_s table returns zero there).
    """
    eval: Callable
    sup_norm: float
    l1_norm: float
    label: str
    kind: str
    domain: float = math.inf

    @property
    def has_finite_l1(self) -> bool:
        return math.isfinite(self.l1_norm)

    def __call__(self, x):
        return self.eval(x)


def _mu_s_l1(table: MuTable, s: float) -> float:
    """Trapezoid integral of |mu_s| over the table plus the decay-bound tails"""
    inside = float(integrate.trapezoid(np.abs(table.values), table.x))
    return inside + 2.0 * float(decay_bound(s, 1.0)) / table.x_max


def make_drift(kind: str, *, c: Optional[float] = None,
               params: Optional[FractionalDriftParams] = None,
               x_max: float = 8.0) -> DriftSpec:
    """
    Build a drift coefficient

    Args:
        kind: One of mu_s, indicator_01, hat, zero, constant
        c: Value of the constant drift
        params: Parameters of mu_s (defaults to s = 0.75)
        x_max: Half width of the mu_s table

    Returns:
        DriftSpec with sup-norm and L1-norm metadata
    """
    if kind == 'zero':
        return DriftSpec(ZeroDrift(), 0.0, 0.0, 'zero', kind)
    if kind == 'constant':
        if c is None or not math.isfinite(c):
            raise DomainError("constant drift needs a finite value c")
        return DriftSpec(ConstantDrift(c), abs(c), 0.0 if c == 0 else math.inf,
                         f'constant({c:g})', kind)
    if kind == 'indicator_01':
        return DriftSpec(IndicatorDrift(), 1.0, 1.0, 'indicator_01', kind)
    if kind == 'hat':
        return DriftSpec(HatDrift(), 1.0, 1.0, 'hat', kind)
    if kind == 'mu_s':
        params = params or FractionalDriftParams()
        table = build_mu_table(params, x_max)
        # |F h(x)| <= F h(0) for nonnegative even h
        sup_norm = float(table(0.0))
        return DriftSpec(table, sup_norm, _mu_s_l1(table, params.s),
                         f'mu_s(s={params.s:g})', kind, domain=table.x_max)
    raise DomainError(f"unknown drift kind {kind!r}; expected one of {', '.join(DRIFT_KINDS)}")


def parse_drift_kind(text: str):
    """
    Parse a command-line drift name

    Args:
        text: mu-s, indicator, hat, zero or constant=<c>

    Returns:
        Tuple (kind, c) with c None unless the drift is constant
    """
    text = text.strip()
    if text.startswith('constant='):
        try:
            return 'constant', float(text.split('=', 1)[1])
        except ValueError:
            raise DomainError(f"malformed constant drift {text!r}") from None
    if text in _CLI_KINDS:
        return _CLI_KINDS[text], None
    if text in DRIFT_KINDS and text != 'constant':
        return text, None
    raise DomainError(f"unknown drift {text!r}; expected mu-s, indicator, hat, zero or constant=<c>")
