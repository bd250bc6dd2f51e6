"""
Experiment configuration

A flat record mirroring the command-line flags. Reports embed to_dict(), and
from_dict() accepts that dictionary unchanged.
"""

import os
import json
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Dict, List, Optional

import yaml

from src.drift.fractional import FractionalDriftParams, QuadratureSettings, check_s
from src.drift.library import DriftSpec, make_drift, parse_drift_kind
from src.errors import DomainError
from .kappa import MIN_FINE_STEPS as KAPPA_MIN_STEPS

FORMATS = ('csv', 'json', 'both')


def _dyadic(low: int, high: int) -> List[int]:
    return [2 ** k for k in range(low, high + 1)]


def _float_list(value) -> List[float]:
    if isinstance(value, str):
        try:
            return [float(v) for v in value.split(',') if v.strip()]
        except ValueError:
            raise DomainError(f"malformed list {value!r}") from None
    return [float(v) for v in value]


def _int_list(value) -> List[int]:
    values = _float_list(value)
    if any(v != int(v) for v in values):
        raise DomainError(f"expected integers, got {value!r}")
    return [int(v) for v in values]


@dataclass
class ExperimentConfig:
    """Resolved configuration of one run"""
    drift: str = 'mu-s'
    s: float = 0.75
    x0: float = 0.0
    p: float = 2.0
    n_list: List[int] = field(default_factory=lambda: _dyadic(4, 10))
    fine_steps: int = 2 ** 14
    reps: int = 10_000
    seed: int = 42
    out: str = 'report'
    format: str = 'both'
    z: float = 1.0
    xi: float = 0.0
    deltas: List[float] = field(default_factory=lambda: [2.0 ** -k for k in range(7, 2, -1)])
    seminorm_s: float = 0.5
    cutoffs: List[float] = field(default_factory=lambda: [10.0, 1.0e2, 1.0e3, 1.0e4, 1.0e6, 1.0e9])
    mesh: int = 64
    x_max: Optional[float] = None
    transform_step: float = 1.0e-4
    abs_tol: float = 1.0e-5
    panels: int = 64
    sup_norm: bool = False
    plot: bool = False

    def __post_init__(self):
        self.n_list = _int_list(self.n_list)
        self.deltas = _float_list(self.deltas)
        self.cutoffs = _float_list(self.cutoffs)
        self.validate()

    def validate(self, verb: Optional[str] = None) -> None:
        """
        Check cross-field invariants

        The fine grid must refine every coarse grid by a factor of 16 only
        for the rate and couple commands; kappa needs at least 1024 steps.
        The coupling distance is an L2 quantity, so couple requires p = 2.

        Raises:
            DomainError: on the first violated constraint
        """
        kind, _ = parse_drift_kind(self.drift)
        if kind == 'mu_s':
            check_s(self.s)
        if self.p < 1.0:
            raise DomainError(f"p must be at least 1, got {self.p}")
        if not self.n_list or any(n < 1 for n in self.n_list):
            raise DomainError("n_list must hold positive integers")
        if any(b <= a for a, b in zip(self.n_list, self.n_list[1:])):
            raise DomainError("n_list must be strictly increasing")
        if verb in ('rate', 'couple') and self.fine_steps < 16 * max(self.n_list):
            raise DomainError(
                f"fine_steps={self.fine_steps} must be at least 16 * max(n_list) = {16 * max(self.n_list)}")
        if verb == 'kappa' and self.fine_steps < KAPPA_MIN_STEPS:
            raise DomainError(f"kappa needs fine_steps of at least {KAPPA_MIN_STEPS}, got {self.fine_steps}")
        if verb == 'couple' and self.p != 2.0:
            raise DomainError(f"the coupling distance is measured with p = 2, got p={self.p:g}")
        if self.reps < 100:
            raise DomainError(f"reps must be at least 100, got {self.reps}")
        if self.format not in FORMATS:
            raise DomainError(f"format must be one of {', '.join(FORMATS)}")
        if any(not 0.0 < d <= 1.0 for d in self.deltas):
            raise DomainError("deltas must lie in (0, 1]")
        if not 0.0 < self.seminorm_s < 1.0:
            raise DomainError(f"seminorm_s must lie in (0, 1), got {self.seminorm_s}")
        if any(c <= 0.0 for c in self.cutoffs):
            raise DomainError("cutoffs must be positive")
        if self.x_max is not None and self.x_max <= abs(self.x0):
            raise DomainError(f"x_max={self.x_max} must exceed |x0|")

    @property
    def drift_range(self) -> float:
        """Half width of drift tables and transform grids: |x0| + 8 unless set"""
        return self.x_max if self.x_max is not None else abs(self.x0) + 8.0

    @property
    def drift_params(self) -> FractionalDriftParams:
        return FractionalDriftParams(
            s=self.s, quad=QuadratureSettings(panels=self.panels, abs_tol=self.abs_tol))

    def build_drift(self) -> DriftSpec:
        kind, c = parse_drift_kind(self.drift)
        if kind == 'mu_s':
            return make_drift(kind, params=self.drift_params, x_max=self.drift_range)
        return make_drift(kind, c=c)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ExperimentConfig':
        """Build a config from a flat mapping; keys use either - or _"""
        known = {f.name for f in fields(cls)}
        cleaned = {}
        for key, value in data.items():
            name = key.replace('-', '_')
            if name not in known:
                raise DomainError(f"unknown configuration key {key!r}")
            cleaned[name] = value
        return cls(**cleaned)


def load_config_file(path: str) -> Dict[str, Any]:
    """
    Read a flat JSON or YAML configuration file

    Args:
        path: File ending in .json, .yaml or .yml

    Returns:
        Mapping of configuration keys
    """
    with open(path, 'r', encoding='utf-8') as handle:
        if os.path.splitext(path)[1].lower() in ('.yaml', '.yml'):
            try:
                data = yaml.safe_load(handle)
            except yaml.YAMLError as e:
                raise DomainError(f"malformed YAML in {path}: {e}") from None
        else:
            data = json.load(handle)
    if not isinstance(data, dict):
        raise DomainError(f"configuration file {path} must hold a flat mapping")
    # embedded report configs come wrapped
    if 'config' in data and isinstance(data['config'], dict):
        data = data['config']
    return data

