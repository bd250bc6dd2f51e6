from .checks import (
    ConsistencySeries,
    SobolevReport,
    TransformCheckReport,
    sobolev_check,
    transform_check,
    transform_consistency,
)
from .config import ExperimentConfig, load_config_file
from .kappa import KappaReport, kappa_mc, kappa_quadrature, kappa_riemann_oracle
from .occupation import OccupationSeries, occupation_mismatch
from .rates import (
    RateEntry,
    RateSeries,
    estimate_coupling_distance,
    estimate_euler_rate,
    fit_rate,
    moment_error,
)
from .runner import run_replications

__all__ = [
    'ConsistencySeries', 'SobolevReport', 'TransformCheckReport', 'sobolev_check',
    'transform_check', 'transform_consistency', 'ExperimentConfig', 'load_config_file',
    'KappaReport', 'kappa_mc', 'kappa_quadrature', 'kappa_riemann_oracle',
    'OccupationSeries', 'occupation_mismatch', 'RateEntry', 'RateSeries',
    'estimate_coupling_distance', 'estimate_euler_rate', 'fit_rate', 'moment_error',
    'run_replications',
]
