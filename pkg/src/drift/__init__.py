from .fractional import (
    FractionalDriftParams,
    MuTable,
    QuadratureSettings,
    build_mu_table,
    decay_bound,
    eval_h,
    eval_mu_s,
    load_mu_table,
    mu_s_at_zero,
    save_mu_table,
)
from .library import DRIFT_KINDS, DriftSpec, make_drift, parse_drift_kind
from .sobolev import (
    SeminormStudy,
    h_fourier_tail_bound,
    seminorm_band_bound,
    seminorm_direct,
    seminorm_fourier_side,
    seminorm_refinement_study,
)

__all__ = [
    'FractionalDriftParams', 'MuTable', 'QuadratureSettings', 'build_mu_table',
    'decay_bound', 'eval_h', 'eval_mu_s', 'load_mu_table', 'mu_s_at_zero',
    'save_mu_table', 'DRIFT_KINDS', 'DriftSpec', 'make_drift', 'parse_drift_kind',
    'SeminormStudy', 'h_fourier_tail_bound', 'seminorm_band_bound',
    'seminorm_direct', 'seminorm_fourier_side', 'seminorm_refinement_study',
]
