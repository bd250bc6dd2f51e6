import math

import numpy as np
import pytest
from scipy import special

from src.drift.fractional import eval_h
from src.drift.sobolev import (
    h_fourier_tail_bound,
    seminorm_band_bound,
    seminorm_direct,
    seminorm_fourier_side,
    seminorm_refinement_study,
)
from src.errors import DomainError


@pytest.mark.parametrize('s', [0.6, 0.75, 0.9])
def test_fourier_side_gaussian_oracle(s):
    value = seminorm_fourier_side(s, lambda x: math.exp(-0.5 * x * x), 50.0)
    assert value == pytest.approx(special.gamma(s + 0.5), rel=1e-8)


def test_fourier_side_of_h_grows_and_stays_below_two():
    s = 0.75
    cutoffs = [10.0, 1e2, 1e3, 1e4, 1e6]
    values = [seminorm_fourier_side(s, lambda x: eval_h(s, x), c) for c in cutoffs]
    assert all(b >= a for a, b in zip(values, values[1:]))
    assert values[-1] <= 2.0
    for c, v, later in zip(cutoffs, values, values[1:]):
        assert later - v <= h_fourier_tail_bound(c)


def test_fourier_side_rejects_nonpositive_cutoff():
    with pytest.raises(DomainError):
        seminorm_fourier_side(0.75, lambda x: 1.0, 0.0)


def test_direct_seminorm_of_constants_is_zero(zero_drift):
    assert seminorm_direct(zero_drift, 0.5, 2.0, 4.0, 32) == 0.0
    assert seminorm_direct(lambda x: np.full_like(x, 3.0), 0.5, 2.0, 4.0, 32) == 0.0


def test_direct_seminorm_is_positive_for_hat(hat_drift):
    assert seminorm_direct(hat_drift, 0.5, 2.0, 2.0, 64) > 0.0


def test_direct_seminorm_validation(hat_drift):
    with pytest.raises(DomainError):
        seminorm_direct(hat_drift, 0.5, 2.0, 2.0, 8)
    with pytest.raises(DomainError):
        seminorm_direct(hat_drift, 1.5, 2.0, 2.0, 32)
    with pytest.raises(DomainError):
        seminorm_direct(hat_drift, 0.5, 0.5, 2.0, 32)


def test_band_bound_shrinks_for_lipschitz_drift(hat_drift):
    coarse = seminorm_band_bound(hat_drift, 0.5, 2.0, 2.0, 32)
    fine = seminorm_band_bound(hat_drift, 0.5, 2.0, 2.0, 128)
    assert fine < coarse
    assert seminorm_band_bound(hat_drift, 0.5, 2.0, 2.0, 32, holder_exponent=0.4) == math.inf


def test_refinement_study_converges_for_hat(hat_drift):
    study = seminorm_refinement_study(hat_drift, 0.5, 2.0, 2.0, mesh=32, doublings=4)
    assert study.meshes == [32, 64, 128, 256, 512]
    assert not study.diverging
    assert all(r < 1.0 for r in study.increment_ratios)


def test_refinement_study_flags_jump_above_critical_order(indicator_drift):
    # a jump has infinite W^{s,p} seminorm once s*p > 1
    study = seminorm_refinement_study(indicator_drift, 0.75, 2.0, 4.0, mesh=32, doublings=4)
    assert study.diverging
    assert study.values[-1] > study.values[0]


def test_refinement_study_needs_three_doublings(hat_drift):
    with pytest.raises(DomainError):
        seminorm_refinement_study(hat_drift, 0.5, 2.0, 2.0, doublings=2)


def test_jump_below_critical_order_settles(indicator_drift):
    study = seminorm_refinement_study(indicator_drift, 0.4, 2.0, 4.0, mesh=32, doublings=4)
    assert not study.diverging
    assert study.increment_ratios[-1] < 1.0
    assert study.increment_ratios[-2] < 1.0


def test_jump_just_above_critical_order_diverges(indicator_drift):
    study = seminorm_refinement_study(indicator_drift, 0.6, 2.0, 4.0, mesh=32, doublings=4)
    assert study.diverging
    assert study.increment_ratios[-1] > 1.0
