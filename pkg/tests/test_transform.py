import math

import numpy as np
import pytest

from src.drift.library import make_drift
from src.errors import DomainError, TransformRangeError
from src.noise.rng import RngStream
from src.transform.zvonkin import (
    build_transform,
    dump_transform_csv,
    eval_b,
    eval_G,
    eval_Ginv,
    eval_Gprime,
)

G_ONE = 0.5 * (1.0 - math.exp(-2.0))


@pytest.fixture(scope='module')
def zero_table():
    return build_transform(make_drift('zero'), 8.0, 1e-3)


@pytest.fixture(scope='module')
def indicator_table():
    return build_transform(make_drift('indicator_01'), 8.0, 1e-4)


@pytest.fixture(scope='module')
def mu_s_table(mu_s_drift):
    return build_transform(mu_s_drift, 8.0, 1e-3)


def test_zero_drift_gives_identity(zero_table):
    assert eval_G(zero_table, 3.7) == pytest.approx(3.7, abs=1e-9)
    assert eval_Ginv(zero_table, -2.5) == pytest.approx(-2.5, abs=1e-9)
    np.testing.assert_array_equal(zero_table.Gp_vals, 1.0)
    ys = np.linspace(-7.9, 7.9, 11)
    np.testing.assert_allclose(eval_b(zero_table, ys), 1.0)


def test_origin_normalisation(mu_s_table):
    i = mu_s_table.origin_index
    assert mu_s_table.x_grid[i] == 0.0
    assert mu_s_table.G_vals[i] == 0.0
    assert mu_s_table.Gp_vals[i] == 1.0


def test_indicator_closed_form(indicator_table):
    assert eval_G(indicator_table, 1.0) == pytest.approx(G_ONE, abs=1e-6)
    assert eval_G(indicator_table, 0.5) == pytest.approx(0.5 * (1.0 - math.exp(-1.0)), abs=1e-6)
    assert eval_G(indicator_table, -3.0) == pytest.approx(-3.0, abs=1e-9)
    assert eval_G(indicator_table, 3.0) == pytest.approx(G_ONE + math.exp(-2.0) * 2.0, abs=1e-6)
    assert eval_Ginv(indicator_table, G_ONE) == pytest.approx(1.0, abs=1e-6)


def test_derivative_bounds(mu_s_drift, mu_s_table):
    l1 = mu_s_drift.l1_norm
    assert mu_s_table.c1 >= math.exp(-2.0 * l1) * (1 - 1e-6)
    assert mu_s_table.c2 <= math.exp(2.0 * l1) * (1 + 1e-6)
    xs = np.linspace(-8.0, 8.0, 401)
    gp = eval_Gprime(mu_s_table, xs)
    assert np.all((gp >= mu_s_table.c1) & (gp <= mu_s_table.c2))


def test_round_trip_and_monotonicity(mu_s_table):
    rng = RngStream(11, 0)
    xs = rng.uniform(-8.0, 8.0, 1000)
    np.testing.assert_allclose(eval_Ginv(mu_s_table, eval_G(mu_s_table, xs)), xs, atol=1e-10, rtol=0)
    a, b = rng.uniform(-8.0, 8.0, 1000), rng.uniform(-8.0, 8.0, 1000)
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    keep = lo < hi
    assert np.all(eval_G(mu_s_table, lo[keep]) < eval_G(mu_s_table, hi[keep]))


def test_bi_lipschitz_sandwich(mu_s_table):
    rng = RngStream(12, 0)
    a, b = rng.uniform(-8.0, 8.0, 500), rng.uniform(-8.0, 8.0, 500)
    gap = np.abs(eval_G(mu_s_table, a) - eval_G(mu_s_table, b))
    dist = np.abs(a - b)
    assert np.all(gap >= mu_s_table.c1 * dist * (1 - 1e-9))
    assert np.all(gap <= mu_s_table.c2 * dist * (1 + 1e-9))


def test_b_composition_and_lipschitz(mu_s_drift, mu_s_table):
    rng = RngStream(13, 0)
    xs = rng.uniform(-7.5, 7.5, 1000)
    np.testing.assert_allclose(eval_b(mu_s_table, eval_G(mu_s_table, xs)),
                               eval_Gprime(mu_s_table, xs), atol=1e-8, rtol=0)
    ys = np.sort(rng.uniform(mu_s_table.y_min, mu_s_table.y_max, 2000))
    slopes = np.abs(np.diff(eval_b(mu_s_table, ys))) / np.diff(ys)
    assert slopes.max() <= 2.0 * mu_s_drift.sup_norm * (1 + 1e-3)


def test_log_derivative_of_gprime(mu_s_drift, mu_s_table):
    # G'' = -2 mu G' away from the origin, where mu_s is smooth
    t = mu_s_table
    i = np.arange(t.origin_index + 500, t.x_grid.size - 1, 97)
    lhs = (t.Gp_vals[i + 1] - t.Gp_vals[i]) / t.step
    rhs = -2.0 * mu_s_drift(t.x_grid[i] + 0.5 * t.step) * t.Gp_vals[i]
    np.testing.assert_allclose(lhs, rhs, atol=50 * t.step)


def test_out_of_range_raises(zero_table):
    with pytest.raises(TransformRangeError):
        eval_G(zero_table, 8.5)
    with pytest.raises(TransformRangeError):
        eval_Ginv(zero_table, -9.0)
    with pytest.raises(TransformRangeError):
        eval_b(zero_table, 100.0)


def test_build_rejects_bad_inputs(mu_s_drift):
    with pytest.raises(DomainError):
        build_transform(make_drift('constant', c=1.0), 8.0, 1e-3)
    with pytest.raises(DomainError):
        build_transform(make_drift('zero'), 8.0, 0.1)
    with pytest.raises(DomainError):
        build_transform(mu_s_drift, 12.0, 1e-3)


def test_dump_csv(tmp_path, zero_table):
    path = tmp_path / 'transform.csv'
    dump_transform_csv(str(path), zero_table, every=1000)
    lines = path.read_text().splitlines()
    assert lines[0] == 'x,T,G,Gprime'
    assert len(lines) == 1 + len(range(0, zero_table.x_grid.size, 1000))
