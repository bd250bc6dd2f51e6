import numpy as np
import pytest

from src.errors import DomainError, GridAlignmentError
from src.noise.grids import TimeGrid, align_indices, make_tilde_grid, refine_grid, uniform_grid
from src.noise.paths import (
    dump_paths_csv,
    interpolate_on,
    sample_bridge,
    sample_brownian,
    sample_coupled,
)
from src.noise.rng import RngStream, standard_normals, streams_for

UNIT = TimeGrid(np.array([0.0, 1.0]))


def test_stream_replay_and_independence():
    a = RngStream(7, 3).standard_normal(5)
    b = RngStream(7, 3).standard_normal(5)
    c = RngStream(7, 4).standard_normal(5)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)


def test_counter_advances():
    rng = RngStream(1, 0)
    start = rng.counter
    rng.standard_normal(100)
    assert rng.counter > start


def test_batched_rows_do_not_depend_on_chunking():
    fine = uniform_grid(32)
    batch = sample_brownian(fine, streams_for(5, 10, 14))
    single = sample_brownian(fine, RngStream(5, 12))
    np.testing.assert_array_equal(batch[2], single)
    assert batch.shape == (4, 33)


def test_brownian_increments_have_step_variance():
    fine = uniform_grid(100_000)
    w = sample_brownian(fine, RngStream(3, 0))
    assert w[0] == 0.0
    z = np.diff(w) / np.sqrt(fine.dt)
    m = z.size
    assert abs(z.mean()) < 3.0 / np.sqrt(m)
    assert abs(z.var() - 1.0) < 0.05


def test_brownian_variance_on_short_grid():
    grid = TimeGrid(np.array([0.0, 0.25]))
    w = sample_brownian(grid, streams_for(9, 0, 20_000))
    assert w[:, -1].var() == pytest.approx(0.25, rel=0.05)


def test_interpolation_of_linear_path_is_identity():
    fine = uniform_grid(16)
    pi = uniform_grid(4)
    w = 3.0 * fine.times
    np.testing.assert_allclose(interpolate_on(pi, fine, w), w, atol=1e-15)


def test_interpolation_midpoints_and_bridge_zeros():
    fine = uniform_grid(16)
    pi = uniform_grid(4)
    w = sample_brownian(fine, RngStream(2, 0))
    bar = interpolate_on(pi, fine, w)
    idx = align_indices(pi, fine)
    np.testing.assert_array_equal(bar[idx], w[idx])
    assert bar[2] == pytest.approx(0.5 * (w[0] + w[4]))
    np.testing.assert_array_equal((w - bar)[idx], 0.0)


def test_interpolation_requires_alignment():
    with pytest.raises(GridAlignmentError):
        interpolate_on(uniform_grid(3), uniform_grid(16), np.zeros(17))


def test_bridge_endpoints_and_covariance():
    length = 2.0
    bridge = sample_bridge(length, 8, streams_for(4, 0, 20_000))
    np.testing.assert_array_equal(bridge[:, 0], 0.0)
    np.testing.assert_array_equal(bridge[:, -1], 0.0)
    assert bridge[:, 4].var() == pytest.approx(length / 4, rel=0.05)
    cov = np.mean(bridge[:, 2] * bridge[:, 4])
    assert cov == pytest.approx(length / 8, abs=0.02)


def test_bridge_validation():
    with pytest.raises(DomainError):
        sample_bridge(0.0, 4, RngStream(0))
    with pytest.raises(DomainError):
        sample_bridge(1.0, 0, RngStream(0))


def test_coupled_pair_agrees_bitwise_on_pi():
    fine = uniform_grid(256)
    pi = make_tilde_grid(8)
    pair = sample_coupled(pi, fine, streams_for(1, 0, 50))
    np.testing.assert_array_equal(pair.w[:, pair.pi_indices], pair.w_tilde[:, pair.pi_indices])
    np.testing.assert_array_equal(pair.w[:, 0], 0.0)
    np.testing.assert_array_equal(pair.w_tilde[:, 0], 0.0)
    assert not np.array_equal(pair.w, pair.w_tilde)


def test_coupled_pair_covariance_single_observation():
    fine = uniform_grid(16)
    pair = sample_coupled(UNIT, fine, streams_for(21, 0, 20_000))
    w, wt = pair.w[:, 8], pair.w_tilde[:, 8]
    assert np.mean(w * wt) == pytest.approx(0.25, abs=0.02)
    assert np.mean(wt * wt) == pytest.approx(0.5, abs=0.03)


def test_coupled_pair_covariance_general_grid():
    fine = uniform_grid(64)
    pi = TimeGrid(np.array([0.0, 0.25, 0.75, 1.0]))
    pair = sample_coupled(pi, fine, streams_for(22, 0, 20_000))
    t, left, right = 0.5, 0.25, 0.75
    a = (t - left) / (right - left)
    k = 32
    expected = left + a * a * (right - left)
    assert np.mean(pair.w[:, k] * pair.w_tilde[:, k]) == pytest.approx(expected, abs=0.025)


def test_bridge_parts_are_uncorrelated():
    fine = uniform_grid(16)
    pair = sample_coupled(UNIT, fine, streams_for(23, 0, 20_000))
    bar = interpolate_on(UNIT, fine, pair.w)
    b, bt = pair.w[:, 8] - bar[:, 8], pair.w_tilde[:, 8] - bar[:, 8]
    assert abs(np.corrcoef(b, bt)[0, 1]) < 4.0 / np.sqrt(20_000)


def test_pi_equal_to_fine_grid_gives_identical_paths():
    fine = uniform_grid(32)
    pair = sample_coupled(fine, fine, streams_for(2, 0, 10))
    np.testing.assert_array_equal(pair.w, pair.w_tilde)


def test_tilde_grid_for_n_one():
    grid = make_tilde_grid(1)
    np.testing.assert_allclose(grid.times, [0.0, 0.125, 0.25, 0.5, 0.75, 1.0])


@pytest.mark.parametrize('n', [1, 3, 8, 64])
def test_tilde_grid_structure(n):
    grid = make_tilde_grid(n)
    assert grid.steps == 5 * n
    assert grid.end == 1.0
    assert grid.max_step <= 1.0 / (4 * n) + 1e-15
    lattice = np.arange(1, 4 * n + 1) / (4 * n)
    assert np.all(np.isin(lattice, grid.times))
    late = (grid.times[:-1] >= 0.5) & np.isclose(grid.dt, 1.0 / (4 * n), rtol=0, atol=1e-15)
    assert late.sum() >= n


def test_tilde_grid_with_extras():
    grid = make_tilde_grid(2, extra=[0.3, 0.9])
    assert grid.steps == 10
    assert 0.3 in grid.times and 0.9 in grid.times
    with pytest.raises(DomainError):
        make_tilde_grid(1, extra=[0.3, 0.6])
    with pytest.raises(DomainError):
        make_tilde_grid(2, extra=[0.25])
    with pytest.raises(DomainError):
        make_tilde_grid(2, extra=[1.5])


def test_time_grid_validation():
    with pytest.raises(DomainError):
        TimeGrid(np.array([0.1, 1.0]))
    with pytest.raises(DomainError):
        TimeGrid(np.array([0.0, 0.5, 0.5]))


def test_refine_grid_contains_original():
    pi = make_tilde_grid(2)
    fine = refine_grid(pi, 4)
    assert fine.steps == 4 * pi.steps
    align_indices(pi, fine)


def test_standard_normals_shapes():
    assert standard_normals(RngStream(0), 3).shape == (3,)
    assert standard_normals(streams_for(0, 0, 2), 3).shape == (2, 3)


def test_dump_paths(tmp_path):
    fine = uniform_grid(4)
    path = tmp_path / 'paths.csv'
    dump_paths_csv(str(path), fine, np.zeros(5), np.ones(5))
    lines = path.read_text().splitlines()
    assert lines[0] == 't,w,w_tilde'
    assert len(lines) == 6


def test_coupled_noise_is_brownian_in_law():
    fine = uniform_grid(16)
    pi = TimeGrid(np.array([0.0, 0.25, 0.75, 1.0]))
    m = 20_000
    wt = sample_coupled(pi, fine, streams_for(24, 0, m)).w_tilde
    for k in (2, 6, 8, 10, 14, 16):
        assert wt[:, k].var() == pytest.approx(fine.times[k], rel=0.05)
    steps = np.diff(wt[:, [0, 4, 8, 12, 16]], axis=1)
    np.testing.assert_allclose(steps.var(axis=0), 0.25, rtol=0.05)
    corr = np.corrcoef(steps, rowvar=False)
    off_diagonal = corr[~np.eye(4, dtype=bool)]
    assert np.all(np.abs(off_diagonal) < 4.0 / np.sqrt(m))


def test_coupled_pair_is_exchangeable():
    fine = uniform_grid(16)
    pi = TimeGrid(np.array([0.0, 0.25, 0.75, 1.0]))
    pair = sample_coupled(pi, fine, streams_for(25, 0, 20_000))
    w, wt = pair.w, pair.w_tilde
    for k in (6, 10):
        assert w[:, k].var() == pytest.approx(wt[:, k].var(), rel=0.06)
    # both cross covariances equal 0.25*0.25 + 0.75*0.375
    forward = np.mean(w[:, 6] * wt[:, 10])
    backward = np.mean(wt[:, 6] * w[:, 10])
    assert forward == pytest.approx(0.34375, abs=0.03)
    assert backward == pytest.approx(0.34375, abs=0.03)
