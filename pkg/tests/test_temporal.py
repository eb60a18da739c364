import numpy as np
import pytest

from elastoinv.data import FrequencySweepData, GridField, ReceiverArray, TimeSeriesData
from elastoinv.errors import ConfigurationError, DomainError
from elastoinv.greens import greens_frequency, kelvin_tensor
from elastoinv.medium import make_medium
from elastoinv.signals import paper_vector_pulse
from elastoinv.temporal import (
    add_noise,
    indicator_I1,
    indicator_I2,
    paper_sweep,
    point_source_series,
    radiating_matrix,
    recover_temporal,
    ring_points,
    synthesize_point_data,
)

MEDIUM = make_medium(2.0, 1.0, 1.0)
X0 = np.array([1.0, 1.0, 0.0])
T = np.arange(0.0, 20.0 + 1e-9, 0.01)
DENSE = np.arange(0.0, 30.0 + 1e-9, 0.1)


@pytest.fixture(scope="module")
def ring_series():
    return point_source_series(MEDIUM, paper_vector_pulse(), ring_points(64), T)


def cofactor_det(A):
    return (
        A[0, 0] * (A[1, 1] * A[2, 2] - A[1, 2] * A[2, 1])
        - A[0, 1] * (A[1, 0] * A[2, 2] - A[1, 2] * A[2, 0])
        + A[0, 2] * (A[1, 0] * A[2, 1] - A[1, 1] * A[2, 0])
    )


def test_paper_sweep():
    w = paper_sweep()
    assert w.size == 50 and w[0] == 1.0 and w[-1] == pytest.approx(20.0, abs=1e-14)
    assert np.diff(w) == pytest.approx(np.full(49, 19 / 49))


def test_ring_points():
    x = ring_points(64)
    assert x.shape == (64, 3)
    np.testing.assert_allclose(np.linalg.norm(x, axis=1), np.sqrt(2), rtol=1e-15)
    np.testing.assert_array_equal(x[0], X0)


def test_radiating_matrix():
    W = radiating_matrix(MEDIUM, 5.0, X0)
    np.testing.assert_array_equal(W.W, greens_frequency(MEDIUM, 5.0, 3, X0))
    np.testing.assert_allclose(W.W, W.W.T, atol=1e-17)
    assert abs(W.det - cofactor_det(W.W)) <= 1e-12 * abs(W.det)
    np.testing.assert_array_equal(radiating_matrix(MEDIUM, 0.0, X0).W, kelvin_tensor(MEDIUM, X0))
    assert all(radiating_matrix(MEDIUM, w, X0).invertible for w in paper_sweep())
    with pytest.raises(DomainError):
        radiating_matrix(MEDIUM, -1.0, X0)


def test_radiating_matrix_with_sampled_source():
    h = 0.1
    vals = np.zeros((1, 5, 5, 5))
    vals[0, 2, 2, 2] = 1 / h**3
    src = GridField(-2 * h * np.ones(3), h * np.ones(3), vals)
    W = radiating_matrix(MEDIUM, 4.0, X0, src)
    np.testing.assert_allclose(W.W, greens_frequency(MEDIUM, 4.0, 3, X0), rtol=1e-13)
    zero = radiating_matrix(MEDIUM, 4.0, X0, src.with_values(0 * vals))
    assert not zero.invertible


def test_indicator_exactness_and_zero_data():
    g = paper_vector_pulse()
    w = paper_sweep()
    data = synthesize_point_data(MEDIUM, g, w, ring_points(8))
    ref = g.spectrum(w)
    for res in (indicator_I1(data, MEDIUM), indicator_I2(data, MEDIUM)):
        assert np.abs(res.estimates - ref).max() <= 1e-10 * np.abs(ref).max()
        assert not res.missing.any()
    zero = FrequencySweepData(data.receivers, w, np.zeros_like(data.values))
    assert np.all(indicator_I1(zero, MEDIUM).estimates == 0)


def test_single_point_average_is_I1():
    g = paper_vector_pulse()
    w = paper_sweep(10)
    data = synthesize_point_data(MEDIUM, g, w, [X0])
    noisy = FrequencySweepData(data.receivers, w, data.values * 1.1 + 0.01j)
    np.testing.assert_array_equal(indicator_I2(noisy, MEDIUM).estimates, indicator_I1(noisy, MEDIUM).estimates)


def test_scaling_equivariance():
    data = synthesize_point_data(MEDIUM, paper_vector_pulse(), paper_sweep(12), ring_points(4))
    doubled = FrequencySweepData(data.receivers, data.omegas, 2 * data.values)
    for ind in (indicator_I1, indicator_I2):
        np.testing.assert_array_equal(ind(doubled, MEDIUM).estimates, 2 * ind(data, MEDIUM).estimates)


def test_missing_frequencies_are_flagged():
    src = GridField(-np.ones(3), np.ones(3), np.zeros((1, 3, 3, 3)))
    data = synthesize_point_data(MEDIUM, paper_vector_pulse(), [1.0, 2.0], [X0])
    res = indicator_I1(data, MEDIUM, source=src)
    assert res.missing.all() and res.points_used == [[], []]
    assert np.isnan(res.rms_error(np.zeros((2, 3))))


def test_I1_needs_x0_among_receivers():
    data = synthesize_point_data(MEDIUM, paper_vector_pulse(), [1.0], [[0.0, 2.0, 0.0]])
    with pytest.raises(DomainError):
        indicator_I1(data, MEDIUM)


def test_averaging_reduces_variance():
    # perturb the per-point estimates directly: U_j = W_j (g_hat + eta_j)
    w = paper_sweep()
    pts = ring_points(64)
    gh = paper_vector_pulse().spectrum(w)
    Ws = np.array([[radiating_matrix(MEDIUM, om, x).W for om in w] for x in pts])  # (M, K, 3, 3)
    est1, est2 = [], []
    for seed in range(1, 21):
        eta = np.random.default_rng(seed).normal(scale=0.1, size=(64, w.size, 3))
        vals = np.einsum("mkij,mkj->mik", Ws, gh[None] + eta)
        data = FrequencySweepData(ReceiverArray(pts), w, vals)
        est1.append(indicator_I1(data, MEDIUM).estimates)
        est2.append(indicator_I2(data, MEDIUM).estimates)
    v1 = np.var(np.array(est1), axis=0).sum(axis=1)
    v2 = np.var(np.array(est2), axis=0).sum(axis=1)
    assert np.mean(v2 < v1) >= 0.75


def test_add_noise(ring_series):
    s = ring_series
    assert np.array_equal(add_noise(s, 0.0, 3).samples, s.samples)
    a, b = add_noise(s, 0.3, 7), add_noise(s, 0.3, 7)
    assert np.array_equal(a.samples, b.samples)
    assert np.all(np.abs(a.samples) <= 1.3 * np.abs(s.samples))
    assert not np.array_equal(a.samples, add_noise(s, 0.3, 8).samples)
    with pytest.raises(ConfigurationError):
        add_noise(s, -0.1, 1)


def test_zero_data_recovers_zero_signal():
    s = TimeSeriesData(ReceiverArray([X0]), 0.0, 0.1, np.zeros((1, 3, 50)))
    _, g = recover_temporal(s, MEDIUM, np.arange(0.0, 5.0, 0.5), s.times)
    assert np.all(g == 0)
    with pytest.raises(ConfigurationError):
        recover_temporal(s, MEDIUM, np.arange(0.0, 5.0, 0.5), s.times, method="I3")


def _relative(rec, ref):
    return np.linalg.norm(rec - ref) / np.linalg.norm(ref)


def test_end_to_end_recovery(ring_series):
    g = paper_vector_pulse()(T)
    _, rec = recover_temporal(ring_series, MEDIUM, DENSE, T, "I1")
    for c in range(3):
        assert _relative(rec[:, c], g[:, c]) <= 5e-2


def test_noisy_I2_within_twice_clean_error(ring_series):
    g = paper_vector_pulse()(T)
    _, clean = recover_temporal(ring_series, MEDIUM, DENSE, T, "I2")
    _, noisy = recover_temporal(add_noise(ring_series, 0.3, 1), MEDIUM, DENSE, T, "I2")
    assert _relative(noisy, g) <= 2 * _relative(clean, g)
