import numpy as np
import pytest
from scipy import integrate

from elastoinv.data import GridField, ReceiverArray, TimeSeriesData
from elastoinv.errors import ConfigurationError, DomainError
from elastoinv.forward import synthesize_frequency_data_2d
from elastoinv.greens import greens_frequency
from elastoinv.medium import hankel1, make_medium
from elastoinv.signals import paper_pulse
from elastoinv.sources import reference_fields
from elastoinv.transforms import (
    ModalCoefficients,
    decompose_field_2d,
    decouple_circle,
    frequency_to_time,
    helmholtz_decompose_2d,
    modal_matrix,
    modal_to_displacement,
    modal_to_potentials,
    time_to_frequency,
)

MEDIUM = make_medium(2.0, 1.0, 1.0)
REC = ReceiverArray.circle(64, 2.0)


def pulse_series(dt=0.01, T=20.0):
    g = paper_pulse()
    t = np.arange(0.0, T + 1e-9, dt)
    return g, t, TimeSeriesData(ReceiverArray([[1.0, 0.0]]), 0.0, dt, g(t)[None, None, :])


def mode_gradient(n, k, rec=REC):
    """Cartesian gradient of ``H_n(k r) e^{i n theta}`` from the ladder identities
    ``(d1 + i d2) -> -k H_{n+1} e^{i(n+1)theta}`` and ``(d1 - i d2) -> k H_{n-1} e^{i(n-1)theta}``."""
    th = rec.angles()
    R = rec.radius
    a = -k * hankel1(n + 1, k * R) * np.exp(1j * (n + 1) * th)
    b = k * hankel1(n - 1, k * R) * np.exp(1j * (n - 1) * th)
    return (a + b) / 2, (a - b) / 2j


# -- time / frequency -----------------------------------------------------


def test_zero_series_gives_zero_sweep():
    s = TimeSeriesData(REC, 0.0, 0.1, np.zeros((64, 2, 11)))
    assert np.all(time_to_frequency(s, [1.0, 2.0]).values == 0)
    with pytest.raises(DomainError):
        time_to_frequency(TimeSeriesData(REC, 0.0, 0.1, np.zeros((64, 2, 0))), [1.0])


def test_transform_against_adaptive_quadrature():
    g, _, s = pulse_series()
    re = integrate.quad(lambda t: g(t) * np.cos(5 * t), 0, 5, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
    im = integrate.quad(lambda t: g(t) * np.sin(5 * t), 0, 5, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
    val = time_to_frequency(s, [5.0]).values[0, 0, 0]
    assert abs(val - (re + 1j * im)) <= 1e-8 * abs(re + 1j * im)


def test_transform_conjugate_symmetry_and_scaling():
    _, _, s = pulse_series()
    out = time_to_frequency(s, [-3.0, 3.0]).values[0, 0]
    assert out[0] == np.conj(out[1])
    doubled = TimeSeriesData(s.receivers, 0.0, s.dt, 2 * s.samples)
    np.testing.assert_array_equal(time_to_frequency(doubled, [3.0]).values, 2 * time_to_frequency(s, [3.0]).values)


def test_inverse_transform_zero_and_grid_checks():
    assert np.all(frequency_to_time([0.0, 1.0, 2.0], np.zeros(3), [0.5, 1.0]) == 0)
    with pytest.raises(ConfigurationError):
        frequency_to_time([0.0, 1.0, 3.0], np.ones(3), [0.5])
    with pytest.raises(ConfigurationError):
        frequency_to_time([0.0], np.ones(1), [0.5])


def test_round_trip():
    g, t, s = pulse_series()
    w = np.linspace(0.0, 25.0, 200)
    back = frequency_to_time(w, time_to_frequency(s, w).values[0, 0], t)
    assert np.linalg.norm(back - g(t)) <= 1e-2 * np.linalg.norm(g(t))


# -- Helmholtz decomposition ----------------------------------------------


def _bump(x):
    return np.exp(-12 * np.sum((x - [0.2, -0.1]) ** 2, axis=-1))


def _bump_grad(x):
    return -24 * (x - [0.2, -0.1]) * _bump(x)[..., None]


def test_pure_gradient_and_pure_curl():
    grad = GridField.from_function(_bump_grad, 128, 4.0)
    fp, fs = helmholtz_decompose_2d(grad)
    assert np.linalg.norm(fs.values) <= 1e-8 * np.linalg.norm(fp.values)
    curl = GridField.from_function(lambda x: _bump_grad(x)[..., ::-1] * [1, -1], 128, 4.0)
    fp, fs = helmholtz_decompose_2d(curl)
    assert np.linalg.norm(fp.values) <= 1e-8 * np.linalg.norm(fs.values)


def test_projection_up_to_gauge():
    grad = GridField.from_function(_bump_grad, 128, 4.0)
    fp, _ = helmholtz_decompose_2d(grad)
    truth = _bump(grad.points())
    err = fp.values[0] - truth
    assert np.abs(err - err.mean()).max() <= 1e-8


def test_reference_potentials_recovered():
    f, fp, fs = reference_fields(128, 4.0)
    rp, rs = helmholtz_decompose_2d(f)
    assert np.linalg.norm(rp.values - fp.values) <= 1e-2 * np.linalg.norm(fp.values)
    assert np.linalg.norm(rs.values - fs.values) <= 1e-2 * np.linalg.norm(fs.values)


def test_support_in_margin_rejected():
    f, _, _ = reference_fields(64, 1.2)
    with pytest.raises(DomainError):
        helmholtz_decompose_2d(f)


# -- modal decoupling -----------------------------------------------------


def test_zero_field_gives_zero_coefficients():
    c = decouple_circle(np.zeros((64, 2)), MEDIUM, 3.0, N=20, receivers=REC)
    assert np.all(c.u_p == 0) and np.all(c.u_s == 0)


def test_single_p_mode():
    kp = 3.0 / MEDIUM.c_p
    U = np.column_stack(mode_gradient(0, kp))
    c = decouple_circle(U, MEDIUM, 3.0, N=20, receivers=REC)
    assert c.coefficient("p", 0) == pytest.approx(1.0, abs=1e-8)
    others = np.concatenate([np.delete(c.u_p, np.flatnonzero(c.orders == 0)), c.u_s])
    assert np.abs(others).max() <= 1e-8


def test_arguments_of_modal_matrix():
    c = decouple_circle(np.zeros((64, 2)), MEDIUM, 3.0, N=4, receivers=REC)
    assert c.k_p * c.radius == pytest.approx(3.0) and c.k_s * c.radius == pytest.approx(6.0)
    A = modal_matrix(2, 3.0, 6.0)
    assert A[0, 1] == pytest.approx(2j * hankel1(2, 6.0))


@pytest.mark.parametrize("omega", [3.0, 10.0])
def test_coefficient_round_trip(omega, rng):
    N = 16
    R = 2.0
    rec = ReceiverArray.circle(4 * N, R)
    orders = np.arange(-N, N + 1)
    kp, ks = omega / MEDIUM.c_p, omega / MEDIUM.c_s
    # scale every mode to unit size on the circle so none drowns in round-off
    size = np.array([np.linalg.norm(modal_matrix(int(n), kp * R, ks * R), axis=0) for n in orders])
    up = (rng.normal(size=orders.size) + 1j * rng.normal(size=orders.size)) / size[:, 0]
    us = (rng.normal(size=orders.size) + 1j * rng.normal(size=orders.size)) / size[:, 1]
    c = ModalCoefficients(omega, R, orders, up, us, kp, ks)
    back = decouple_circle(modal_to_displacement(c, R, rec.angles()), MEDIUM, omega, N=N, receivers=rec)
    np.testing.assert_allclose(back.u_p, up, rtol=1e-10)
    np.testing.assert_allclose(back.u_s, us, rtol=1e-10)
    p0, s0 = modal_to_potentials(c, R, rec.angles())
    p1, s1 = modal_to_potentials(back, R, rec.angles())
    assert np.linalg.norm(p1 - p0) <= 1e-10 * np.linalg.norm(p0)
    assert np.linalg.norm(s1 - s0) <= 1e-10 * np.linalg.norm(s0)


def test_potentials_zero_and_radius_check():
    c = ModalCoefficients(3.0, 2.0, np.arange(-2, 3), np.zeros(5, complex), np.zeros(5, complex), 1.5, 3.0)
    up, us = modal_to_potentials(c, 2.5, np.linspace(0, 1, 4))
    assert np.all(up == 0) and np.all(us == 0)
    with pytest.raises(DomainError):
        modal_to_potentials(c, 1.9, [0.0])


def test_receiver_requirements():
    with pytest.raises(ConfigurationError):
        decouple_circle(np.zeros((8, 2)), MEDIUM, 3.0, N=4, receivers=ReceiverArray.circle(8, 2.0))
    pts = ReceiverArray.circle(16, 2.0).points[np.r_[1:16, 0][::-1]]
    with pytest.raises(ConfigurationError):
        decouple_circle(np.zeros((16, 2)), MEDIUM, 3.0, receivers=ReceiverArray(pts))


def test_adaptive_truncation_for_radiated_field():
    f, _, _ = reference_fields(64, 1.5, 1.5)
    sweep = synthesize_frequency_data_2d(MEDIUM, f, 1.0, [3.0], REC)
    c = decouple_circle(sweep, MEDIUM, 3.0)
    mag = np.maximum(np.abs(c.u_p), np.abs(c.u_s))
    assert c.N < 31
    assert mag[np.abs(c.orders) == c.N].max() < 1e-12 * mag.max()


# -- field splitting on a grid --------------------------------------------


def _plane_wave(k, d, pol, n=64, hw=1.0):
    g = GridField.centered(n, hw, 2, 2)
    phase = np.exp(1j * k * (g.points() @ d))
    return GridField(g.origin, g.spacing, np.stack([pol[0] * phase, pol[1] * phase]))


def test_plane_waves_split():
    om = 3.0
    d = np.array([0.6, 0.8])
    dp = np.array([-0.8, 0.6])
    P = _plane_wave(om / MEDIUM.c_p, d, d)
    up, us = decompose_field_2d(P, MEDIUM, om)
    assert np.linalg.norm(us.values) <= 1e-4 * np.linalg.norm(up.values)
    S = _plane_wave(om / MEDIUM.c_s, d, dp)
    up, us = decompose_field_2d(S, MEDIUM, om)
    assert np.linalg.norm(up.values) <= 1e-4 * np.linalg.norm(us.values)


def test_split_sums_to_radiated_field():
    om = 3.0
    g = GridField.centered(96, 1.0, 2, 2)
    src = np.array([2.5, 0.4])
    G = greens_frequency(MEDIUM, om, 2, g.points() - src)
    U = GridField(g.origin, g.spacing, np.moveaxis(G[..., :, 0], -1, 0))
    up, us = decompose_field_2d(U, MEDIUM, om)
    inner = U.values[:, 4:-4, 4:-4]
    assert np.linalg.norm(up.values + us.values - inner) <= 1e-6 * np.linalg.norm(inner)


def test_split_resolution_check():
    with pytest.raises(ConfigurationError):
        decompose_field_2d(_plane_wave(1.0, np.array([1.0, 0]), [1, 0], n=12, hw=20.0), MEDIUM, 20.0)
