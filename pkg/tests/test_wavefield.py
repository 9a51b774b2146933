import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chirp_af.geometry import CircularArc, LineSegment, Position, separation
from chirp_af.wavefield import (
    SingularityError,
    Wavenumber,
    chirp_sample,
    local_amplitude,
    local_phase,
    local_wavenumber,
    pair_product,
    propagation_coeff,
)

K = 2 * math.pi


def test_propagation_examples():
    assert propagation_coeff((1, 0), (0, 0), K) == pytest.approx(1 + 0j, abs=1e-15)
    assert propagation_coeff((2, 0), (0, 0), K) == pytest.approx(0.5 + 0j, abs=1e-15)
    assert propagation_coeff((0.25, 0), (0, 0), K) == pytest.approx(-4j, abs=1e-14)


def test_propagation_modulus():
    z = propagation_coeff((3.3, -1.2), (0.1, 0.7), Wavenumber(5.0))
    assert abs(z) == pytest.approx(1 / math.hypot(3.2, -1.9))


def test_coincident_points_are_singular():
    with pytest.raises(SingularityError):
        propagation_coeff((1, 1), (1, 1), K)
    with pytest.raises(SingularityError):
        pair_product(CircularArc(10.0, math.pi), 0.0, (10.0, 0.0), (0, 0), K)


def test_wavenumber_from_wavelength():
    assert Wavenumber.from_wavelength(0.5).k_s == pytest.approx(4 * math.pi)
    with pytest.raises(ValueError):
        Wavenumber(0.0)


def test_matched_pair_product_is_real():
    ca = CircularArc(1000.0, math.pi)
    tau = np.linspace(-3, 3, 7)
    g = pair_product(ca, tau, (4, -2), (4, -2), K)
    assert np.all(g.imag == 0)
    r = np.linalg.norm(ca.points(tau) - [4, -2], axis=1)
    assert np.allclose(g.real, 1000.0 / r**2, rtol=1e-15)


def test_pair_product_examples():
    ca = CircularArc(1000.0, math.pi)
    g = pair_product(ca, 0.0, (0, 0), (3, 0), K)
    # ranges 1000 and 997: amplitude 1000/(1000*997), phase 2 pi * 3
    assert abs(g) == pytest.approx(1 / 997, rel=1e-14)
    assert g == pytest.approx(1 / 997 + 0j, abs=1e-15)
    ula = LineSegment(500.0)
    assert pair_product(ula, 0.0, (0, 1000), (0, 1000), K) == pytest.approx(1e-6 + 0j, rel=1e-15)


def test_local_phase_examples():
    ula = LineSegment(500.0)
    assert local_phase(ula, 0.0, (3, 4), (3, 4), K) == 0.0
    # curve point (0, 0): ranges 10 and 20
    assert local_phase(ula, 0.0, (10, 0), (20, 0), K) == pytest.approx(-20 * math.pi)


def test_local_phase_matches_cosine_form_far_from_arc():
    r_ca, R, theta = 1e5, 1.0, 0.4
    ca = CircularArc(r_ca, math.pi)
    x_t = Position(-R * math.cos(theta), -R * math.sin(theta))
    tau = np.linspace(-math.pi, math.pi, 41)
    phi = local_phase(ca, tau, (0, 0), x_t, K)
    approx = -K * R * np.cos(tau - theta)
    assert np.max(np.abs(phi - approx)) <= K * R**2 / (2 * r_ca) * 1.01
    # at tau = theta the magnitude is k R (sign follows phi = k (r_s - r_t))
    assert local_phase(ca, theta, (0, 0), x_t, K) == pytest.approx(-K * R, rel=1e-4)


def test_reconstruction_from_chirp_sample():
    ca = CircularArc(50.0, 2.0)
    c = chirp_sample(ca, 0.3, (1, 2), (-3, 0.5), K)
    g = pair_product(ca, 0.3, (1, 2), (-3, 0.5), K)
    assert abs(c.value - g) <= 1e-12 * abs(g)
    assert c.amplitude == pytest.approx(float(local_amplitude(ca, 0.3, (1, 2), (-3, 0.5))), rel=1e-12)


def test_matched_wavenumber_is_zero():
    ula = LineSegment(100.0)
    assert np.all(local_wavenumber(ula, np.linspace(-50, 50, 11), (5, 60), (5, 60), K) == 0)


def test_circular_far_source_wavenumber():
    ca = CircularArc(1000.0, math.pi)
    x_t = (3.0, 4.0)
    s = separation((0, 0), x_t)
    tau = np.linspace(-math.pi, math.pi, 201)
    exact = local_wavenumber(ca, tau, (0, 0), x_t, K)
    approx = K * s.radius * np.sin(tau - s.angle)
    assert np.max(np.abs(exact - approx)) <= 0.01 * K * s.radius


def test_ula_fresnel_wavenumber():
    ula = LineSegment(500.0)
    # neglected terms shrink like L / R
    x_s = Position.from_polar(20000.0, 1.3)
    x_t = Position.from_polar(24000.0, 1.35)
    delta = 1 / 20000 - 1 / 24000
    omega = math.cos(1.3) - math.cos(1.35)
    tau = np.linspace(-250, 250, 101)
    exact = local_wavenumber(ula, tau, x_s, x_t, K)
    fresnel = K * (tau * delta - omega)
    assert np.max(np.abs(exact - fresnel)) <= 0.01 * np.max(np.abs(fresnel))


def _random_case(rng):
    if rng.random() < 0.5:
        curve = CircularArc(float(rng.uniform(50, 2000)), float(rng.uniform(0.2, math.pi)))
        scale = curve.r_ca / 3
    else:
        curve = LineSegment(float(rng.uniform(10, 1000)))
        scale = curve.L
    lo, hi = curve.domain
    tau = float(rng.uniform(lo + 0.01 * (hi - lo), hi - 0.01 * (hi - lo)))
    x_s = Position(*rng.uniform(-scale, scale, 2))
    x_t = Position(*rng.uniform(-scale, scale, 2))
    if isinstance(curve, LineSegment):
        x_s, x_t = Position(x_s.x, abs(x_s.y) + 1), Position(x_t.x, abs(x_t.y) + 1)
    return curve, tau, x_s, x_t


def test_wavenumber_matches_finite_difference():
    rng = np.random.default_rng(5)
    for _ in range(100):
        curve, tau, x_s, x_t = _random_case(rng)
        h = 1e-7 * curve.length
        fd = (local_phase(curve, tau + h, x_s, x_t, K) - local_phase(curve, tau - h, x_s, x_t, K)) / (2 * h)
        an = float(local_wavenumber(curve, tau, x_s, x_t, K))
        # rounding in the phase difference limits the FD near zeros of phi'
        phase = abs(float(local_phase(curve, tau, x_s, x_t, K)))
        assert abs(fd - an) <= 1e-6 * max(abs(an), 1e-3 * K) + 1e-15 * phase / h


def test_hermitian_symmetry_exact():
    rng = np.random.default_rng(9)
    for _ in range(100):
        curve, tau, x_s, x_t = _random_case(rng)
        a = pair_product(curve, tau, x_s, x_t, K)
        b = pair_product(curve, tau, x_t, x_s, K)
        assert a == np.conj(b)


@settings(max_examples=100, deadline=None)
@given(
    st.floats(-0.99, 0.99),
    st.floats(-50, 50),
    st.floats(1, 80),
    st.floats(-50, 50),
    st.floats(1, 80),
)
def test_modulus_is_alpha(u, sx, sy, tx, ty):
    ula = LineSegment(100.0)
    tau = 50 * u
    g = pair_product(ula, tau, (sx, sy), (tx, ty), K)
    alpha = 1.0 / (math.hypot(tau - sx, sy) * math.hypot(tau - tx, ty))
    assert abs(g) == pytest.approx(alpha, rel=1e-13)


def test_far_field_single_wavenumber():
    L = 10.0
    ula = LineSegment(L)
    R = 1e6 * L
    rng = np.random.default_rng(1)
    tau = np.linspace(-L / 2, L / 2, 21)
    for _ in range(20):
        ts, tt = rng.uniform(0.05, math.pi - 0.05, 2)
        ff = -K * (math.cos(ts) - math.cos(tt))
        wn = local_wavenumber(ula, tau, Position.from_polar(R, ts), Position.from_polar(R, tt), K)
        spread = np.max(np.abs(wn - ff))
        assert spread <= 1e-3 * max(abs(ff), 1e-3)
