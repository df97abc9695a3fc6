import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import PAULI, spherical_excess, weak_value
from weakgeom import qubit_geometry as qg
from weakgeom.bloch_geometry import state_to_bloch
from weakgeom.weak_values import bargmann_invariant, wrap_angle

seeds = st.integers(0, 2**32 - 1)


def unit(rng):
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def state_of(v):
    """Qubit ket with Bloch vector v."""
    theta, phi = math.acos(np.clip(v[2], -1, 1)), math.atan2(v[1], v[0])
    return np.array([math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)])


@given(seeds, st.floats(-5, 5))
def test_weak_value_matches_oracle(seed, gamma):
    rng = np.random.default_rng(seed)
    r, i, f = unit(rng), unit(rng), unit(rng)
    if (1 + f @ i) / 2 < 1e-2:
        return
    obs = qg.QubitObservable(1.3, gamma, r)
    got = qg.qubit_weak_value(obs, i, f).value
    want = weak_value(obs.matrix(), state_of(i), state_of(f))
    assert got == pytest.approx(want, rel=1e-10, abs=1e-12)


def test_matrix_form():
    r = np.array([0, 0, 1.0])
    assert np.allclose(qg.QubitObservable(2, -0.5, r).matrix(), 2 * (np.eye(2) - 0.5 * PAULI[2]))


@given(seeds, st.floats(-20, 20))
def test_i_prime_is_bloch_of_o_psi(seed, gamma):
    rng = np.random.default_rng(seed)
    r, i = unit(rng), unit(rng)
    obs = qg.QubitObservable(1.0, gamma, r)
    v = obs.matrix() @ state_of(i)
    if np.linalg.norm(v) < 1e-6:
        return
    expected = state_to_bloch(v / np.linalg.norm(v)).components
    assert np.allclose(qg.i_prime(obs, i), expected, atol=1e-9)


def test_i_prime_limits(rng):
    r, i = unit(rng), unit(rng)
    assert np.allclose(qg.i_prime(qg.QubitObservable(1, 0, r), i), i, atol=1e-15)
    assert np.allclose(qg.i_prime(qg.QubitObservable(1, 1, r), i), r, atol=1e-15)
    assert np.allclose(qg.i_prime(qg.QubitObservable(1, 1e8, r), i), qg.mirror(i, r), atol=1e-6)


def test_critical_gamma_flips_mean_and_sends_i_to_antipode(rng):
    r, i = unit(rng), unit(rng)
    g = qg.critical_gamma(i, r)
    obs = qg.QubitObservable(1, g, r)
    psi = state_of(i)
    assert np.vdot(psi, obs.matrix() @ psi).real == pytest.approx(0, abs=1e-12)
    assert np.allclose(qg.i_prime(obs, i), -i, atol=1e-9)


def test_critical_gamma_perpendicular():
    with pytest.raises(ValueError):
        qg.critical_gamma([1, 0, 0], [0, 1, 0])


def test_i_prime_stays_on_great_circle(rng):
    r, i = unit(rng), unit(rng)
    normal = np.cross(i, r)
    for g in qg.default_gamma_grid(i, r):
        assert abs(normal @ qg.i_prime(qg.QubitObservable(1, g, r), i)) < 1e-10


def test_angle_profile_octant():
    i, r = np.array([0, 0, 1.0]), np.array([1.0, 0, 0])
    prof = qg.angle_profile(r, i, [0.0, 1.0, 1e8])
    assert prof["phi_ir"] == pytest.approx(math.pi / 2)
    assert prof["phi_ii_prime"][0] == pytest.approx(0, abs=1e-7)
    assert prof["phi_ri_prime"][1] == pytest.approx(0, abs=1e-7)
    assert prof["phi_ii_prime"][2] == pytest.approx(prof["phi_ii_m"], abs=1e-6)
    assert prof["caption_2_pi_minus_phi_ir"] == pytest.approx(math.pi)


def test_angle_profile_rejects_critical_point():
    i = np.array([0, 0, 1.0])
    r = np.array([0.6, 0, 0.8])
    with pytest.raises(ValueError, match="critical"):
        qg.angle_profile(r, i, [qg.critical_gamma(i, r)])


@given(seeds)
def test_solid_angle_matches_spherical_excess(seed):
    rng = np.random.default_rng(seed)
    a, b, c = unit(rng), unit(rng), unit(rng)
    if 1 + a @ b + b @ c + c @ a < 1e-3:
        return
    assert qg.solid_angle(a, b, c) == pytest.approx(spherical_excess(a, b, c), abs=1e-8)


@given(seeds)
def test_bargmann_phase_is_minus_half_solid_angle(seed):
    rng = np.random.default_rng(seed)
    i, r, f = unit(rng), unit(rng), unit(rng)
    b = bargmann_invariant([state_of(i), state_of(r), state_of(f)])
    if abs(b) < 1e-4:
        return
    assert wrap_angle(math.atan2(b.imag, b.real) + qg.solid_angle(i, r, f) / 2) == \
        pytest.approx(0, abs=1e-9)


def test_octant_solid_angle():
    z, x, y = np.eye(3)[2], np.eye(3)[0], np.eye(3)[1]
    assert qg.solid_angle(z, x, y) == pytest.approx(math.pi / 2, abs=1e-15)


def test_non_unit_rejected():
    with pytest.raises(ValueError):
        qg.QubitObservable(1, 1, [1, 1, 0])
