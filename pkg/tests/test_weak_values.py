import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import PAULI, GELL_MANN, projector, random_hermitian, random_selection, random_state, \
    random_unitary, weak_value
from weakgeom import weak_values as wv
from weakgeom.bloch_geometry import BlochVector, state_to_bloch
from weakgeom.observables import decompose
from weakgeom.weak_values import PrePostSelection

seeds = st.integers(0, 2**32 - 1)


def scenario(seed, n, min_overlap=1e-2):
    rng = np.random.default_rng(seed)
    a = random_hermitian(rng, n)
    psi_i, psi_f = random_selection(rng, n, min_overlap)
    return a, PrePostSelection(psi_i, psi_f)


@given(seeds, st.integers(2, 6))
def test_geometric_matches_direct(seed, n):
    a, sel = scenario(seed, n)
    got = wv.weak_value_geometric(decompose(a), sel.i_vec, sel.f_vec).value
    want = weak_value(a, sel.psi_i, sel.psi_f)
    assert abs(got - want) <= 1e-10 * max(1.0, abs(want))


@given(seeds, st.integers(2, 6))
def test_direct_matches_oracle(seed, n):
    a, sel = scenario(seed, n)
    assert wv.weak_value_direct(a, sel) == pytest.approx(weak_value(a, sel.psi_i, sel.psi_f))


@given(seeds)
def test_qutrit_closed_form(seed):
    rng = np.random.default_rng(seed)
    psi_r = random_state(rng, 3)
    psi_i, psi_f = random_selection(rng, 3, 1e-2)
    got = wv.qutrit_projector_weak_value(*(state_to_bloch(p) for p in (psi_r, psi_i, psi_f)))
    assert got == pytest.approx(weak_value(projector(psi_r), psi_i, psi_f), rel=1e-10)


@given(seeds, st.integers(2, 5))
def test_generator_weak_value(seed, n):
    rng = np.random.default_rng(seed)
    a = random_hermitian(rng, n)
    a -= np.trace(a) / n * np.eye(n)
    dec = decompose(a)
    psi_i, psi_f = random_selection(rng, n, 1e-2)
    got = wv.generator_weak_value(dec.alpha, state_to_bloch(psi_i), state_to_bloch(psi_f)).value
    assert dec.a_l * got == pytest.approx(weak_value(a, psi_i, psi_f), rel=1e-10)


@given(seeds, st.integers(2, 5))
def test_invariants_are_unitary_invariant(seed, n):
    rng = np.random.default_rng(seed)
    a, sel = scenario(seed, n)
    u = random_unitary(rng, n)
    moved = PrePostSelection(u @ sel.psi_i, u @ sel.psi_f)
    r0 = wv.weak_value_geometric(decompose(a), sel.i_vec, sel.f_vec)
    r1 = wv.weak_value_geometric(decompose(u @ a @ u.conj().T), moved.i_vec, moved.f_vec)
    assert r1.invariant_star == pytest.approx(r0.invariant_star, abs=1e-10)
    assert r1.invariant_wedge == pytest.approx(r0.invariant_wedge, abs=1e-10)
    assert r1.value == pytest.approx(r0.value, rel=1e-9)


def test_sigma_y_qubit_value_is_i():
    sel = PrePostSelection([1, 0], np.array([1, 1]) / math.sqrt(2))
    res = wv.weak_value_geometric(decompose(PAULI[1]), sel.i_vec, sel.f_vec)
    assert res.value == pytest.approx(1j, abs=1e-14)
    assert res.argument == pytest.approx(math.pi / 2)
    assert res.boundary


def test_lambda8_weak_value():
    # <f|l8|i>/<f|i> for i=(1,0,0), f=(1,1,1)/sqrt3 is 1/sqrt3
    sel = PrePostSelection([1, 0, 0], np.ones(3) / math.sqrt(3))
    res = wv.weak_value_geometric(decompose(GELL_MANN[7]), sel.i_vec, sel.f_vec)
    assert res.value == pytest.approx(1 / math.sqrt(3), abs=1e-14)


def test_orthogonal_selection_raises():
    sel = PrePostSelection([1, 0, 0], [0, 1, 0])
    with pytest.raises(wv.UndefinedWeakValueError):
        wv.weak_value_geometric(decompose(GELL_MANN[0]), sel.i_vec, sel.f_vec)
    with pytest.raises(wv.UndefinedWeakValueError):
        wv.weak_value_direct(GELL_MANN[0], sel)


def test_amplification_flag():
    eps = 1e-3
    psi_f = np.array([eps, 1, 0]) / math.hypot(eps, 1)
    sel = PrePostSelection([1, 0, 0], psi_f)
    res = wv.weak_value_geometric(decompose(GELL_MANN[0]), sel.i_vec, sel.f_vec)
    assert res.amplified
    assert abs(res.value) > 100


def test_identity_weak_value():
    sel = PrePostSelection([1, 0], [0.6, 0.8])
    res = wv.weak_value_geometric(decompose(2 * np.eye(2)), sel.i_vec, sel.f_vec)
    assert res.value == 2


@pytest.mark.parametrize("z,phi", [(1 + 1j, 0.0), (-1 + 1j, math.pi), (-1 - 1j, math.pi),
                                   (1 - 1j, 0.0), (1j, 0.0)])
def test_quadrant_phi(z, phi):
    assert wv.quadrant_phi(z) == phi


@given(st.complex_numbers(min_magnitude=1e-3, max_magnitude=1e3))
def test_arctan_argument_matches_atan2(z):
    assert wv.wrap_angle(wv.arctan_argument(z.real, z.imag) - math.atan2(z.imag, z.real)) == \
        pytest.approx(0, abs=1e-12)


def test_bargmann_octant():
    states = [[1, 0], np.array([1, 1]) / math.sqrt(2), np.array([1, 1j]) / math.sqrt(2)]
    # Tr(Pi_f Pi_r Pi_i) with i=z, r=x, f=y
    b = wv.bargmann_invariant(states)
    assert math.atan2(b.imag, b.real) == pytest.approx(-math.pi / 4, abs=1e-14)


@given(seeds, st.integers(2, 5))
def test_projector_argument_is_bargmann_phase(seed, n):
    rng = np.random.default_rng(seed)
    psi_r = random_state(rng, n)
    psi_i, psi_f = random_selection(rng, n, 1e-2)
    res = wv.weak_value_projector_geometric(*(state_to_bloch(p) for p in (psi_r, psi_i, psi_f)))
    b = wv.bargmann_invariant([psi_i, psi_r, psi_f])
    assert wv.wrap_angle(res.argument - math.atan2(b.imag, b.real)) == pytest.approx(0, abs=1e-9)


def test_effective_projector_zero():
    with pytest.raises(wv.UndefinedArgumentError):
        wv.effective_projector(np.diag([0.0, 1.0]), [1, 0])


@given(seeds, st.integers(2, 4))
def test_argument_decomposition(seed, n):
    a, sel = scenario(seed, n)
    dec = wv.argument_decomposition(a, sel)
    assert wv.wrap_angle(dec.arg_pi_iprime - dec.arg_mean - dec.total) == pytest.approx(0, abs=1e-9)


def test_argument_decomposition_negative_mean():
    a = -np.eye(2) + 0.1 * PAULI[0]
    sel = PrePostSelection([1, 0], np.array([1, 1j]) / math.sqrt(2))
    arg_p, arg_mean, total = wv.argument_decomposition(a, sel)
    assert arg_mean == math.pi
    assert wv.wrap_angle(arg_p - arg_mean - total) == pytest.approx(0, abs=1e-12)


def test_weak_value_result_json():
    sel = PrePostSelection([1, 0], [0.6, 0.8])
    doc = wv.weak_value_geometric(decompose(PAULI[0]), sel.i_vec, sel.f_vec).to_json()
    assert set(doc) >= {"value", "argument", "phi", "invariants", "boundary", "amplified"}
    assert doc["invariants"]["f.(alpha^i)"] == pytest.approx(0)
