import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import PAULI, expectation, random_hermitian, random_state
from weakgeom import uncertainty as un
from weakgeom.bloch_geometry import state_to_bloch
from weakgeom.observables import decompose


def oracle(a, b, psi):
    ea, eb = expectation(a, psi).real, expectation(b, psi).real
    da, db = a - ea * np.eye(len(psi)), b - eb * np.eye(len(psi))
    comm = a @ b - b @ a
    return {
        "mean_a": ea, "mean_b": eb,
        "var_a": expectation(da @ da, psi).real,
        "var_b": expectation(db @ db, psi).real,
        "cov_ab": expectation(da @ db + db @ da, psi).real / 2,
        "comm_avg": expectation(comm, psi).imag,
        "comm_sq_avg": expectation(comm.conj().T @ comm, psi).real,
    }


@given(st.integers(0, 2**32 - 1), st.integers(2, 5))
def test_moments_match_oracle(seed, n):
    rng = np.random.default_rng(seed)
    a, b = random_hermitian(rng, n), random_hermitian(rng, n)
    psi = random_state(rng, n)
    rep = un.moments(decompose(a), decompose(b), state_to_bloch(psi))
    for key, val in oracle(a, b, psi).items():
        assert getattr(rep, key) == pytest.approx(val, abs=1e-10 * max(1, abs(val))), key
    assert un.heisenberg_check(rep)


def test_sigma_xy_equality():
    rep = un.moments(decompose(PAULI[0]), decompose(PAULI[1]), state_to_bloch([1, 0]))
    assert rep.heisenberg_lhs == pytest.approx(1, abs=1e-12)
    assert rep.heisenberg_rhs == pytest.approx(1, abs=1e-12)
    assert rep.comm_avg == pytest.approx(2)
    assert rep.comm_sq_avg == pytest.approx(4)


def test_identity_observable_has_no_spread(rng):
    psi = random_state(rng, 3)
    rep = un.moments(decompose(2 * np.eye(3)), decompose(random_hermitian(rng, 3)),
                     state_to_bloch(psi))
    assert rep.var_a == 0 and rep.cov_ab == 0 and rep.comm_avg == 0


def test_report_json_and_dimension_check(rng):
    rep = un.moments(decompose(PAULI[0]), decompose(PAULI[2]), state_to_bloch([1, 0]))
    assert rep.to_json()["heisenberg_holds"] is True
    with pytest.raises(ValueError):
        un.moments(decompose(PAULI[0]), decompose(random_hermitian(rng, 3)),
                   state_to_bloch([1, 0]))
