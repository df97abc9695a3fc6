import itertools
import json

import numpy as np
import pytest

from oracles import GELL_MANN, PAULI, SQ3
from weakgeom import sun_algebra as sa


@pytest.mark.parametrize("n", range(2, 7))
def test_generators_are_hermitian_traceless_orthogonal(n):
    gens = sa.build_generators(n)
    assert gens.size == n * n - 1
    m = gens.matrices
    assert np.allclose(m, m.conj().transpose(0, 2, 1), atol=1e-14)
    assert np.allclose(np.einsum("aii->a", m), 0, atol=1e-14)
    gram = np.einsum("aij,bji->ab", m, m)
    assert np.allclose(gram, 2 * np.eye(gens.size), atol=1e-13)


def test_n2_matches_pauli():
    assert np.allclose(sa.build_generators(2).matrices, PAULI)


def test_n3_matches_gell_mann():
    assert np.allclose(sa.build_generators(3).matrices, GELL_MANN, atol=1e-15)


def test_su3_structure_constants_from_trace():
    t = sa.structure_tensors(3)
    # f_abc = Im Tr(l_a l_b l_c) / 2 evaluated on the hand-written matrices
    for a, b, c in itertools.combinations(range(8), 3):
        tr = np.trace(GELL_MANN[a] @ GELL_MANN[b] @ GELL_MANN[c])
        assert t.f_value(a, b, c) == pytest.approx(tr.imag / 2, abs=1e-12)
    for a, b, c in itertools.combinations_with_replacement(range(8), 3):
        tr = np.trace(GELL_MANN[a] @ GELL_MANN[b] @ GELL_MANN[c])
        assert t.d_value(a, b, c) == pytest.approx(tr.real / 2, abs=1e-12)


@pytest.mark.parametrize("idx,val", [
    ((0, 1, 2), 1.0), ((0, 3, 6), 0.5), ((0, 4, 5), -0.5), ((1, 3, 5), 0.5),
    ((1, 4, 6), 0.5), ((2, 3, 4), 0.5), ((2, 5, 6), -0.5),
    ((3, 4, 7), SQ3 / 2), ((5, 6, 7), SQ3 / 2),
])
def test_su3_textbook_f(idx, val):
    assert sa.structure_tensors(3).f_value(*idx) == pytest.approx(val, abs=1e-12)


def test_f_antisymmetric_d_symmetric():
    t = sa.structure_tensors(4)
    f, d = t.dense("f"), t.dense("d")
    for perm in [(1, 0, 2), (0, 2, 1), (2, 1, 0)]:
        assert np.allclose(f, -f.transpose(perm))
        assert np.allclose(d, d.transpose(perm))


def test_su3_d_values():
    t = sa.structure_tensors(3)
    assert t.d_value(0, 0, 7) == pytest.approx(1 / SQ3, abs=1e-12)
    assert t.d_value(7, 7, 7) == pytest.approx(-1 / SQ3, abs=1e-12)


def test_su2_has_no_d():
    t = sa.structure_tensors(2)
    assert np.allclose(t.dense("d"), 0)
    assert t.f_value(0, 1, 2) == pytest.approx(1.0)


@pytest.mark.parametrize("n", range(2, 7))
def test_verify_algebra(n):
    report = sa.verify_algebra(sa.generators(n), sa.structure_tensors(n))
    assert report.passed
    assert set(report.residuals) == {
        "commutator", "anticommutator", "trace_orthogonality", "product_expansion"}
    assert max(report.residuals.values()) <= sa.ALGEBRA_TOL


def test_verify_algebra_rejects_mismatch():
    with pytest.raises(ValueError):
        sa.verify_algebra(sa.generators(3), sa.structure_tensors(4))


def test_verify_algebra_detects_corruption():
    t = sa.structure_tensors(3)
    f = dict(t.f)
    key = next(iter(f))
    f[key] += 0.1
    bad = sa.StructureTensors(3, f, t.d, t.ordering)
    assert not sa.verify_algebra(sa.generators(3), bad).passed


def test_rejects_small_dimension():
    with pytest.raises(ValueError):
        sa.build_generators(1)


def test_contract_matches_dense(rng):
    t = sa.structure_tensors(4)
    u, v = rng.normal(size=15), rng.normal(size=15)
    for which in "fd":
        assert np.allclose(t.contract(which, u, v),
                           np.einsum("abc,a,b->c", t.dense(which), u, v))


def test_combine_coefficients_round_trip(rng):
    g = sa.generators(5)
    vec = rng.normal(size=g.size)
    assert np.allclose(g.coefficients(g.combine(vec)) / 2, vec)


def test_tensor_file_round_trip(tmp_path):
    t = sa.structure_tensors(4)
    path = tmp_path / "su4.json"
    sa.save_tensors(t, path)
    back = sa.load_tensors(path)
    assert back.dimension == 4
    assert np.array_equal(back.dense("f"), t.dense("f"))
    assert np.array_equal(back.dense("d"), t.dense("d"))


def test_tensor_file_ordering_mismatch(tmp_path):
    path = tmp_path / "t.json"
    sa.save_tensors(sa.structure_tensors(3), path)
    doc = json.loads(path.read_text())
    doc["ordering"] = "something-else"
    path.write_text(json.dumps(doc))
    with pytest.raises(ValueError, match="ordering"):
        sa.load_tensors(path)


def test_memoized_instances_are_shared():
    assert sa.structure_tensors(3) is sa.structure_tensors(3)
    assert sa.generators(4) is sa.generators(4)
