"""Generalized Gell-Mann generators of SU(N) and their structure constants.

The generators ``L_a`` are normalized as ``Tr(L_a L_b) = 2 delta_ab`` (Pauli
and Gell-Mann convention). Ordering is nested: the first ``(N-1)^2 - 1``
generators of SU(N) are those of SU(N-1) padded with a zero row/column, and
column ``k`` contributes ``sym(j, k), antisym(j, k)`` for ``j < k`` followed by
the ``(k-1)``-th diagonal generator. For N = 3 this is exactly lambda_1..lambda_8.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

#: bumped whenever the generator ordering or sign convention changes
ORDERING_VERSION = "column-nested-v1"

ALGEBRA_TOL = 1e-10
EXACT_TOL = 1e-12
_DROP_TOL = 1e-13


def _generator_labels(n: int) -> list[tuple[str, int, int]]:
    labels = []
    for k in range(1, n):
        for j in range(k):
            labels.append(("sym", j, k))
            labels.append(("antisym", j, k))
        labels.append(("diag", k, k))
    return labels


@dataclass(frozen=True)
class GeneratorSet:
    """The ``N^2 - 1`` generators stacked in an array of shape ``(M, N, N)``."""

    dimension: int
    matrices: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.matrices.setflags(write=False)

    @property
    def size(self) -> int:
        return self.dimension ** 2 - 1

    def __len__(self):
        return self.size

    def __getitem__(self, a):
        return self.matrices[a]

    def combine(self, vec) -> np.ndarray:
        """Return ``sum_a vec_a L_a``."""
        return np.tensordot(np.asarray(vec, dtype=float), self.matrices, axes=1)

    def coefficients(self, matrix) -> np.ndarray:
        """Return ``Tr(matrix L_a)`` for every generator (real part)."""
        # Tr(M L_a) = sum_ij M_ij (L_a)_ji
        return np.einsum("ij,aji->a", np.asarray(matrix), self.matrices).real


def build_generators(n: int) -> GeneratorSet:
    """Construct the generalized Gell-Mann matrices for SU(n).

    Parameters
    ----------
    n : int
        Hilbert-space dimension, ``n >= 2``.
    """
    if int(n) != n or n < 2:
        raise ValueError(f"SU(N) generators need an integer N >= 2, got {n!r}")
    n = int(n)
    labels = _generator_labels(n)
    mats = np.zeros((len(labels), n, n), dtype=complex)
    for a, (kind, j, k) in enumerate(labels):
        if kind == "sym":
            mats[a, j, k] = mats[a, k, j] = 1.0
        elif kind == "antisym":
            mats[a, j, k] = -1j
            mats[a, k, j] = 1j
        else:
            l = k
            diag = np.zeros(n)
            diag[:l] = 1.0
            diag[l] = -l
            mats[a] = np.sqrt(2.0 / (l * (l + 1))) * np.diag(diag)
    return GeneratorSet(n, mats)


@dataclass(frozen=True)
class StructureTensors:
    """Sparse ``f_abc`` (totally antisymmetric) and ``d_abc`` (totally symmetric).

    ``f`` is keyed on strictly increasing triples, ``d`` on non-decreasing
    triples; every other index order is recovered through the permutation
    symmetry (see :meth:`f_value` / :meth:`d_value`).
    """

    dimension: int
    f: dict = field(repr=False)
    d: dict = field(repr=False)
    ordering: str = ORDERING_VERSION

    @property
    def size(self) -> int:
        return self.dimension ** 2 - 1

    def f_value(self, a: int, b: int, c: int) -> float:
        if a == b or b == c or a == c:
            return 0.0
        idx = (a, b, c)
        key = tuple(sorted(idx))
        perm = [key.index(x) for x in idx]
        parity = _parity(perm)
        return parity * self.f.get(key, 0.0)

    def d_value(self, a: int, b: int, c: int) -> float:
        return self.d.get(tuple(sorted((a, b, c))), 0.0)

    def _expanded(self, which: str):
        cache = self.__dict__.setdefault("_coo", {})
        if which not in cache:
            cache[which] = _expand(self.f if which == "f" else self.d, which == "f")
        return cache[which]

    def coo(self, which: str):
        """Index arrays ``(a, b, c)`` and values over all nonzero orderings."""
        return self._expanded(which)

    def dense(self, which: str) -> np.ndarray:
        m = self.size
        out = np.zeros((m, m, m))
        a, b, c, v = self.coo(which)
        out[a, b, c] = v
        return out

    def contract(self, which: str, u, v) -> np.ndarray:
        """Return ``w_c = sum_ab T_abc u_a v_b`` for ``T`` in ``{'f', 'd'}``."""
        a, b, c, vals = self.coo(which)
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        return np.bincount(c, weights=vals * u[a] * v[b], minlength=self.size)


def _parity(perm) -> int:
    perm = list(perm)
    sign = 1
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


_PERMS = [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)]


def _expand(table: dict, antisymmetric: bool):
    rows = []
    for key, val in table.items():
        seen = set()
        for p in _PERMS:
            idx = (key[p[0]], key[p[1]], key[p[2]])
            if idx in seen:
                continue
            seen.add(idx)
            sign = _parity(p) if antisymmetric else 1
            rows.append((*idx, sign * val))
    if not rows:
        empty = np.zeros(0, dtype=np.intp)
        return empty, empty, empty, np.zeros(0)
    arr = np.array(rows)
    a, b, c = (arr[:, i].astype(np.intp) for i in range(3))
    return a, b, c, arr[:, 3]


def build_structure_tensors(gens: GeneratorSet) -> StructureTensors:
    """Evaluate ``f`` and ``d`` from traces of generator triples.

    With ``T_abc = Tr(L_a L_b L_c)`` and Hermitian generators, ``T_acb`` is
    the complex conjugate of ``T_abc``, so ``f_abc = -(i/4) Tr(L_a [L_b, L_c])``
    reduces to ``Im(T_abc) / 2`` and ``d_abc = Tr(L_a {L_b, L_c}) / 4`` to
    ``Re(T_abc) / 2``.
    """
    mats = gens.matrices
    m = gens.size
    f: dict = {}
    d: dict = {}
    for a in range(m):
        la = mats[a]
        # T[b, c] = Tr(L_a L_b L_c) for b, c >= a
        lab = np.einsum("ij,bjk->bik", la, mats[a:])
        t = np.einsum("bik,cki->bc", lab, mats[a:])
        for b_off, c_off in zip(*np.nonzero(np.abs(t) > _DROP_TOL)):
            b, c = a + int(b_off), a + int(c_off)
            if c < b:
                continue
            val = t[b_off, c_off]
            dv = 0.5 * val.real
            fv = 0.5 * val.imag
            if abs(dv) > _DROP_TOL:
                d[(a, b, c)] = float(dv)
            if a < b < c and abs(fv) > _DROP_TOL:
                f[(a, b, c)] = float(fv)
    return StructureTensors(gens.dimension, f, d)


@dataclass
class ValidationReport:
    dimension: int
    residuals: dict
    tolerance: float = ALGEBRA_TOL

    @property
    def passed(self) -> bool:
        return all(r <= self.tolerance for r in self.residuals.values())

    def as_dict(self) -> dict:
        return {
            "n": self.dimension,
            "residuals": dict(self.residuals),
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def verify_algebra(gens: GeneratorSet, tensors: StructureTensors) -> ValidationReport:
    """Measure the residual of each defining identity of the generator algebra.

    Checks the commutator ``[L_a, L_b] = 2i f_abc L_c``, the anticommutator
    ``{L_a, L_b} = (4/N) delta_ab I + 2 d_abc L_c``, trace orthogonality
    ``Tr(L_a L_b) = 2 delta_ab`` and the product expansion
    ``L_a L_b = (2/N) delta_ab I + (d_abc + i f_abc) L_c``.
    """
    if gens.dimension != tensors.dimension:
        raise ValueError(
            f"dimension mismatch: generators N={gens.dimension}, tensors N={tensors.dimension}"
        )
    n = gens.dimension
    mats = gens.matrices
    m = gens.size
    eye = np.eye(n)
    delta = np.eye(m)

    prod = np.einsum("aij,bjk->abik", mats, mats)
    comm = prod - prod.transpose(1, 0, 2, 3)
    anti = prod + prod.transpose(1, 0, 2, 3)
    fl = np.einsum("abc,cij->abij", tensors.dense("f"), mats)
    dl = np.einsum("abc,cij->abij", tensors.dense("d"), mats)
    ident = np.einsum("ab,ij->abij", delta, eye)

    residuals = {
        "commutator": float(np.max(np.abs(comm - 2j * fl))),
        "anticommutator": float(np.max(np.abs(anti - (4.0 / n) * ident - 2 * dl))),
        "trace_orthogonality": float(
            np.max(np.abs(np.einsum("abii->ab", prod) - 2 * delta))
        ),
        "product_expansion": float(
            np.max(np.abs(prod - (2.0 / n) * ident - dl - 1j * fl))
        ),
    }
    return ValidationReport(n, residuals)


# -- process-wide memo and optional on-disk cache ---------------------------

_lock = threading.Lock()
_generators: dict[int, GeneratorSet] = {}
_tensors: dict[int, StructureTensors] = {}
_cache_dir: Path | None = None


def set_tensor_cache(directory) -> None:
    """Persist and reuse structure tensors under ``directory`` (``None`` disables)."""
    global _cache_dir
    with _lock:
        _cache_dir = None if directory is None else Path(directory)
        if _cache_dir is not None:
            _cache_dir.mkdir(parents=True, exist_ok=True)


def generators(n: int) -> GeneratorSet:
    gens = _generators.get(n)
    if gens is None:
        with _lock:
            gens = _generators.get(n)
            if gens is None:
                gens = _generators[n] = build_generators(n)
    return gens


def structure_tensors(n: int) -> StructureTensors:
    tens = _tensors.get(n)
    if tens is not None:
        return tens
    gens = generators(n)
    with _lock:
        tens = _tensors.get(n)
        if tens is None:
            path = None if _cache_dir is None else _cache_dir / f"su{n}.json"
            if path is not None and path.exists():
                try:
                    tens = load_tensors(path)
                except ValueError:
                    tens = None
            if tens is None:
                tens = build_structure_tensors(gens)
                if path is not None:
                    save_tensors(tens, path)
            _tensors[n] = tens
    return tens


def save_tensors(tensors: StructureTensors, path) -> None:
    """Write tensors as JSON: ordering tag, N, and ``[a, b, c, value]`` rows."""
    doc = {
        "format": "weakgeom-structure-tensors",
        "ordering": tensors.ordering,
        "n": tensors.dimension,
        "f": [[*k, v] for k, v in sorted(tensors.f.items())],
        "d": [[*k, v] for k, v in sorted(tensors.d.items())],
    }
    path = Path(path)
    tmp = path.with_suffix(path.suffix + f".{os.getpid()}.tmp")
    tmp.write_text(json.dumps(doc))
    tmp.replace(path)


def load_tensors(path) -> StructureTensors:
    doc = json.loads(Path(path).read_text())
    if doc.get("ordering") != ORDERING_VERSION:
        raise ValueError(
            f"tensor cache {path} has ordering {doc.get('ordering')!r}, expected {ORDERING_VERSION!r}"
        )
    f = {tuple(int(x) for x in row[:3]): float(row[3]) for row in doc["f"]}
    d = {tuple(int(x) for x in row[:3]): float(row[3]) for row in doc["d"]}
    return StructureTensors(int(doc["n"]), f, d, doc["ordering"])
