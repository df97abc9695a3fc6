"""Hermitian observables in the ``a_I I + a_L alpha.L`` form."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bloch_geometry import PURITY_TOL, BlochVector
from .sun_algebra import generators

HERMITIAN_TOL = 1e-10
ZERO_TRACELESS_TOL = 1e-12


def check_hermitian(matrix, tol: float = HERMITIAN_TOL) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {matrix.shape}")
    if matrix.shape[0] < 2:
        raise ValueError("observables need dimension N >= 2")
    err = np.max(np.abs(matrix - matrix.conj().T))
    if err > tol:
        raise ValueError(f"matrix is not Hermitian (max |A - A^dag| = {err:.3e})")
    return matrix


@dataclass(frozen=True)
class ObservableDecomposition:
    """``A = a_i I + a_l alpha.L`` with ``a_l >= 0``.

    ``alpha`` is ``None`` when the traceless part vanishes (``A`` is
    proportional to the identity).
    """

    n: int
    a_i: float
    a_l: float
    alpha: BlochVector | None

    def __post_init__(self):
        if self.a_l < 0:
            raise ValueError("a_l must be non-negative; flip alpha instead")
        if self.alpha is not None and self.alpha.n != self.n:
            raise ValueError(f"alpha has N={self.alpha.n}, decomposition has N={self.n}")

    @property
    def is_identity_multiple(self) -> bool:
        return self.alpha is None or self.a_l == 0.0

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "a_i": self.a_i,
            "a_l": self.a_l,
            "alpha": None if self.alpha is None else self.alpha.components.tolist(),
        }


def decompose(matrix) -> ObservableDecomposition:
    matrix = check_hermitian(matrix)
    n = matrix.shape[0]
    a_i = float(np.trace(matrix).real / n)
    raw = generators(n).coefficients(matrix) / 2.0
    a_l = float(np.linalg.norm(raw))
    if a_l <= ZERO_TRACELESS_TOL:
        return ObservableDecomposition(n, a_i, 0.0, None)
    return ObservableDecomposition(n, a_i, a_l, BlochVector(n, raw / a_l))


def from_coefficients(n: int, a_i: float, a_l: float, alpha) -> ObservableDecomposition:
    """Build a canonical decomposition from possibly unnormalized inputs.

    ``alpha`` is rescaled to unit norm (the scale is folded into ``a_l``) and
    a negative ``a_l`` is absorbed by flipping ``alpha``.
    """
    if alpha is None or a_l == 0:
        return ObservableDecomposition(n, float(a_i), 0.0, None)
    alpha = np.asarray(alpha, dtype=float)
    norm = np.linalg.norm(alpha)
    if norm == 0:
        raise ValueError("alpha must be nonzero when a_l != 0")
    if abs(norm - 1.0) > 1e-14:
        a_l = float(a_l) * norm
        alpha = alpha / norm
    if a_l < 0:
        a_l, alpha = -a_l, -alpha
    return ObservableDecomposition(n, float(a_i), a_l, BlochVector(n, alpha))


def compose(dec: ObservableDecomposition) -> np.ndarray:
    n = dec.n
    out = dec.a_i * np.eye(n, dtype=complex)
    if dec.a_l == 0:
        return out
    if dec.alpha is None:
        raise ValueError("decomposition has a_l > 0 but no alpha direction")
    return out + dec.a_l * generators(n).combine(dec.alpha.components)


def projector_defect(p) -> float:
    p = np.asarray(p, dtype=complex)
    return float(np.linalg.norm(p @ p - p))


def projector_onto(vectors) -> np.ndarray:
    """Orthogonal projector onto the span of the given column vectors."""
    vectors = np.atleast_2d(np.asarray(vectors, dtype=complex))
    q, _ = np.linalg.qr(vectors)
    return q @ q.conj().T


def hermitian_unitary_from_projector(p) -> np.ndarray:
    """``S = 2P - I``: a reflection through the range of ``P``."""
    p = check_hermitian(p)
    defect = projector_defect(p)
    if defect > PURITY_TOL:
        raise ValueError(f"input is not a projector (|P^2 - P| = {defect:.3e})")
    return 2 * p - np.eye(p.shape[0])


def gate_coefficients(n: int, k: int) -> tuple[float, float]:
    """``(a_I, a_L)`` of ``2P - I`` for a rank-``k`` projector ``P``."""
    return (2 * k - n) / n, float(np.sqrt(2 * k * (n - k) / n))
