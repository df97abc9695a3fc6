"""Generalized Bloch vectors on the unit sphere in ``N^2 - 1`` real dimensions.

A pure state maps to ``r`` with ``Pi = I/N + c_p(1, N) r.L``; a projector of
rank ``k`` to ``P = (k/N) I + c_p(k, N) rho.L``. The star product carries the
normalization ``c_s`` that makes pure states its fixed points (``r * r = r``);
``star_raw`` is the bare ``d_abc`` contraction and is what every formula with
an ``(N - 2) * star`` factor uses, so N = 2 stays finite.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .sun_algebra import generators, structure_tensors

NORM_TOL = 1e-10
PURITY_TOL = 1e-9


class DimensionMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class BlochVector:
    """Real vector of length ``N^2 - 1`` tagged with its Hilbert dimension ``n``."""

    n: int
    components: np.ndarray = field(compare=False)

    # make numpy scalars defer to __rmul__ instead of broadcasting
    __array_ufunc__ = None

    def __post_init__(self):
        comps = np.array(self.components, dtype=float)
        if comps.shape != (self.n ** 2 - 1,):
            raise ValueError(
                f"N={self.n} needs {self.n ** 2 - 1} components, got shape {comps.shape}"
            )
        comps.setflags(write=False)
        object.__setattr__(self, "components", comps)

    def __array__(self, dtype=None, copy=None):
        return self.components if dtype is None else self.components.astype(dtype)

    def __eq__(self, other):
        return (
            isinstance(other, BlochVector)
            and other.n == self.n
            and np.array_equal(other.components, self.components)
        )

    def __hash__(self):
        return hash((self.n, self.components.tobytes()))

    def __neg__(self):
        return BlochVector(self.n, -self.components)

    def __add__(self, other):
        _check_same(self, other)
        return BlochVector(self.n, self.components + other.components)

    def __sub__(self, other):
        _check_same(self, other)
        return BlochVector(self.n, self.components - other.components)

    def __mul__(self, scalar):
        return BlochVector(self.n, float(scalar) * self.components)

    __rmul__ = __mul__

    def dot(self, other) -> float:
        _check_same(self, other)
        return float(self.components @ other.components)

    def norm(self) -> float:
        return float(np.linalg.norm(self.components))

    def normalized(self) -> "BlochVector":
        return BlochVector(self.n, self.components / self.norm())

    @classmethod
    def basis(cls, n: int, a: int) -> "BlochVector":
        """Unit vector along generator slot ``a`` (0-based)."""
        comps = np.zeros(n ** 2 - 1)
        comps[a] = 1.0
        return cls(n, comps)

    def to_json(self) -> dict:
        return {"n": self.n, "components": self.components.tolist()}

    @classmethod
    def from_json(cls, doc: dict) -> "BlochVector":
        return cls(int(doc["n"]), np.asarray(doc["components"], dtype=float))


def _check_same(u, v):
    if not isinstance(v, BlochVector) or not isinstance(u, BlochVector):
        raise TypeError("expected BlochVector operands")
    if u.n != v.n:
        raise DimensionMismatchError(f"Bloch vectors of N={u.n} and N={v.n} cannot be combined")


def c_p(k: int, n: int) -> float:
    return float(np.sqrt(k * (n - k) / (2.0 * n)))


def c_s(n: int) -> float:
    if n == 2:
        raise ValueError("star undefined at N=2: c_s has a 1/(N-2) pole")
    return float(np.sqrt(n * (n - 1) / 2.0) / (n - 2))


def star_finite_coefficient(n: int) -> float:
    """``(N - 2) * c_s``, finite for every N >= 2."""
    return float(np.sqrt(n * (n - 1) / 2.0))


@dataclass(frozen=True)
class SphereConstants:
    n: int
    k: int = 1

    @property
    def c_p(self) -> float:
        return c_p(self.k, self.n)

    @property
    def c_s(self) -> float | None:
        return None if self.n == 2 else c_s(self.n)


def as_state(psi) -> np.ndarray:
    return np.asarray(psi, dtype=complex).reshape(-1)


def projector_of(psi) -> np.ndarray:
    psi = as_state(psi)
    return np.outer(psi, psi.conj())


def state_to_bloch(psi) -> BlochVector:
    """Map a normalized amplitude vector to its unit Bloch vector.

    Components are ``Tr(Pi_psi L_a) / (2 c_p(1, N))``.
    """
    psi = as_state(psi)
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > NORM_TOL:
        raise ValueError(f"state is not normalized: |psi| = {norm!r}")
    n = psi.size
    if n < 2:
        raise ValueError("states need dimension N >= 2")
    coeffs = generators(n).coefficients(projector_of(psi))
    return BlochVector(n, coeffs / (2.0 * c_p(1, n)))


def bloch_to_projector(r: BlochVector, k: int = 1) -> np.ndarray:
    """Return ``(k/N) I + c_p(k, N) r.L``."""
    n = r.n
    if not 1 <= k <= n - 1:
        raise ValueError(f"degeneracy k={k} outside 1..{n - 1}")
    if abs(r.norm() - 1.0) > NORM_TOL:
        raise ValueError(f"Bloch vector is not unit norm: |r| = {r.norm()!r}")
    return (k / n) * np.eye(n) + c_p(k, n) * generators(n).combine(r.components)


def matrix_to_bloch(matrix, k: int | None = None) -> BlochVector:
    """Direction of the traceless part of a Hermitian matrix, scaled by ``c_p(k, N)``.

    With ``k`` omitted the trace of ``matrix`` is used, which is the right
    choice for projectors.
    """
    matrix = np.asarray(matrix, dtype=complex)
    n = matrix.shape[0]
    if k is None:
        k = int(round(np.trace(matrix).real))
    coeffs = generators(n).coefficients(matrix)
    return BlochVector(n, coeffs / (2.0 * c_p(k, n)))


def star_raw(u: BlochVector, v: BlochVector) -> BlochVector:
    """``s_c = sum_ab d_abc u_a v_b`` without the ``c_s`` normalization."""
    _check_same(u, v)
    return BlochVector(u.n, structure_tensors(u.n).contract("d", u.components, v.components))


def star(u: BlochVector, v: BlochVector) -> BlochVector:
    _check_same(u, v)
    return c_s(u.n) * star_raw(u, v)


def wedge(u: BlochVector, v: BlochVector) -> BlochVector:
    """``w_c = sum_ab f_abc u_a v_b``; the cross product at N = 2."""
    _check_same(u, v)
    return BlochVector(u.n, structure_tensors(u.n).contract("f", u.components, v.components))


def purity_defect(r: BlochVector) -> float:
    if r.n == 2:
        return abs(r.norm() - 1.0)
    return (star(r, r) - r).norm()


def degeneracy_coefficient(n: int, k: int) -> float:
    return float((n - 2 * k) / (n - 2) * np.sqrt((n - 1) / (k * (n - k))))


def degeneracy_defect(r: BlochVector, k: int) -> float:
    """Distance of ``r`` from the rank-``k`` projector constraint ``r*r = mu r``."""
    n = r.n
    if n == 2:
        if k != 1:
            raise ValueError(f"N=2 only admits k=1, got k={k}")
        return purity_defect(r)
    if not 1 <= k <= n - 1:
        raise ValueError(f"degeneracy k={k} outside 1..{n - 1}")
    return (star(r, r) - degeneracy_coefficient(n, k) * r).norm()


def is_pure(r: BlochVector, tol: float = PURITY_TOL) -> bool:
    return abs(r.norm() - 1.0) <= NORM_TOL and purity_defect(r) <= tol


def require_pure(r: BlochVector, name: str = "vector") -> None:
    defect = purity_defect(r)
    if abs(r.norm() - 1.0) > NORM_TOL or defect > PURITY_TOL:
        raise ValueError(f"{name} is not a pure-state Bloch vector (purity defect {defect:.3e})")


def overlap(u: BlochVector, v: BlochVector) -> float:
    """``|<psi_u|psi_v>|^2 = (1 + (N - 1) u.v) / N`` for pure ``u``, ``v``."""
    require_pure(u, "u")
    require_pure(v, "v")
    n = u.n
    return (1.0 + (n - 1) * u.dot(v)) / n


def orthogonal_state_angle(n: int) -> float:
    """Angle between the Bloch vectors of two orthogonal states."""
    return float(np.pi - np.arccos(1.0 / (n - 1)))


def embed_s7(psi) -> np.ndarray:
    """Gauge-invariant 8-vector of a qutrit state in the half-trace scale.

    For ``psi = (n1 e^{i x1}, n2 e^{i x2}, n3 e^{i x3})`` the components are
    ``n1 n2 cos(x1-x2), -n1 n2 sin(x1-x2), (n1^2 - n2^2)/2, n1 n3 cos(x1-x3),
    -n1 n3 sin(x1-x3), n2 n3 cos(x2-x3), -n2 n3 sin(x2-x3),
    (n1^2 + n2^2 - 2 n3^2) / (2 sqrt 3)``, i.e. ``Tr(Pi_psi lambda) / 2``.
    The unit-sphere vector of the same state is ``sqrt(3)`` times this.
    """
    psi = as_state(psi)
    if psi.size != 3:
        raise ValueError(f"embed_s7 needs a qutrit state, got dimension {psi.size}")
    mods = np.abs(psi)
    phases = np.angle(psi)
    n1, n2, n3 = mods
    x1, x2, x3 = phases
    return np.array([
        n1 * n2 * np.cos(x1 - x2),
        -n1 * n2 * np.sin(x1 - x2),
        0.5 * (n1 ** 2 - n2 ** 2),
        n1 * n3 * np.cos(x1 - x3),
        -n1 * n3 * np.sin(x1 - x3),
        n2 * n3 * np.cos(x2 - x3),
        -n2 * n3 * np.sin(x2 - x3),
        (n1 ** 2 + n2 ** 2 - 2 * n3 ** 2) / (2 * np.sqrt(3.0)),
    ])


def geodesic_circle(s) -> np.ndarray:
    """Unit-sphere image of the closed geodesic ``(0, sin s, cos s)``.

    Returns an array of shape ``(len(s), 8)``.
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    out = np.zeros((s.size, 8))
    c2 = np.cos(2 * s)
    out[:, 2] = -np.sqrt(3.0) / 4 * (1 - c2)
    out[:, 5] = np.sqrt(3.0) / 2 * np.sin(2 * s)
    out[:, 7] = -0.25 * (1 + 3 * c2)
    return out


def circle_radius(points) -> tuple[float, np.ndarray]:
    """Radius and centre of points spread evenly over one period of a circle."""
    points = np.asarray(points, dtype=float)
    centre = points.mean(axis=0)
    radii = np.linalg.norm(points - centre, axis=1)
    return float(radii.mean()), centre


def octant_projection(psi) -> np.ndarray:
    psi = as_state(psi)
    if psi.size != 3:
        raise ValueError(f"octant projection needs a qutrit state, got dimension {psi.size}")
    return np.abs(psi)
