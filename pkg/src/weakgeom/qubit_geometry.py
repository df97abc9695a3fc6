"""Two-level closed forms for the family ``O_r = a (I + gamma r.sigma)``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bloch_geometry import BlochVector
from .observables import ObservableDecomposition, compose
from .weak_values import (
    AMPLIFICATION_TOL,
    ORTHOGONAL_TOL,
    UndefinedArgumentError,
    UndefinedWeakValueError,
    WeakValueResult,
    _argument,
    _phi,
    is_boundary,
)

UNIT_TOL = 1e-12


def _unit3(v, name="vector") -> np.ndarray:
    v = np.asarray(v, dtype=float).reshape(3)
    if abs(np.linalg.norm(v) - 1.0) > 1e-10:
        raise ValueError(f"{name} must be a unit 3-vector, got norm {np.linalg.norm(v)!r}")
    return v


@dataclass(frozen=True)
class QubitObservable:
    a: float
    gamma: float
    r: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float).reshape(3)
        if abs(np.linalg.norm(r) - 1.0) > UNIT_TOL:
            raise ValueError(f"r must be a unit vector, got norm {np.linalg.norm(r)!r}")
        object.__setattr__(self, "r", r)

    def decomposition(self) -> ObservableDecomposition:
        a_l = self.a * self.gamma
        r = self.r
        if a_l < 0:
            a_l, r = -a_l, -r
        if a_l == 0:
            return ObservableDecomposition(2, self.a, 0.0, None)
        return ObservableDecomposition(2, self.a, a_l, BlochVector(2, r))

    def matrix(self) -> np.ndarray:
        return compose(self.decomposition())


def qubit_weak_value(obs: QubitObservable, i, f) -> WeakValueResult:
    """``a [1 + f.i + gamma (f.r + r.i) + i gamma f.(r x i)] / (1 + f.i)``."""
    i = _unit3(i, "i")
    f = _unit3(f, "f")
    fi = float(f @ i)
    if (1 + fi) / 2 <= ORTHOGONAL_TOL:
        raise UndefinedWeakValueError(math.sqrt(max((1 + fi) / 2, 0.0)))
    r = obs.r
    fr = float(f @ r)
    ri = float(r @ i)
    triple = float(f @ np.cross(r, i))
    num = complex(1 + fi + obs.gamma * (fr + ri), obs.gamma * triple)
    value = obs.a * num / (1 + fi)
    return WeakValueResult(
        value,
        _argument(value),
        _phi(value),
        invariant_dot_fi=fi,
        invariant_dot_fa=fr,
        invariant_dot_ai=ri,
        invariant_star=0.0,
        invariant_wedge=triple,
        boundary=is_boundary(value),
        amplified=(1 + fi) / 2 < AMPLIFICATION_TOL,
    )


def i_prime(obs: QubitObservable, i) -> np.ndarray:
    """Bloch vector of ``O_r psi_i``.

    ``[(1 - g^2) i + 2 g (1 + g r.i) r] / (1 + 2 g r.i + g^2)``
    """
    i = _unit3(i, "i")
    g = obs.gamma
    ri = float(obs.r @ i)
    denom = 1 + 2 * g * ri + g * g
    if abs(denom) <= 1e-12:
        raise UndefinedArgumentError("O_r psi_i = 0: i' is undefined")
    return ((1 - g * g) * i + 2 * g * (1 + g * ri) * obs.r) / denom


def mirror(i, r) -> np.ndarray:
    """Reflection of ``i`` through the axis ``r``: ``-i + 2 (i.r) r``."""
    i = _unit3(i, "i")
    r = _unit3(r, "r")
    return -i + 2 * float(i @ r) * r


def critical_gamma(i, r) -> float:
    """``-1 / (i.r)``, where the mean ``<O_r>`` in ``psi_i`` changes sign.

    At this value ``i'`` is the antipode of ``i``.
    """
    i = _unit3(i, "i")
    r = _unit3(r, "r")
    c = float(i @ r)
    if abs(c) <= 1e-12:
        raise ValueError("i is perpendicular to r: no finite critical gamma")
    return -1.0 / c


def smallest_angle(u, v) -> float:
    c = float(np.clip(np.dot(u, v), -1.0, 1.0))
    return math.acos(c)


def angle_profile(r, i, gamma_grid, a: float = 1.0) -> dict:
    """Angles of ``i'`` against ``i`` and ``r`` along a grid of ``gamma``.

    Returns a dict of column arrays (``gamma``, ``phi_ii_prime``,
    ``phi_ri_prime``) plus the constant angles ``phi_ir``, ``phi_ii_m``,
    ``phi_ri_m`` and the raw caption expression ``2 (pi - phi_ir)``.
    """
    r = _unit3(r, "r")
    i = _unit3(i, "i")
    gammas = np.asarray(gamma_grid, dtype=float)
    c = float(i @ r)
    if abs(c) > 1e-12:
        g_star = -1.0 / c
        if np.any(np.abs(gammas - g_star) <= 1e-9):
            raise ValueError(f"gamma grid hits the critical value {g_star!r}")
    phi_ii = np.empty(gammas.size)
    phi_ri = np.empty(gammas.size)
    for k, g in enumerate(gammas):
        ip = i_prime(QubitObservable(a, g, r), i)
        phi_ii[k] = smallest_angle(i, ip)
        phi_ri[k] = smallest_angle(r, ip)
    phi_ir = smallest_angle(i, r)
    i_m = mirror(i, r)
    return {
        "gamma": gammas,
        "phi_ii_prime": phi_ii,
        "phi_ri_prime": phi_ri,
        "phi_ir": phi_ir,
        "phi_ii_m": smallest_angle(i, i_m),
        "phi_ri_m": smallest_angle(r, i_m),
        "caption_2_pi_minus_phi_ir": 2 * (math.pi - phi_ir),
    }


def default_gamma_grid(i, r, points: int = 400) -> np.ndarray:
    """Log-spaced gammas of both signs plus a dense band around the critical value."""
    logs = np.logspace(-3, 3, points)
    grid = np.concatenate([-logs[::-1], [0.0], logs])
    c = float(np.dot(i, r))
    if abs(c) > 1e-12:
        g_star = -1.0 / c
        width = 0.5 * max(1.0, abs(g_star))
        near = g_star + np.linspace(-width, width, points)
        grid = np.concatenate([grid, near])
        grid = grid[np.abs(grid - g_star) > 1e-6]
    return np.unique(grid)


def solid_angle(a, b, c) -> float:
    """Oriented solid angle of the spherical triangle ``(a, b, c)``.

    ``Omega = 2 atan2(a.(b x c), 1 + a.b + b.c + c.a)``; positive when
    ``a, b, c`` run counter-clockwise seen from outside.
    """
    a = _unit3(a, "a")
    b = _unit3(b, "b")
    c = _unit3(c, "c")
    triple = float(a @ np.cross(b, c))
    denom = 1 + float(a @ b) + float(b @ c) + float(c @ a)
    if abs(triple) <= 1e-15:
        # points on one great circle
        return 0.0
    return 2 * math.atan2(triple, denom)
