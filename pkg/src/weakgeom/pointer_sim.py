"""Von Neumann pointer readout of weak values.

The impulsive coupling ``exp(-i g A (x) p)`` shifts the pointer by ``g a_k``
on each eigenspace of ``A``, so after post-selection on ``psi_f`` the pointer
wavefunction is exactly ``sum_k <psi_f|Pi_k|psi_i> phi(x - g a_k)``. Moments
are taken by quadrature on a uniform grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .observables import check_hermitian
from .weak_values import PrePostSelection, weak_value_direct

MIN_POINTS = 256
COVERAGE_SIGMAS = 8.0
MIN_POSTSELECT = 1e-14
DEFAULT_G_LIST = (0.1, 0.05, 0.025, 0.0125)


@dataclass(frozen=True)
class GaussianPointer:
    grid_min: float = -12.0
    grid_max: float = 12.0
    num_points: int = 2048
    sigma: float = 1.0

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("pointer width sigma must be positive")
        if self.num_points < MIN_POINTS:
            raise ValueError(f"pointer grid needs at least {MIN_POINTS} points")
        if self.grid_max <= self.grid_min:
            raise ValueError("empty pointer grid")

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.grid_min, self.grid_max, self.num_points)

    @property
    def sigma_p(self) -> float:
        return 1.0 / (2.0 * self.sigma)

    def check_coverage(self, centres) -> None:
        margin = COVERAGE_SIGMAS * self.sigma
        lo, hi = float(np.min(centres)), float(np.max(centres))
        if lo - margin < self.grid_min or hi + margin > self.grid_max:
            raise ValueError(
                f"pointer grid [{self.grid_min}, {self.grid_max}] does not cover "
                f"{COVERAGE_SIGMAS:g} sigma around shifted centres [{lo:.3g}, {hi:.3g}]"
            )

    def amplitude(self, x, centre=0.0):
        s = self.sigma
        return (2 * math.pi * s * s) ** -0.25 * np.exp(-((x - centre) ** 2) / (4 * s * s))

    def derivative(self, x, centre=0.0):
        return -(x - centre) / (2 * self.sigma ** 2) * self.amplitude(x, centre)


@dataclass(frozen=True)
class PointerOutcome:
    mean_x: float
    mean_p: float
    postselect_prob: float
    g: float

    def to_json(self) -> dict:
        return {
            "g": self.g,
            "mean_x": self.mean_x,
            "mean_p": self.mean_p,
            "postselect_prob": self.postselect_prob,
        }


def _spectral(a):
    """Eigenvalues grouped into eigenspaces with their projectors."""
    vals, vecs = np.linalg.eigh(a)
    groups = []
    start = 0
    for k in range(1, len(vals) + 1):
        if k == len(vals) or vals[k] - vals[start] > 1e-10:
            block = vecs[:, start:k]
            groups.append((float(np.mean(vals[start:k])), block @ block.conj().T))
            start = k
    return groups


def _moments(amps, shifts, ptr: GaussianPointer):
    x = ptr.x
    dx = x[1] - x[0]
    psi = np.zeros_like(x, dtype=complex)
    dpsi = np.zeros_like(x, dtype=complex)
    for c, s in zip(amps, shifts):
        psi += c * ptr.amplitude(x, s)
        dpsi += c * ptr.derivative(x, s)
    dens = np.abs(psi) ** 2
    prob = float(np.trapezoid(dens, dx=dx))
    return psi, dpsi, dens, prob, dx


def simulate(a, sel: PrePostSelection, g: float, ptr: GaussianPointer = GaussianPointer()
             ) -> PointerOutcome:
    """Post-selected pointer position and momentum means at coupling ``g``."""
    if g == 0:
        raise ValueError("coupling g must be nonzero")
    a = check_hermitian(a)
    groups = _spectral(a)
    shifts = [g * val for val, _ in groups]
    ptr.check_coverage(shifts)
    amps = [complex(np.vdot(sel.psi_f, proj @ sel.psi_i)) for _, proj in groups]
    psi, dpsi, dens, prob, dx = _moments(amps, shifts, ptr)
    if prob < MIN_POSTSELECT:
        raise ValueError(f"post-selection probability {prob:.3e} is below {MIN_POSTSELECT:g}")
    x = ptr.x
    mean_x = float(np.trapezoid(x * dens, dx=dx) / prob)
    mean_p = float(np.trapezoid((psi.conj() * (-1j) * dpsi), dx=dx).real / prob)
    return PointerOutcome(mean_x, mean_p, prob, g)


def simulate_unconditioned(a, psi_i, g: float, ptr: GaussianPointer = GaussianPointer()
                           ) -> float:
    """Pointer mean position summed over a complete post-selection basis."""
    a = check_hermitian(a)
    psi_i = np.asarray(psi_i, dtype=complex)
    n = psi_i.size
    groups = _spectral(a)
    shifts = [g * val for val, _ in groups]
    ptr.check_coverage(shifts)
    x = ptr.x
    dx = x[1] - x[0]
    total_x = 0.0
    for basis_vec in np.eye(n, dtype=complex):
        amps = [complex(np.vdot(basis_vec, proj @ psi_i)) for _, proj in groups]
        _, _, dens, _, _ = _moments(amps, shifts, ptr)
        total_x += float(np.trapezoid(x * dens, dx=dx))
    return total_x


def _extrapolate(g_list, values) -> complex:
    # the estimate is even in g for a symmetric pointer, so fit in g^2
    g2 = np.asarray(g_list, dtype=float) ** 2
    values = np.asarray(values, dtype=complex)
    deg = len(g2) - 1
    re = np.polyval(np.polyfit(g2, values.real, deg), 0.0)
    im = np.polyval(np.polyfit(g2, values.imag, deg), 0.0)
    return complex(re, im)


_CALIBRATION: dict = {}


def momentum_calibration(ptr: GaussianPointer = GaussianPointer(),
                         g_list=DEFAULT_G_LIST) -> float:
    """Proportionality between ``mean_p / g`` and ``Im A_w``.

    Measured on sigma_y with ``psi_i = |0>``, ``psi_f = |+>``, where the weak
    value is exactly ``i``. Analytically this is ``2 sigma_p^2``.
    """
    key = (ptr, tuple(g_list))
    if key not in _CALIBRATION:
        sigma_y = np.array([[0, -1j], [1j, 0]])
        sel = PrePostSelection([1, 0], np.array([1, 1]) / math.sqrt(2))
        im_wv = weak_value_direct(sigma_y, sel).imag
        ratios = [simulate(sigma_y, sel, g, ptr).mean_p / (g * im_wv) for g in g_list]
        _CALIBRATION[key] = _extrapolate(g_list, ratios).real
    return _CALIBRATION[key]


@dataclass(frozen=True)
class WeakValueEstimate:
    estimate: complex
    convergence_order: float
    per_g: tuple
    residuals: tuple
    calibration: float
    outcomes: tuple
    weak_regime: bool

    def to_json(self) -> dict:
        return {
            "estimate": [self.estimate.real, self.estimate.imag],
            "convergence_order": self.convergence_order,
            "momentum_calibration": self.calibration,
            "weak_regime": self.weak_regime,
            "rows": [
                {**o.to_json(), "estimate": [e.real, e.imag], "residual": r}
                for o, e, r in zip(self.outcomes, self.per_g, self.residuals)
            ],
        }


def extract_weak_value(a, sel: PrePostSelection, ptr: GaussianPointer = GaussianPointer(),
                       g_list=DEFAULT_G_LIST) -> WeakValueEstimate:
    """Read ``A_w`` off the pointer and extrapolate the coupling to zero.

    ``Re A_w ~ mean_x / g`` and ``Im A_w ~ mean_p / (kappa g)`` with ``kappa``
    from :func:`momentum_calibration`. The convergence order is the mean
    ``log2`` ratio of successive residuals against the direct weak value, so
    ``g_list`` should halve at each step.
    """
    g_list = tuple(float(g) for g in g_list)
    if len(g_list) < 3:
        raise ValueError("need at least three couplings to extrapolate")
    if any(g <= 0 for g in g_list) or any(b >= a_ for a_, b in zip(g_list, g_list[1:])):
        raise ValueError("g_list must be positive and strictly decreasing")
    a = check_hermitian(a)
    kappa = momentum_calibration(ptr)
    outcomes = tuple(simulate(a, sel, g, ptr) for g in g_list)
    per_g = tuple(complex(o.mean_x / o.g, o.mean_p / (kappa * o.g)) for o in outcomes)
    estimate = _extrapolate(g_list, per_g)

    exact = weak_value_direct(a, sel)
    residuals = tuple(abs(e - exact) for e in per_g)
    orders = [
        math.log(r0 / r1) / math.log(g0 / g1)
        for r0, r1, g0, g1 in zip(residuals, residuals[1:], g_list, g_list[1:])
        if r0 > 0 and r1 > 0
    ]
    order = float(np.mean(orders)) if orders else math.inf
    spread = float(np.max(np.abs(np.linalg.eigvalsh(a))))
    weak = g_list[0] * spread / ptr.sigma < 0.5
    return WeakValueEstimate(estimate, order, per_g, residuals, kappa, outcomes, weak)
