"""Weak values: the direct matrix definition and the Bloch-vector formulas.

``weak_value_direct`` is plain linear algebra and serves as the reference for
every geometric path in this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bloch_geometry import (
    NORM_TOL,
    BlochVector,
    as_state,
    c_p,
    projector_of,
    require_pure,
    star_finite_coefficient,
    star_raw,
    state_to_bloch,
    wedge,
)
from .observables import ObservableDecomposition, check_hermitian

ZERO_TOL = 1e-12
#: squared overlap below which the weak value is refused
ORTHOGONAL_TOL = 1e-12
#: squared overlap below which results are flagged as amplified
AMPLIFICATION_TOL = 1e-4


class UndefinedWeakValueError(ValueError):
    """Pre- and post-selected states are (numerically) orthogonal."""

    def __init__(self, overlap: float):
        self.overlap = overlap
        super().__init__(f"undefined weak value: |<psi_f|psi_i>| = {overlap:.3e}")


class UndefinedArgumentError(ValueError):
    pass


@dataclass(frozen=True)
class PrePostSelection:
    psi_i: np.ndarray = field(repr=False)
    psi_f: np.ndarray = field(repr=False)
    i_vec: BlochVector = field(init=False, repr=False)
    f_vec: BlochVector = field(init=False, repr=False)

    def __post_init__(self):
        psi_i = as_state(self.psi_i)
        psi_f = as_state(self.psi_f)
        if psi_i.size != psi_f.size:
            raise ValueError(f"pre-selection has N={psi_i.size}, post-selection N={psi_f.size}")
        object.__setattr__(self, "psi_i", psi_i)
        object.__setattr__(self, "psi_f", psi_f)
        object.__setattr__(self, "i_vec", state_to_bloch(psi_i))
        object.__setattr__(self, "f_vec", state_to_bloch(psi_f))

    @property
    def n(self) -> int:
        return self.psi_i.size

    @property
    def amplitude(self) -> complex:
        """``<psi_f|psi_i>``."""
        return complex(np.vdot(self.psi_f, self.psi_i))

    @property
    def overlap(self) -> float:
        return abs(self.amplitude) ** 2


@dataclass(frozen=True)
class WeakValueResult:
    value: complex
    argument: float
    phi_term: float
    invariant_dot_fi: float = 0.0
    invariant_dot_fa: float = 0.0
    invariant_dot_ai: float = 0.0
    #: ``(N - 2) f.(alpha * i)``, computed through the finite coefficient
    invariant_star: float = 0.0
    invariant_wedge: float = 0.0
    boundary: bool = False
    amplified: bool = False

    @property
    def real(self) -> float:
        return self.value.real

    @property
    def imag(self) -> float:
        return self.value.imag

    def to_json(self) -> dict:
        return {
            "value": [self.value.real, self.value.imag],
            "argument": self.argument,
            "phi": self.phi_term,
            "boundary": self.boundary,
            "amplified": self.amplified,
            "invariants": {
                "f.i": self.invariant_dot_fi,
                "f.alpha": self.invariant_dot_fa,
                "alpha.i": self.invariant_dot_ai,
                "(N-2) f.(alpha*i)": self.invariant_star,
                "f.(alpha^i)": self.invariant_wedge,
            },
        }


def quadrant_phi(z: complex) -> float:
    """Quadrant correction added to ``arctan(Im z / Re z)``: 0 for Re z > 0, pi for Re z < 0.

    On the imaginary axis (``|Re z| <= 1e-12``) the correction is reported as 0;
    use :func:`is_boundary` to detect that case.
    """
    z = complex(z)
    if abs(z) <= ZERO_TOL:
        raise UndefinedArgumentError("argument undefined for a vanishing value")
    if z.real > ZERO_TOL:
        return 0.0
    if z.real < -ZERO_TOL:
        return math.pi
    return 0.0


def is_boundary(z: complex) -> bool:
    return abs(complex(z).real) <= ZERO_TOL


def wrap_angle(theta: float) -> float:
    """Map an angle into ``(-pi, pi]``."""
    wrapped = math.remainder(theta, 2 * math.pi)
    return math.pi if wrapped == -math.pi else wrapped


def arctan_argument(numerator_re: float, numerator_im: float) -> float:
    """``arctan(Im/Re) + phi`` folded into ``(-pi, pi]``; atan2 on the imaginary axis."""
    z = complex(numerator_re, numerator_im)
    phi = quadrant_phi(z)
    if is_boundary(z):
        return math.atan2(z.imag, z.real)
    return wrap_angle(math.atan(z.imag / z.real) + phi)


def _argument(value: complex) -> float:
    if abs(value) <= ZERO_TOL:
        return math.nan
    arg = math.atan2(value.imag, value.real)
    return math.pi if arg == -math.pi else arg


def _phi(value: complex) -> float:
    return quadrant_phi(value) if abs(value) > ZERO_TOL else 0.0


def weak_value_direct(a, sel: PrePostSelection) -> complex:
    """``<psi_f|A|psi_i> / <psi_f|psi_i>`` by matrix-vector arithmetic."""
    a = np.asarray(a, dtype=complex)
    amp = sel.amplitude
    if abs(amp) ** 2 <= ORTHOGONAL_TOL:
        raise UndefinedWeakValueError(abs(amp))
    return complex(np.vdot(sel.psi_f, a @ sel.psi_i) / amp)


def _check_selection(i: BlochVector, f: BlochVector) -> float:
    require_pure(i, "pre-selection i")
    require_pure(f, "post-selection f")
    if i.n != f.n:
        raise ValueError(f"i has N={i.n}, f has N={f.n}")
    n = i.n
    ovl = (1.0 + (n - 1) * f.dot(i)) / n
    if ovl <= ORTHOGONAL_TOL:
        raise UndefinedWeakValueError(math.sqrt(max(ovl, 0.0)))
    return ovl


def weak_value_geometric(
    dec: ObservableDecomposition, i: BlochVector, f: BlochVector
) -> WeakValueResult:
    """Weak value of ``a_I I + a_L alpha.L`` from the three Bloch vectors.

    The numerator is::

        a_I/N + a_I (N-1)/N f.i + a_L sqrt(2(N-1))/(N sqrt N) (f.alpha + alpha.i)
          + a_L sqrt(2(N-1))/(N sqrt N) (N-2) f.(alpha * i)
          + i a_L (N-1)/N f.(alpha ^ i)

    and the denominator ``(1 + (N-1) f.i) / N``.
    """
    ovl = _check_selection(i, f)
    n = i.n
    if dec.n != n:
        raise ValueError(f"observable has N={dec.n}, states have N={n}")
    fi = f.dot(i)
    if dec.is_identity_multiple:
        value = complex(dec.a_i)
        return WeakValueResult(
            value, _argument(value), _phi(value), invariant_dot_fi=fi,
            amplified=ovl < AMPLIFICATION_TOL,
        )
    alpha = dec.alpha
    fa = f.dot(alpha)
    ai = alpha.dot(i)
    star_term = star_finite_coefficient(n) * f.dot(star_raw(alpha, i))
    wedge_term = f.dot(wedge(alpha, i))

    lin = dec.a_l * math.sqrt(2 * (n - 1)) / (n * math.sqrt(n))
    re = dec.a_i / n + dec.a_i * (n - 1) / n * fi + lin * (fa + ai) + lin * star_term
    im = dec.a_l * (n - 1) / n * wedge_term
    value = complex(re, im) / ovl
    return WeakValueResult(
        value,
        _argument(value),
        _phi(value),
        invariant_dot_fi=fi,
        invariant_dot_fa=fa,
        invariant_dot_ai=ai,
        invariant_star=star_term,
        invariant_wedge=wedge_term,
        boundary=is_boundary(value),
        amplified=ovl < AMPLIFICATION_TOL,
    )


def quadrant_argument(result: WeakValueResult) -> float:
    """Argument rebuilt as ``arctan(Im/Re) + phi`` from the stored value."""
    return arctan_argument(result.value.real, result.value.imag)


def weak_value_projector_geometric(
    r: BlochVector, i: BlochVector, f: BlochVector
) -> WeakValueResult:
    """Weak value of the rank-one projector on the pure state ``r``."""
    require_pure(r, "projector direction r")
    n = r.n
    dec = ObservableDecomposition(n, 1.0 / n, c_p(1, n), r)
    return weak_value_geometric(dec, i, f)


def qutrit_projector_weak_value(r: BlochVector, i: BlochVector, f: BlochVector) -> complex:
    """Qutrit projector weak value in its closed form.

    ``(1 + 2 f.r + 2 r.i + 2 f.i + 2 f.(r*i) + 2 sqrt(3) i f.(r^i)) / (3 + 6 f.i)``
    with the normalized qutrit star product.
    """
    for v in (r, i, f):
        if v.n != 3:
            raise ValueError("qutrit formula needs N=3 vectors")
        require_pure(v)
    fi = f.dot(i)
    denom = 3 + 6 * fi
    if denom / 3 <= ORTHOGONAL_TOL:
        raise UndefinedWeakValueError(math.sqrt(max(denom / 3, 0.0)))
    s3 = math.sqrt(3.0)
    # c_s = sqrt(3) at N = 3
    star_ri = s3 * star_raw(r, i)
    num = complex(
        1 + 2 * f.dot(r) + 2 * r.dot(i) + 2 * fi + 2 * f.dot(star_ri),
        2 * s3 * f.dot(wedge(r, i)),
    )
    return num / denom


def generator_weak_value(alpha: BlochVector, i: BlochVector, f: BlochVector) -> WeakValueResult:
    """Weak value of the generator ``alpha.L`` (``alpha`` need not be a state).

    ``sqrt(2(N-1)/N) [f.alpha + alpha.i + (N-2) f.(alpha*i)
    + i sqrt(N(N-1)/2) f.(alpha^i)] / (1 + (N-1) f.i)``
    """
    ovl = _check_selection(i, f)
    n = i.n
    norm = alpha.norm()
    if abs(norm - 1.0) > NORM_TOL:
        raise ValueError(f"generator direction must be unit norm, got |alpha| = {norm!r}")
    fi = f.dot(i)
    fa = f.dot(alpha)
    ai = alpha.dot(i)
    star_term = star_finite_coefficient(n) * f.dot(star_raw(alpha, i))
    wedge_term = f.dot(wedge(alpha, i))
    num = complex(fa + ai + star_term, math.sqrt(n * (n - 1) / 2) * wedge_term)
    value = math.sqrt(2 * (n - 1) / n) * num / (1 + (n - 1) * fi)
    return WeakValueResult(
        value,
        _argument(value),
        _phi(value),
        invariant_dot_fi=fi,
        invariant_dot_fa=fa,
        invariant_dot_ai=ai,
        invariant_star=star_term,
        invariant_wedge=wedge_term,
        boundary=is_boundary(value),
        amplified=ovl < AMPLIFICATION_TOL,
    )


def bargmann_invariant(states) -> complex:
    """``Tr(Pi_k ... Pi_2 Pi_1)`` for states given in order ``1, 2, ..., k``."""
    states = [as_state(s) for s in states]
    if len(states) < 3:
        raise ValueError(f"a Bargmann invariant needs at least 3 states, got {len(states)}")
    n = states[0].size
    prod = np.eye(n, dtype=complex)
    for psi in states:
        if psi.size != n:
            raise ValueError("all states must share one dimension")
        if abs(np.linalg.norm(psi) - 1.0) > NORM_TOL:
            raise ValueError("states must be normalized")
        prod = projector_of(psi) @ prod
    return complex(np.trace(prod))


def effective_projector(a, psi_i):
    """State ``A psi_i / |A psi_i|`` and its projector.

    Raises
    ------
    UndefinedArgumentError
        If ``A psi_i`` vanishes: the weak value is 0 and its argument undefined.
    """
    a = check_hermitian(a)
    psi_i = as_state(psi_i)
    v = a @ psi_i
    norm = np.linalg.norm(v)
    if norm <= ZERO_TOL:
        raise UndefinedArgumentError(
            "A psi_i = 0: the weak value is 0 and the argument is undefined"
        )
    psi_p = v / norm
    return psi_p, projector_of(psi_p)


@dataclass(frozen=True)
class ArgumentDecomposition:
    arg_pi_iprime: float
    arg_mean: float
    total: float

    def __iter__(self):
        return iter((self.arg_pi_iprime, self.arg_mean, self.total))


def argument_decomposition(a, sel: PrePostSelection) -> ArgumentDecomposition:
    """Split ``arg A_w`` into the effective-projector phase and the sign of ``<A>``.

    ``arg A_w = arg Pi_{i',w} - arg <A>_{psi_i}`` (mod 2 pi), where the first
    term comes from the Bloch-vector projector formula applied to ``i'``.
    """
    a = check_hermitian(a)
    mean = complex(np.vdot(sel.psi_i, a @ sel.psi_i)).real
    if abs(mean) <= ZERO_TOL:
        raise UndefinedArgumentError("<A> vanishes in psi_i: the sign term is ill-defined")
    psi_p, _ = effective_projector(a, sel.psi_i)
    proj = weak_value_projector_geometric(state_to_bloch(psi_p), sel.i_vec, sel.f_vec)
    if abs(proj.value) <= ZERO_TOL:
        raise UndefinedArgumentError("effective projector weak value vanishes")
    arg_mean = 0.0 if mean > 0 else math.pi
    total = _argument(weak_value_direct(a, sel))
    return ArgumentDecomposition(proj.argument, arg_mean, total)
