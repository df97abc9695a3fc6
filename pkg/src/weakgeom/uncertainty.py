"""Means, variances, covariances and commutator averages in Bloch-vector form."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .bloch_geometry import BlochVector, require_pure, star_finite_coefficient, star_raw, wedge
from .observables import ObservableDecomposition

HEISENBERG_TOL = 1e-9


@dataclass(frozen=True)
class MomentReport:
    mean_a: float
    mean_b: float
    var_a: float
    var_b: float
    cov_ab: float
    #: ``<[A, B]>`` is purely imaginary; this is its imaginary part
    comm_avg: float
    comm_sq_avg: float

    @property
    def heisenberg_lhs(self) -> float:
        return self.var_a * self.var_b - self.cov_ab ** 2

    @property
    def heisenberg_rhs(self) -> float:
        return 0.25 * self.comm_avg ** 2

    def to_json(self) -> dict:
        doc = asdict(self)
        doc["heisenberg_lhs"] = self.heisenberg_lhs
        doc["heisenberg_rhs"] = self.heisenberg_rhs
        doc["heisenberg_holds"] = heisenberg_check(self)
        return doc


def _direction(dec: ObservableDecomposition) -> BlochVector:
    if dec.alpha is None:
        return BlochVector(dec.n, np.zeros(dec.n ** 2 - 1))
    return dec.alpha


def average(dec: ObservableDecomposition, i: BlochVector) -> float:
    """``<A> = a_I + a_L sqrt(2(N-1)/N) i.alpha``."""
    require_pure(i, "state i")
    if dec.n != i.n:
        raise ValueError(f"observable has N={dec.n}, state has N={i.n}")
    if dec.is_identity_multiple:
        return dec.a_i
    n = dec.n
    return dec.a_i + dec.a_l * math.sqrt(2 * (n - 1) / n) * i.dot(dec.alpha)


def _sym_term(u: BlochVector, v: BlochVector, i: BlochVector) -> float:
    """``(N - 2) (u * v).i`` through the finite star coefficient."""
    return star_finite_coefficient(i.n) * star_raw(u, v).dot(i)


def moments(dec_a: ObservableDecomposition, dec_b: ObservableDecomposition,
            i: BlochVector) -> MomentReport:
    require_pure(i, "state i")
    n = i.n
    if dec_a.n != n or dec_b.n != n:
        raise ValueError(f"dimension mismatch: A N={dec_a.n}, B N={dec_b.n}, state N={n}")
    alpha, beta = _direction(dec_a), _direction(dec_b)
    al, bl = dec_a.a_l, dec_b.a_l
    ai, bi = alpha.dot(i), beta.dot(i)

    def cov(x, y, xl, yl, xi, yi):
        return 2.0 / n * xl * yl * (x.dot(y) - (n - 1) * xi * yi + _sym_term(x, y, i))

    w = wedge(alpha, beta)
    return MomentReport(
        mean_a=average(dec_a, i),
        mean_b=average(dec_b, i),
        var_a=cov(alpha, alpha, al, al, ai, ai),
        var_b=cov(beta, beta, bl, bl, bi, bi),
        cov_ab=cov(alpha, beta, al, bl, ai, bi),
        comm_avg=2 * al * bl * math.sqrt(2 * (n - 1) / n) * w.dot(i),
        comm_sq_avg=8.0 / n * al ** 2 * bl ** 2 * (w.dot(w) + _sym_term(w, w, i)),
    )


def heisenberg_check(report: MomentReport, tol: float = HEISENBERG_TOL) -> bool:
    return report.heisenberg_lhs >= report.heisenberg_rhs - tol
