"""Scenario documents and the command runner behind the CLI.

A scenario is a small JSON object::

    {"n": 2,
     "psi_i": [[1, 0], [0, 0]],
     "psi_f": {"n": 2, "amplitudes": [[0.7071067811865476, 0], [0.7071067811865476, 0]]},
     "observable": {"matrix": [[[0, 0], [0, -1]], [[0, 1], [0, 0]]]}}

Complex numbers are ``[re, im]`` pairs (bare reals are accepted too). Any of
``psi_i``, ``psi_f``, ``observable``, ``observable_b`` may be the string
``"random"``; those are drawn from ``seed`` in that order.
"""

from __future__ import annotations

import copy
import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .bloch_geometry import (
    circle_radius,
    embed_s7,
    geodesic_circle,
    octant_projection,
    state_to_bloch,
)
from .observables import ObservableDecomposition, compose, decompose, from_coefficients
from .pointer_sim import DEFAULT_G_LIST, GaussianPointer, extract_weak_value
from .qubit_geometry import QubitObservable, angle_profile, default_gamma_grid, qubit_weak_value
from .sun_algebra import ORDERING_VERSION, generators, structure_tensors, verify_algebra
from .uncertainty import moments
from .weak_values import (
    PrePostSelection,
    argument_decomposition,
    quadrant_argument,
    weak_value_direct,
    weak_value_geometric,
)

log = logging.getLogger(__name__)

NORMALIZE_WARN_TOL = 1e-6
COMMANDS = ("weak-value", "moments", "qubit-sweep", "pointer", "algebra-check", "embed")
DEFAULT_TOLERANCE = {
    "weak-value": 1e-10,
    "moments": 1e-10,
    "qubit-sweep": 1e-10,
    "pointer": 1e-6,
    "algebra-check": 1e-10,
    "embed": 1e-12,
}
_STATE_FIELDS = ("psi_i", "psi_f")
_OBS_FIELDS = ("observable", "observable_b")
_META = ("name", "description", "command", "expect")
_KNOWN = {"n", "seed", "sweep", "pointer", "format", *_META,
          *_STATE_FIELDS, *_OBS_FIELDS}


class ScenarioError(ValueError):
    """Invalid scenario input; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


@dataclass
class Scenario:
    n: int
    psi_i: np.ndarray | None = None
    psi_f: np.ndarray | None = None
    observable: ObservableDecomposition | None = None
    observable_b: ObservableDecomposition | None = None
    sweep: dict = field(default_factory=dict)
    pointer: dict = field(default_factory=dict)
    seed: int | None = None
    format: str | None = None
    meta: dict = field(default_factory=dict)

    def __eq__(self, other):
        return isinstance(other, Scenario) and serialize(self) == serialize(other)

    def selection(self) -> PrePostSelection:
        if self.psi_i is None or self.psi_f is None:
            raise ScenarioError("psi_i/psi_f", "this command needs both pre- and post-selection")
        return PrePostSelection(self.psi_i, self.psi_f)

    def require_observable(self, name="observable") -> ObservableDecomposition:
        dec = getattr(self, name)
        if dec is None:
            raise ScenarioError(name, "missing")
        return dec


# -- parsing -----------------------------------------------------------------

def _complex(value, path):
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(
        isinstance(x, (int, float)) and not isinstance(x, bool) for x in value
    ):
        return complex(value[0], value[1])
    raise ScenarioError(path, f"expected a number or [re, im] pair, got {value!r}")


def _parse_state(doc, n, path):
    if isinstance(doc, dict):
        if "amplitudes" not in doc:
            raise ScenarioError(path, "state object needs 'amplitudes'")
        if "n" in doc and int(doc["n"]) != n:
            raise ScenarioError(f"{path}.n", f"state dimension {doc['n']} != scenario n={n}")
        doc = doc["amplitudes"]
        path = f"{path}.amplitudes"
    if not isinstance(doc, list):
        raise ScenarioError(path, "expected a list of amplitudes")
    if len(doc) != n:
        raise ScenarioError(path, f"expected {n} amplitudes, got {len(doc)}")
    psi = np.array([_complex(v, f"{path}[{k}]") for k, v in enumerate(doc)], dtype=complex)
    norm = float(np.linalg.norm(psi))
    if abs(norm - 1.0) > NORMALIZE_WARN_TOL:
        raise ScenarioError(path, f"state norm {norm!r} is off by more than {NORMALIZE_WARN_TOL:g}")
    if abs(norm - 1.0) > 1e-14:
        log.warning("%s: renormalizing state with norm %r", path, norm)
        psi = psi / norm
    return psi


def _parse_observable(doc, n, path):
    if not isinstance(doc, dict):
        raise ScenarioError(path, "expected an object with 'matrix' or 'a_i'/'a_l'/'alpha'")
    if "matrix" in doc:
        rows = doc["matrix"]
        if not isinstance(rows, list) or len(rows) != n:
            raise ScenarioError(f"{path}.matrix", f"expected {n} rows")
        mat = np.empty((n, n), dtype=complex)
        for j, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != n:
                raise ScenarioError(f"{path}.matrix[{j}]", f"expected {n} entries")
            for k, v in enumerate(row):
                mat[j, k] = _complex(v, f"{path}.matrix[{j}][{k}]")
        try:
            return decompose(mat)
        except ValueError as exc:
            raise ScenarioError(f"{path}.matrix", str(exc)) from None
    try:
        a_i = float(doc["a_i"])
        a_l = float(doc.get("a_l", 0.0))
    except (KeyError, TypeError, ValueError):
        raise ScenarioError(path, "decomposition needs numeric 'a_i' and 'a_l'") from None
    alpha = doc.get("alpha")
    if alpha is not None:
        if not isinstance(alpha, list) or len(alpha) != n * n - 1:
            raise ScenarioError(f"{path}.alpha", f"expected {n * n - 1} real components")
        alpha = [float(x) for x in alpha]
    if a_l != 0 and alpha is None:
        raise ScenarioError(f"{path}.alpha", "required when a_l != 0")
    try:
        return from_coefficients(n, a_i, a_l, alpha)
    except ValueError as exc:
        raise ScenarioError(path, str(exc)) from None


def random_state(rng: np.random.Generator, n: int) -> np.ndarray:
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


def random_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (m + m.conj().T) / 2


def parse_scenario(text, seed: int | None = None) -> Scenario:
    """Validate a scenario given as JSON text or an already-loaded dict."""
    if isinstance(text, (str, bytes)):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ScenarioError("$", f"malformed JSON: {exc}") from None
    else:
        doc = copy.deepcopy(text)
    if not isinstance(doc, dict):
        raise ScenarioError("$", "scenario must be a JSON object")
    unknown = set(doc) - _KNOWN
    if unknown:
        raise ScenarioError("$", f"unknown fields {sorted(unknown)}")
    n = doc.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        raise ScenarioError("n", f"expected an integer >= 2, got {n!r}")
    if seed is None:
        seed = doc.get("seed")
    if seed is not None and (not isinstance(seed, int) or isinstance(seed, bool) or seed < 0):
        raise ScenarioError("seed", f"expected a non-negative integer, got {seed!r}")
    rng = np.random.default_rng(seed)

    sc = Scenario(n=n, seed=seed)
    for name in _STATE_FIELDS:
        if name not in doc:
            continue
        if doc[name] == "random":
            if seed is None:
                raise ScenarioError(name, "'random' requires a seed")
            setattr(sc, name, random_state(rng, n))
        else:
            setattr(sc, name, _parse_state(doc[name], n, name))
    for name in _OBS_FIELDS:
        if name not in doc:
            continue
        if doc[name] == "random":
            if seed is None:
                raise ScenarioError(name, "'random' requires a seed")
            setattr(sc, name, decompose(random_hermitian(rng, n)))
        else:
            setattr(sc, name, _parse_observable(doc[name], n, name))
    for name in ("sweep", "pointer"):
        if name in doc:
            if not isinstance(doc[name], dict):
                raise ScenarioError(name, "expected an object")
            setattr(sc, name, dict(doc[name]))
    fmt = doc.get("format")
    if fmt is not None and fmt not in ("json", "csv"):
        raise ScenarioError("format", f"expected 'json' or 'csv', got {fmt!r}")
    sc.format = fmt
    sc.meta = {k: doc[k] for k in _META if k in doc}
    return sc


def _pair(z):
    return [float(z.real), float(z.imag)]


def serialize(sc: Scenario) -> dict:
    doc: dict = {"n": sc.n}
    if sc.seed is not None:
        doc["seed"] = sc.seed
    for name in _STATE_FIELDS:
        psi = getattr(sc, name)
        if psi is not None:
            doc[name] = {"n": sc.n, "amplitudes": [_pair(z) for z in psi]}
    for name in _OBS_FIELDS:
        dec = getattr(sc, name)
        if dec is not None:
            doc[name] = {
                "a_i": dec.a_i,
                "a_l": dec.a_l,
                "alpha": None if dec.alpha is None else dec.alpha.components.tolist(),
            }
    if sc.sweep:
        doc["sweep"] = dict(sc.sweep)
    if sc.pointer:
        doc["pointer"] = dict(sc.pointer)
    if sc.format is not None:
        doc["format"] = sc.format
    doc.update(sc.meta)
    return doc


# -- running -----------------------------------------------------------------

@dataclass
class Report:
    command: str
    scenario: dict
    results: dict
    oracle_residuals: dict
    tolerance: float
    rows: list | None = None

    @property
    def passed(self) -> bool:
        return all(
            r is not None and not math.isnan(r) and r <= self.tolerance
            for r in self.oracle_residuals.values()
        )

    def to_json(self) -> dict:
        return {
            "tool_version": __version__,
            "tensor_ordering": ORDERING_VERSION,
            "command": self.command,
            "scenario": self.scenario,
            "results": self.results,
            "oracle_residuals": self.oracle_residuals,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def _rel(a, b) -> float:
    return float(abs(complex(a) - complex(b)) / (1 + abs(complex(b))))


def _run_weak_value(sc: Scenario):
    sel = sc.selection()
    dec = sc.require_observable()
    geo = weak_value_geometric(dec, sel.i_vec, sel.f_vec)
    oracle = weak_value_direct(compose(dec), sel)
    results = geo.to_json()
    results.update(
        decomposition=dec.to_json(),
        oracle=_pair(oracle),
        oracle_residual=_rel(geo.value, oracle),
        arctan_argument=None if math.isnan(geo.argument) else quadrant_argument(geo),
        overlap=sel.overlap,
    )
    residuals = {"weak_value": results["oracle_residual"]}
    try:
        parts = argument_decomposition(compose(dec), sel)
    except ValueError as exc:
        results["argument_decomposition"] = {"undefined": str(exc)}
    else:
        recombined = parts.arg_pi_iprime - parts.arg_mean
        gap = abs(math.remainder(recombined - parts.total, 2 * math.pi))
        results["argument_decomposition"] = {
            "arg_pi_iprime": parts.arg_pi_iprime,
            "arg_mean": parts.arg_mean,
            "total": parts.total,
        }
        residuals["argument_decomposition"] = gap
    return results, residuals, None


def _run_moments(sc: Scenario):
    if sc.psi_i is None:
        raise ScenarioError("psi_i", "moments need a state")
    dec_a = sc.require_observable()
    dec_b = sc.observable_b if sc.observable_b is not None else dec_a
    i = state_to_bloch(sc.psi_i)
    rep = moments(dec_a, dec_b, i)
    a, b, psi = compose(dec_a), compose(dec_b), sc.psi_i

    def ev(m):
        return complex(np.vdot(psi, m @ psi))

    comm = a @ b - b @ a
    oracle = {
        "mean_a": ev(a).real,
        "mean_b": ev(b).real,
        "var_a": (ev(a @ a) - ev(a) ** 2).real,
        "var_b": (ev(b @ b) - ev(b) ** 2).real,
        "cov_ab": (0.5 * ev(a @ b + b @ a) - ev(a) * ev(b)).real,
        "comm_avg": ev(comm).imag,
        "comm_sq_avg": ev(comm.conj().T @ comm).real,
    }
    results = rep.to_json()
    results["oracle"] = oracle
    residuals = {k: abs(getattr(rep, k) - v) for k, v in oracle.items()}
    return results, residuals, None


def _run_qubit_sweep(sc: Scenario):
    if sc.n != 2:
        raise ScenarioError("n", "qubit-sweep needs n = 2")
    sel = sc.selection()
    dec = sc.require_observable()
    if dec.alpha is None:
        raise ScenarioError("observable", "needs a nonzero traceless part to fix r")
    r = dec.alpha.components
    i = sel.i_vec.components
    f = sel.f_vec.components
    a = float(sc.sweep.get("a", 1.0))
    if "gamma" in sc.sweep:
        grid = np.asarray(sc.sweep["gamma"], dtype=float)
    else:
        grid = default_gamma_grid(i, r, int(sc.sweep.get("points", 400)))
    prof = angle_profile(r, i, grid, a)
    rows = []
    worst = 0.0
    for k, g in enumerate(prof["gamma"]):
        obs = QubitObservable(a, float(g), r)
        wv = qubit_weak_value(obs, i, f)
        worst = max(worst, _rel(wv.value, weak_value_direct(obs.matrix(), sel)))
        rows.append({
            "gamma": float(g),
            "phi_ii'": float(prof["phi_ii_prime"][k]),
            "phi_ri'": float(prof["phi_ri_prime"][k]),
            "re_wv": wv.value.real,
            "im_wv": wv.value.imag,
            "arg_wv": wv.argument,
        })
    results = {
        "r": r.tolist(),
        "a": a,
        "phi_ir": prof["phi_ir"],
        "phi_ii_m": prof["phi_ii_m"],
        "phi_ri_m": prof["phi_ri_m"],
        "caption_2_pi_minus_phi_ir": prof["caption_2_pi_minus_phi_ir"],
        "rows": rows,
    }
    return results, {"weak_value": worst}, rows


def _run_pointer(sc: Scenario):
    sel = sc.selection()
    dec = sc.require_observable()
    try:
        ptr = GaussianPointer(**sc.pointer)
    except TypeError as exc:
        raise ScenarioError("pointer", str(exc)) from None
    g_list = sc.sweep.get("g", DEFAULT_G_LIST)
    est = extract_weak_value(compose(dec), sel, ptr, g_list)
    oracle = weak_value_direct(compose(dec), sel)
    results = est.to_json()
    results["oracle"] = _pair(oracle)
    rows = [
        {"g": row["g"], "mean_x": row["mean_x"], "mean_p": row["mean_p"],
         "postselect_prob": row["postselect_prob"],
         "re_estimate": row["estimate"][0], "im_estimate": row["estimate"][1]}
        for row in results["rows"]
    ]
    return results, {"extrapolated": abs(est.estimate - oracle)}, rows


def _run_algebra_check(sc: Scenario):
    rep = verify_algebra(generators(sc.n), structure_tensors(sc.n))
    return rep.as_dict(), dict(rep.residuals), None


def _run_embed(sc: Scenario):
    results: dict = {}
    residuals: dict = {}
    if sc.psi_i is not None:
        if sc.n != 3:
            raise ScenarioError("n", "embed needs a qutrit (n = 3) state")
        vec = embed_s7(sc.psi_i)
        bloch = state_to_bloch(sc.psi_i).components
        rng = np.random.default_rng(sc.seed)
        phase = np.exp(1j * rng.uniform(0, 2 * np.pi))
        results.update(
            s7=vec.tolist(),
            bloch=bloch.tolist(),
            octant=octant_projection(sc.psi_i).tolist(),
        )
        residuals["gauge"] = float(np.max(np.abs(embed_s7(phase * sc.psi_i) - vec)))
        residuals["scale"] = float(np.max(np.abs(np.sqrt(3.0) * vec - bloch)))
    points = int(sc.sweep.get("s_points", 64 if sc.psi_i is None else 0))
    rows = None
    if points:
        s = np.linspace(0.0, np.pi, points, endpoint=False)
        circle = geodesic_circle(s)
        radius, centre = circle_radius(circle)
        oracle = np.array([state_to_bloch([0, np.sin(x), np.cos(x)]).components for x in s])
        results.update(geodesic_radius=radius, geodesic_centre=centre.tolist())
        residuals["geodesic_radius"] = abs(radius - np.sqrt(3.0) / 2)
        residuals["geodesic_vs_bloch"] = float(np.max(np.abs(circle - oracle)))
        rows = [{"s": float(x), **{f"c{k + 1}": float(v) for k, v in enumerate(p)}}
                for x, p in zip(s, circle)]
        results["geodesic"] = rows
    if not results:
        raise ScenarioError("psi_i", "embed needs a qutrit state or sweep.s_points")
    return results, residuals, rows


_RUNNERS = {
    "weak-value": _run_weak_value,
    "moments": _run_moments,
    "qubit-sweep": _run_qubit_sweep,
    "pointer": _run_pointer,
    "algebra-check": _run_algebra_check,
    "embed": _run_embed,
}


def run(sc: Scenario, command: str, tolerance: float | None = None) -> Report:
    if command not in _RUNNERS:
        raise ScenarioError("command", f"unknown command {command!r}; choose from {COMMANDS}")
    results, residuals, rows = _RUNNERS[command](sc)
    tol = DEFAULT_TOLERANCE[command] if tolerance is None else tolerance
    return Report(command, serialize(sc), _jsonable(results), _jsonable(residuals), tol, rows)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return None if math.isnan(v) else v
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return _pair(obj)
    return obj


__all__ = [
    "COMMANDS",
    "Report",
    "Scenario",
    "ScenarioError",
    "parse_scenario",
    "run",
    "serialize",
]
