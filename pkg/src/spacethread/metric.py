"""Metrics of the form ds² = -Φ² (dx0)² + 2 ξ_i dx^i dx0 + g_ij dx^i dx^j.

A :class:`MetricSpec` holds Φ², ξ_i and g_ij as expression trees over the
coordinates, plus parameter values and domain guards. :func:`eval_sample`
turns a spec into a :class:`MetricSample`: field values and their first
and second partials at one point, obtained in one of three ways:

``analytic``
    symbolic derivative trees, compiled once per spec;
``dual``
    forward-mode jets pushed through the value trees;
``fd``
    central finite differences (for testing only).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from . import expr as ex
from . import jets
from .errors import DomainError, EvalError, ParseError
from .expr import Expr

FIELD_NAMES = ("phi_sq", "xi1", "xi2", "xi3", "g11", "g12", "g13", "g22", "g23", "g33")
# value-vector slots of the symmetric spatial block g_ij
G_IDX = np.array([[4, 5, 6], [5, 7, 8], [6, 8, 9]])
_PAIRS = [(a, b) for a in range(4) for b in range(a, 4)]
MODES = ("analytic", "dual", "fd")


@dataclass(frozen=True, eq=False)
class MetricSpec:
    """Metric components as scalar field expressions.

    ``g`` may be given as a full symmetric 3x3 nesting or as the six upper
    triangle entries ``(g11, g12, g13, g22, g23, g33)``. ``guards`` are
    expressions that must be strictly positive inside the domain.
    ``stationary`` declares that no component depends on x0.
    """

    name: str
    phi_sq: Expr
    xi: tuple
    g: tuple
    params: Mapping[str, float] = field(default_factory=dict)
    guards: tuple = ()
    stationary: bool = False

    def __post_init__(self):
        put = object.__setattr__
        put(self, "phi_sq", ex.as_expr(self.phi_sq))
        xi = tuple(ex.as_expr(x) for x in self.xi)
        if len(xi) != 3:
            raise ValueError("xi needs three components")
        put(self, "xi", xi)
        g = self.g
        if len(g) == 6:
            upper = [ex.as_expr(x) for x in g]
        else:
            rows = [[ex.as_expr(x) for x in row] for row in g]
            if len(rows) != 3 or any(len(r) != 3 for r in rows):
                raise ValueError("g must be 3x3 or six upper-triangle entries")
            for i in range(3):
                for j in range(i):
                    if rows[i][j] != rows[j][i]:
                        raise ValueError(f"g is not symmetric at ({i + 1},{j + 1})")
            upper = [rows[0][0], rows[0][1], rows[0][2], rows[1][1], rows[1][2], rows[2][2]]
        g11, g12, g13, g22, g23, g33 = upper
        put(self, "g", ((g11, g12, g13), (g12, g22, g23), (g13, g23, g33)))
        put(self, "params", {k: float(v) for k, v in dict(self.params).items()})
        put(self, "guards", tuple(ex.as_expr(x) for x in self.guards))
        missing = ex.all_params(self.fields + self.guards) - set(self.params)
        if missing:
            from .errors import MissingParam

            raise MissingParam(f"{self.name}: unbound parameters {sorted(missing)}")

    def __eq__(self, other):
        if not isinstance(other, MetricSpec):
            return NotImplemented
        return (self.name, self.fields, self.params, self.guards, self.stationary) == (
            other.name, other.fields, other.params, other.guards, other.stationary)

    __hash__ = None

    @property
    def fields(self) -> tuple:
        g = self.g
        return (self.phi_sq,) + self.xi + (g[0][0], g[0][1], g[0][2], g[1][1], g[1][2], g[2][2])

    # compiled evaluators are built lazily and cached on the instance
    @cached_property
    def _values_fn(self):
        return ex.compile_exprs(self.fields, self.params, "values")

    @cached_property
    def _guards_fn(self):
        return ex.compile_exprs(self.guards or (ex.ONE,), self.params, "guards")

    @cached_property
    def _order1_fn(self):
        outs = []
        for f in self.fields:
            outs.append(f)
            outs.extend(ex.gradient(f))
        return ex.compile_exprs(outs, self.params, "order1")

    @cached_property
    def _order2_fn(self):
        outs = []
        for f in self.fields:
            h = ex.hessian(f)
            outs.append(f)
            outs.extend(ex.gradient(f))
            outs.extend(h[a][b] for a, b in _PAIRS)
        return ex.compile_exprs(outs, self.params, "order2")

    def values(self, point) -> np.ndarray:
        return np.array(self._values_fn(*point))

    def guard_values(self, point) -> np.ndarray:
        return np.array(self._guards_fn(*point))

    def in_domain(self, point) -> bool:
        try:
            return bool(np.all(self.guard_values(point) > 0.0))
        except EvalError:
            return False

    def check_domain(self, point) -> None:
        try:
            gv = self.guard_values(point)
        except EvalError as exc:
            raise DomainError(f"{self.name}: guard undefined at {[float(v) for v in point]}: {exc}") from exc
        bad = [i for i, v in enumerate(gv) if not v > 0.0]
        if bad:
            shown = ", ".join(ex.to_sexpr(self.guards[i]) for i in bad)
            raise DomainError(f"{self.name}: guard(s) not positive at {[float(v) for v in point]}: {shown}")

    def g4(self, point) -> np.ndarray:
        """Assembled 4x4 coordinate metric at a point."""
        v = self.values(point)
        out = np.empty((4, 4))
        out[0, 0] = -v[0]
        out[0, 1:] = out[1:, 0] = v[1:4]
        out[1:, 1:] = v[G_IDX]
        return out


@dataclass(frozen=True)
class MetricSample:
    """Field values and partials at one point.

    ``values`` is ordered as :data:`FIELD_NAMES`; ``d1[f, a]`` is ∂_a of
    field ``f`` and ``d2[f, a, b]`` the second partial (``None`` when only
    first derivatives were requested).
    """

    point: np.ndarray
    values: np.ndarray
    d1: np.ndarray
    d2: np.ndarray | None
    mode: str = "analytic"

    @property
    def phi_sq(self) -> float:
        return float(self.values[0])

    @property
    def xi(self) -> np.ndarray:
        return self.values[1:4]

    @property
    def g(self) -> np.ndarray:
        return self.values[G_IDX]

    @property
    def phi_sq_d1(self):
        return self.d1[0]

    @property
    def xi_d1(self):
        return self.d1[1:4]

    @property
    def g_d1(self):
        return self.d1[G_IDX]

    @property
    def phi_sq_d2(self):
        return None if self.d2 is None else self.d2[0]

    @property
    def xi_d2(self):
        return None if self.d2 is None else self.d2[1:4]

    @property
    def g_d2(self):
        return None if self.d2 is None else self.d2[G_IDX]

    @property
    def order(self) -> int:
        return 1 if self.d2 is None else 2

    def jet(self) -> jets.Jet:
        """All ten fields as one jet of value shape (10,)."""
        d2 = None if self.d2 is None else np.moveaxis(self.d2, 0, -1)
        return jets.Jet(self.values, self.d1.T.copy(), d2)

    def field_jets(self):
        """``(phi_sq, xi, g)`` as jets of value shapes (), (3,), (3, 3)."""
        j = self.jet()
        return j[0], j[1:4], j[G_IDX]

    def g4(self) -> np.ndarray:
        v = self.values
        out = np.empty((4, 4))
        out[0, 0] = -v[0]
        out[0, 1:] = out[1:, 0] = v[1:4]
        out[1:, 1:] = v[G_IDX]
        return out


def _unpack(flat: Sequence[float], order: int):
    per = 5 if order == 1 else 15
    arr = np.asarray(flat, dtype=float).reshape(len(FIELD_NAMES), per)
    vals = arr[:, 0].copy()
    d1 = arr[:, 1:5].copy()
    d2 = None
    if order == 2:
        d2 = np.empty((len(FIELD_NAMES), 4, 4))
        for col, (a, b) in enumerate(_PAIRS):
            d2[:, a, b] = d2[:, b, a] = arr[:, 5 + col]
    return vals, d1, d2


def _fd_step(x: float, power: float) -> float:
    h = np.finfo(float).eps ** power * max(1.0, abs(x))
    # exactly representable step
    return (x + h) - x


def _fd_derivatives(spec: MetricSpec, point: np.ndarray, order: int):
    f = spec.values
    f0 = f(point)
    d1 = np.empty((len(FIELD_NAMES), 4))
    for a in range(4):
        h = _fd_step(point[a], 1.0 / 3.0)
        e = np.zeros(4)
        e[a] = h
        d1[:, a] = (f(point + e) - f(point - e)) / (2.0 * h)
    d2 = None
    if order == 2:
        # a wider step for second differences: rounding error scales as eps/h²
        hs = [_fd_step(point[a], 0.25) for a in range(4)]
        d2 = np.empty((len(FIELD_NAMES), 4, 4))
        for a in range(4):
            ea = np.zeros(4)
            ea[a] = hs[a]
            d2[:, a, a] = (f(point + ea) - 2.0 * f0 + f(point - ea)) / hs[a] ** 2
            for b in range(a + 1, 4):
                eb = np.zeros(4)
                eb[b] = hs[b]
                val = (f(point + ea + eb) - f(point + ea - eb)
                       - f(point - ea + eb) + f(point - ea - eb)) / (4.0 * hs[a] * hs[b])
                d2[:, a, b] = d2[:, b, a] = val
    return f0, d1, d2


def _dual_derivatives(spec: MetricSpec, point: np.ndarray, order: int):
    seeds = [jets.Jet.variable(point[k], k, 4, order) for k in range(4)]
    vals = np.empty(len(FIELD_NAMES))
    d1 = np.empty((len(FIELD_NAMES), 4))
    d2 = np.empty((len(FIELD_NAMES), 4, 4)) if order == 2 else None
    for i, e in enumerate(spec.fields):
        r = jets.as_jet(ex.evaluate(e, seeds, spec.params, lib=jets), 4, order)
        vals[i] = r.v
        d1[i] = r.d1
        if d2 is not None:
            d2[i] = r.d2
    return vals, d1, d2


def eval_sample(spec: MetricSpec, point, mode: str = "analytic", order: int = 2,
                check_domain: bool = True) -> MetricSample:
    """Evaluate all metric fields and their partials at ``point``.

    Raises :class:`DomainError` if a guard fails (unless ``check_domain``
    is false) and :class:`EvalError` on a non-finite result.
    """
    point = np.asarray(point, dtype=float)
    if point.shape != (4,):
        raise ValueError("a point has four coordinates")
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    if check_domain:
        spec.check_domain(point)
    if mode == "analytic":
        fn = spec._order2_fn if order == 2 else spec._order1_fn
        vals, d1, d2 = _unpack(fn(*point), order)
    elif mode == "dual":
        with np.errstate(all="ignore"):
            vals, d1, d2 = _dual_derivatives(spec, point, order)
    elif mode == "fd":
        vals, d1, d2 = _fd_derivatives(spec, point, order)
    else:
        raise ValueError(f"unknown derivative mode {mode!r}; expected one of {MODES}")
    if not (np.all(np.isfinite(vals)) and np.all(np.isfinite(d1))
            and (d2 is None or np.all(np.isfinite(d2)))):
        raise EvalError(f"{spec.name}: non-finite field value or derivative at {[float(v) for v in point]}")
    return MetricSample(point, vals, d1, d2, mode)


# ---------------------------------------------------------------------------
# validation


@dataclass
class ProbeReport:
    point: list
    in_domain: bool
    phi_sq: float
    timelike: bool
    dphi_dx0: float
    x0_independent: bool
    h_eigenvalues: list
    h_positive: bool

    @property
    def ok(self) -> bool:
        return self.in_domain and self.timelike and self.x0_independent and self.h_positive


@dataclass
class Diagnostics:
    spec_name: str
    probes: list

    @property
    def ok(self) -> bool:
        return all(p.ok for p in self.probes)

    def failures(self) -> list:
        out = []
        for p in self.probes:
            for flag, label in ((p.in_domain, "guard"), (p.timelike, "timelike"),
                                (p.x0_independent, "x0-dependence"), (p.h_positive, "h-definite")):
                if not flag:
                    out.append((p.point, label))
        return out


def validate_spec(spec: MetricSpec, probe_points, tol: float = 1e-12) -> Diagnostics:
    """Check the standing assumptions of the threading at each probe point.

    Never raises: every failure is recorded in the returned diagnostics.
    """
    probes = []
    for pt in probe_points:
        pt = np.asarray(pt, dtype=float)
        inside = spec.in_domain(pt)
        try:
            s = eval_sample(spec, pt, order=1, check_domain=False)
        except EvalError:
            probes.append(ProbeReport(pt.tolist(), inside, math.nan, False, math.nan, False, [], False))
            continue
        phi2 = s.phi_sq
        d0 = float(s.phi_sq_d1[0])
        scale = max(1.0, abs(phi2), float(np.max(np.abs(s.phi_sq_d1))))
        eig: list = []
        pos = False
        if phi2 != 0.0:
            h = s.g + np.outer(s.xi, s.xi) / phi2
            eig = np.linalg.eigvalsh(0.5 * (h + h.T)).tolist()
            pos = min(eig) > 0.0
        probes.append(ProbeReport(pt.tolist(), inside, phi2, phi2 > 0.0, d0,
                                  abs(d0) <= tol * scale, eig, pos))
    return Diagnostics(spec.name, probes)


# ---------------------------------------------------------------------------
# spec files


def spec_to_dict(spec: MetricSpec) -> dict:
    g = spec.g
    return {
        "name": spec.name,
        "params": dict(spec.params),
        "components": {
            "phi_sq": ex.to_sexpr(spec.phi_sq),
            "xi": [ex.to_sexpr(x) for x in spec.xi],
            "g": [[ex.to_sexpr(g[i][j]) for j in range(3)] for i in range(3)],
        },
        "guards": [ex.to_sexpr(x) for x in spec.guards],
        "stationary": spec.stationary,
    }


def spec_from_dict(data: Mapping) -> MetricSpec:
    """Build a spec from its file representation.

    A bare ``{"name": ..., "params": ...}`` resolves through the catalog;
    otherwise ``components`` must be present. Optional ``defs`` name
    auxiliary expressions that other strings may reference.
    """
    params = dict(data.get("params", {}))
    comps = data.get("components")
    if comps is None:
        if "name" not in data:
            raise ParseError("spec file needs 'name' or 'components'")
        from .catalog import catalog_lookup

        return catalog_lookup(data["name"], **params)
    defs: dict[str, Expr] = {}
    for key, text in dict(data.get("defs", {})).items():
        defs[key] = ex.parse_sexpr(text, defs)
    p = lambda s: ex.coerce(s, defs)  # noqa: E731
    g = comps["g"]
    if isinstance(g, Mapping):
        g = [g[k] for k in ("g11", "g12", "g13", "g22", "g23", "g33")]
        g_exprs = [p(s) for s in g]
    elif len(g) == 6:
        g_exprs = [p(s) for s in g]
    else:
        g_exprs = [[p(s) for s in row] for row in g]
    return MetricSpec(
        name=data.get("name", "custom"),
        phi_sq=p(comps["phi_sq"]),
        xi=[p(s) for s in comps.get("xi", [0.0, 0.0, 0.0])],
        g=g_exprs,
        params=params,
        guards=[p(s) for s in data.get("guards", [])],
        stationary=bool(data.get("stationary", False)),
    )


def dumps_spec(spec: MetricSpec) -> str:
    return json.dumps(spec_to_dict(spec), indent=2)


def loads_spec(text: str) -> MetricSpec:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    return spec_from_dict(data)


def load_spec(path) -> MetricSpec:
    with open(path) as fh:
        return loads_spec(fh.read())


def save_spec(spec: MetricSpec, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_spec(spec) + "\n")
