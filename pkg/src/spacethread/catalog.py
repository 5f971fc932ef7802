"""Built-in metrics.

Kerr-class metrics use Boyer-Lindquist coordinates (x0, x1, x2, x3) =
(t, r, θ, φ). FLRW uses isotropic Cartesian coordinates with spatial
curvature ``k``::

    ds² = -dt² + a(t)² δ_ij dx^i dx^j / (1 + k |x|²/4)²

so that ``k = 0`` gives h_ij = a² δ_ij exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import expr as ex
from .errors import MissingParam, UnknownMetric
from .expr import X0, X1, X2, X3
from .metric import MetricSpec

POLE_EPS = 1e-8


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    required: tuple
    defaults: dict
    build: Callable[..., MetricSpec]
    box: Callable[..., list]
    summary: str


def _kerr_newman(name: str, m: float, a: float, e: float) -> MetricSpec:
    M, A, E = ex.param("m"), ex.param("a"), ex.param("e")
    r, th = X1, X2
    s2 = ex.sin(th) ** 2
    sigma = r ** 2 + A ** 2 * ex.cos(th) ** 2
    delta = r ** 2 + A ** 2 + E ** 2 - 2 * M * r
    num = delta - A ** 2 * s2
    phi_sq = num / sigma
    xi3 = (E ** 2 - 2 * M * r) * A * s2 / sigma
    g33 = ((r ** 2 + A ** 2) ** 2 - delta * A ** 2 * s2) / sigma * s2
    params = {"m": m, "a": a, "e": e}
    g = (sigma / delta, 0.0, 0.0, sigma, 0.0, g33)
    guards = (sigma, delta, num, s2 - POLE_EPS ** 2)
    return MetricSpec(name, phi_sq, (0.0, 0.0, xi3), g, params, guards, stationary=True)


def _kn_box(m, a, e):
    r_ergo = m + math.sqrt(max(m * m - e * e, 0.0))
    r_lo = 1.5 * r_ergo + 0.5 * m + abs(a)
    return [(-10.0, 10.0), (r_lo, max(20.0 * m, r_lo + 10.0)),
            (0.2, math.pi - 0.2), (0.0, 2.0 * math.pi)]


def kerr_newman(m: float, a: float, e: float) -> MetricSpec:
    return _kerr_newman("kerr_newman", m, a, e)


def kerr(m: float, a: float) -> MetricSpec:
    return _kerr_newman("kerr", m, a, 0.0)


def reissner_nordstrom(m: float, e: float) -> MetricSpec:
    return _kerr_newman("reissner_nordstrom", m, 0.0, e)


def schwarzschild(m: float) -> MetricSpec:
    return _kerr_newman("schwarzschild", m, 0.0, 0.0)


def minkowski() -> MetricSpec:
    return MetricSpec("minkowski", 1.0, (0.0, 0.0, 0.0), (1.0, 0.0, 0.0, 1.0, 0.0, 1.0),
                      {}, (), stationary=True)


def flrw(scale="(exp x0)", k: float = 0.0) -> MetricSpec:
    """Homogeneous isotropic universe with scale factor ``scale`` of x0.

    ``scale`` is an expression (or s-expression text) in x0 only.
    """
    a = ex.coerce(scale)
    if a.coords_used() - {0}:
        raise ValueError("the FLRW scale factor may depend on x0 only")
    K = ex.param("k")
    conf = 1 + K * (X1 ** 2 + X2 ** 2 + X3 ** 2) / 4
    gii = a ** 2 / conf ** 2
    params = {name: 0.0 for name in a.params_used()}
    params["k"] = k
    return MetricSpec("flrw", 1.0, (0.0, 0.0, 0.0), (gii, 0.0, 0.0, gii, 0.0, gii),
                      params, (a, conf), stationary=False)


def _flrw_box(scale="(exp x0)", k=0.0):
    return [(0.5, 2.0), (-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0)]


def _random_quadratic(rng, amp: float, base: float, first: int = 0) -> ex.Expr:
    xs = (X0, X1, X2, X3)
    out = ex.const(base + amp * rng.uniform(-1, 1))
    for a in range(first, 4):
        out = out + amp * rng.uniform(-1, 1) * xs[a]
        for b in range(a, 4):
            out = out + amp * rng.uniform(-1, 1) * xs[a] * xs[b]
    return out


def random_quadratic(seed: int = 0, amplitude: float = 0.05) -> MetricSpec:
    """A metric whose ten fields are random quadratics in all four coordinates.

    Near the origin it is a small perturbation of Minkowski space with
    nonzero expansion, vorticity and acceleration, which makes it a good
    generic test case. Φ² does not depend on x0, as the threading
    formalism requires. Use ``box = [(-1, 1)] * 4``.
    """
    rng = np.random.default_rng(seed)
    phi_sq = _random_quadratic(rng, amplitude, 1.0, first=1)
    xi = tuple(_random_quadratic(rng, amplitude, 0.0) for _ in range(3))
    g = []
    for i in range(3):
        for j in range(i, 3):
            g.append(_random_quadratic(rng, amplitude, 1.0 if i == j else 0.0))
    return MetricSpec(f"quadratic_{seed}", phi_sq, xi, tuple(g), {}, (phi_sq,), stationary=False)


CATALOG = {
    "kerr_newman": CatalogEntry("kerr_newman", ("m", "a", "e"), {}, kerr_newman, _kn_box,
                                "charged rotating black hole"),
    "kerr": CatalogEntry("kerr", ("m", "a"), {}, kerr,
                         lambda m, a: _kn_box(m, a, 0.0), "rotating black hole (e = 0)"),
    "reissner_nordstrom": CatalogEntry("reissner_nordstrom", ("m", "e"), {}, reissner_nordstrom,
                                       lambda m, e: _kn_box(m, 0.0, e), "charged static black hole (a = 0)"),
    "schwarzschild": CatalogEntry("schwarzschild", ("m",), {}, schwarzschild,
                                  lambda m: _kn_box(m, 0.0, 0.0), "static black hole (a = e = 0)"),
    "flrw": CatalogEntry("flrw", ("scale",), {"k": 0.0}, flrw, _flrw_box,
                         "FLRW universe with scale factor a(x0) and curvature k"),
    "minkowski": CatalogEntry("minkowski", (), {}, minkowski,
                              lambda: [(-5.0, 5.0)] * 4, "flat spacetime"),
}


def _resolve(name: str, params: dict):
    if name not in CATALOG:
        raise UnknownMetric(f"unknown metric {name!r}; choose from {sorted(CATALOG)}")
    entry = CATALOG[name]
    missing = [p for p in entry.required if p not in params]
    if missing:
        raise MissingParam(f"{name} needs parameter(s) {missing}")
    allowed = set(entry.required) | set(entry.defaults)
    extra = set(params) - allowed
    if extra:
        raise MissingParam(f"{name} does not take parameter(s) {sorted(extra)}")
    kw = dict(entry.defaults)
    kw.update(params)
    return entry, kw


def catalog_lookup(name: str, **params) -> MetricSpec:
    """Build a catalog metric, e.g. ``catalog_lookup("kerr", m=1, a=0.5)``."""
    entry, kw = _resolve(name, params)
    return entry.build(**kw)


def sample_box(name: str, **params) -> list:
    """Coordinate ranges of a comfortable region inside the metric's domain."""
    entry, kw = _resolve(name, params)
    return entry.box(**kw)


def sample_points(spec: MetricSpec, box, count: int, seed: int = 0) -> np.ndarray:
    """Uniform random points in ``box`` that satisfy the metric's guards."""
    rng = np.random.default_rng(seed)
    lo = np.array([b[0] for b in box])
    hi = np.array([b[1] for b in box])
    out = []
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > 1000 * max(count, 1):
            raise RuntimeError(f"could not find {count} domain points in box for {spec.name}")
        p = lo + (hi - lo) * rng.random(4)
        if spec.in_domain(p):
            out.append(p)
    return np.array(out).reshape(count, 4)
