"""Identity suite: every threading formula checked against the 4D oracle
and against its alternative forms, point by point.

Each check reports the largest residual over the sampled points and the
tolerance it must stay under. Residuals of tensor comparisons are scaled
by ``max(1, |reference|)`` so the check is relative for large components
and absolute near zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import oracle4d
from .connection import Curvature, levi_civita_table, skew_ricci_residual
from .frame import ThreadingGeometry, consistency_vorticity
from .metric import MetricSpec, eval_sample
from .raychaudhuri import kinematic_rates, raychaudhuri_residual

# name -> (tolerance, description)
CHECKS = {
    "ricci_vs_oracle": (1e-7, "threading Ricci components vs projected 4D Ricci"),
    "riemann_vs_oracle": (1e-7, "threading Riemann components vs projected 4D Riemann"),
    "connection_vs_oracle": (1e-9, "threading Levi-Civita table vs 4D frame connection"),
    "ricci_contraction": (1e-9, "Ricci by contraction of the curvature components"),
    "vorticity_forms": (1e-10, "vorticity from A vs vorticity from xi"),
    "vorticity_antisymmetric": (0.0, "omega_ij + omega_ji"),
    "shear_trace": (1e-12, "h^ij sigma_ij"),
    "metricity": (1e-10, "spatial and time covariant derivatives of h_ij and h^ij"),
    "skew_ricci": (1e-9, "antisymmetric part of the contracted spatial curvature"),
    "raychaudhuri_kinematic": (1e-7, "expansion rate, kinematic form"),
    "raychaudhuri_curvature": (1e-7, "expansion rate, curvature form"),
    "time_derivative_forms": (1e-7, "time derivatives of omega, Theta and sigma, all forms"),
    "weyl_electric": (1e-9, "electric Weyl tensor, both expressions"),
    "static_shortcut": (1e-8, "curvature with vorticity dropped, when omega = 0"),
    "stationary_shortcut": (1e-8, "curvature with Theta = a = 0, stationary metrics"),
    "vacuum_ricci": (1e-8, "Ricci components vanish (vacuum metrics)"),
}

_WEYL = ("expansion_weyl_form", "shear_weyl_form", "expansion_riemann_vs_weyl",
         "shear_riemann_vs_weyl")


@dataclass
class CheckResult:
    name: str
    residual: float
    tol: float
    points: int

    @property
    def passed(self) -> bool:
        return self.residual <= self.tol

    @property
    def description(self) -> str:
        return CHECKS[self.name][1]


@dataclass
class VerifyReport:
    metric: str
    points: np.ndarray
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def table(self) -> str:
        lines = [f"{'identity':26s} {'max residual':>13s} {'tolerance':>10s}  result"]
        for c in self.checks:
            lines.append(f"{c.name:26s} {c.residual:13.3e} {c.tol:10.1e}  "
                         f"{'PASS' if c.passed else 'FAIL'}")
        lines.append(f"{self.metric}: {'PASS' if self.passed else 'FAIL'} "
                     f"({len(self.points)} points)")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "metric": self.metric,
            "passed": self.passed,
            "points": [[float(v) for v in p] for p in self.points],
            "checks": [{"name": c.name, "description": c.description,
                        "max_residual": c.residual, "tolerance": c.tol,
                        "passed": c.passed} for c in self.checks],
        }


def is_vacuum(spec: MetricSpec) -> bool:
    """True for catalog metrics known to solve the vacuum equations."""
    if spec.name in ("kerr", "schwarzschild", "minkowski"):
        return True
    return spec.name in ("kerr_newman", "reissner_nordstrom") and spec.params.get("e") == 0.0


def _rel(a, ref) -> float:
    a, ref = np.asarray(a, dtype=float), np.asarray(ref, dtype=float)
    return float(np.max(np.abs(a - ref)) / max(1.0, float(np.max(np.abs(ref)))))


def _compare(forms: dict, cv: Curvature) -> float:
    general = {"r_ssss": cv.r_ssss, "r_s0ss": cv.r_s0ss, "r_s0s0": cv.r_s0s0,
               "ricci_ss": cv.ricci_ss, "ricci_s0": cv.ricci_s0, "ricci_00": cv.ricci_00}
    return max(_rel(forms[k], general[k]) for k in general)


def point_residuals(spec: MetricSpec, point, mode: str = "analytic",
                    vacuum: bool | None = None) -> dict:
    """Residual of every applicable check at one point."""
    sample = eval_sample(spec, point, mode=mode, order=2)
    geo = ThreadingGeometry(sample)
    cv = Curvature(geo)
    out = {}

    orc = oracle4d.project_ricci(sample)
    out["ricci_vs_oracle"] = max(_rel(cv.ricci_ss, orc["ricci_ss"]),
                                 _rel(cv.ricci_s0, orc["ricci_s0"]),
                                 _rel(cv.ricci_00, orc["ricci_00"]))
    Rf = oracle4d.project_riemann(sample)
    out["riemann_vs_oracle"] = max(_rel(cv.r_ssss, Rf[1:, 1:, 1:, 1:]),
                                   _rel(cv.r_s0ss, Rf[1:, 0, 1:, 1:]),
                                   _rel(cv.r_s0s0_full, Rf[1:, 0, 1:, 0]))
    out["connection_vs_oracle"] = _rel(levi_civita_table(sample),
                                       oracle4d.frame_connection(sample))
    byc = cv.ricci_by_contraction()
    out["ricci_contraction"] = max(_rel(byc["ricci_ss"], cv.ricci_ss),
                                   _rel(byc["ricci_s0"], cv.ricci_s0),
                                   _rel(byc["ricci_00"], cv.ricci_00))

    w = geo.omega.v
    out["vorticity_forms"] = consistency_vorticity(sample)
    out["vorticity_antisymmetric"] = float(np.max(np.abs(w + w.T)))
    out["shear_trace"] = abs(float(np.sum(geo.hinv.v * geo.sigma.v)))
    met = [geo.cov_spatial(geo.h, "ll").v, geo.cov_spatial(geo.hinv, "uu").v,
           geo.cov_time(geo.h, "ll").v, geo.cov_time(geo.hinv, "uu").v]
    out["metricity"] = max(float(np.max(np.abs(m))) for m in met)
    out["skew_ricci"] = skew_ricci_residual(sample)

    ray = raychaudhuri_residual(sample, source="oracle")
    scale = max(1.0, abs(ray.theta_dot))
    out["raychaudhuri_kinematic"] = ray.residual_kinematic / scale
    out["raychaudhuri_curvature"] = ray.residual_curvature / scale
    rates = kinematic_rates(sample)["residuals"]
    out["time_derivative_forms"] = max(v for k, v in rates.items() if k not in _WEYL)
    out["weyl_electric"] = max(rates[k] for k in _WEYL)

    if float(np.max(np.abs(w))) == 0.0:
        out["static_shortcut"] = _compare(cv.static_forms(), cv)
    if spec.stationary:
        out["stationary_shortcut"] = _compare(cv.stationary_forms(), cv)
    if vacuum if vacuum is not None else is_vacuum(spec):
        out["vacuum_ricci"] = float(max(np.max(np.abs(cv.ricci_ss)),
                                        np.max(np.abs(cv.ricci_s0)), abs(cv.ricci_00)))
    return out


def verify_metric(spec: MetricSpec, points, mode: str = "analytic",
                  vacuum: bool | None = None) -> VerifyReport:
    """Run the identity suite at every point and keep the worst residuals."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    worst: dict = {}
    counts: dict = {}
    for p in points:
        for name, r in point_residuals(spec, p, mode, vacuum).items():
            worst[name] = max(worst.get(name, 0.0), float(r))
            counts[name] = counts.get(name, 0) + 1
    checks = [CheckResult(name, worst[name], CHECKS[name][0], counts[name])
              for name in CHECKS if name in worst]
    return VerifyReport(spec.name, points, checks)
