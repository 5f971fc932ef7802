"""Geodesics written in the threading frame.

A curve's velocity is split as

    d/dλ = u⁰ ∂/∂x⁰ + v^i δ/δx^i,    u⁰ = δx⁰/δλ = dx⁰/dλ − Φ⁻² ξ_i dx^i/dλ,

and the geodesic equation becomes a system for (x^a, v^i, u⁰). For
stationary metrics (Θ_ij = 0, a_i = 0) the system is

    dv^k/dλ = −Γ*^k_ij v^i v^j − 2Φ² u⁰ ω_i^k v^i − (u⁰)² Φ² c^k
    du⁰/dλ  = −2 u⁰ c_i v^i

so K = Φ² u⁰ is conserved. For other metrics the full threading-frame
connection is used, with the expansion and the acceleration a_i.

The integrated state vector is ``(x⁰, x¹, x², x³, v¹, v², v³, u⁰, s*)``
where s* is the spatial arc length, ds*/dλ = (h_ij v^i v^j)^½.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, HypothesisViolated, SpatialGeodesic, StepFailure
from .frame import ThreadingGeometry
from .metric import MetricSpec, eval_sample
from .ode import integrate_ode
from . import oracle4d


BOUNDARY_PHI2 = 1e-6


@dataclass(frozen=True)
class LocalFrame:
    """First-order threading data at a point, as plain arrays."""

    phi2: float
    dphi2: np.ndarray  # ∂_a Φ²
    n: np.ndarray  # Φ⁻² ξ_i
    h: np.ndarray
    hinv: np.ndarray
    dh: np.ndarray  # dh[i, j, a] = ∂_a h_ij
    gamma: np.ndarray  # [k, i, j] = Γ*^k_ij
    gamma0: np.ndarray  # [k, i] = Γ*^k_{i0}
    omega_mixed: np.ndarray  # [i, k] = ω_i^k
    theta: np.ndarray
    a: np.ndarray
    c: np.ndarray


def local_frame(spec: MetricSpec, x, mode: str = "analytic") -> LocalFrame:
    sample = eval_sample(spec, x, mode=mode, order=1)
    geo = ThreadingGeometry(sample)
    return LocalFrame(
        phi2=float(geo.phi2.v), dphi2=geo.phi2.d1.copy(), n=geo.n.v, h=geo.h.v,
        hinv=geo.hinv.v, dh=np.moveaxis(geo.h.d1, 0, -1), gamma=geo.gamma.v,
        gamma0=geo.gamma0.v, omega_mixed=geo.omega_mixed.v, theta=geo.theta.v,
        a=geo.a.v, c=geo.c.v,
    )


def _accelerations(fr: LocalFrame, v: np.ndarray, u0: float, stationary: bool):
    """``(dv/dλ, du⁰/dλ)`` at a point."""
    p = fr.phi2
    dv = -np.einsum("kij,i,j->k", fr.gamma, v, v)
    if stationary:
        dv -= 2.0 * p * u0 * (fr.omega_mixed.T @ v)
        dv -= u0 * u0 * p * (fr.hinv @ fr.c)
        du0 = -2.0 * u0 * (fr.c @ v)
    else:
        b = fr.a + fr.c
        dv -= 2.0 * u0 * (fr.gamma0 @ v)
        dv -= u0 * u0 * p * (fr.hinv @ b)
        du0 = -u0 * ((2.0 * fr.c + fr.a) @ v) - (v @ fr.theta @ v) / p
    return dv, du0


def motion_rhs(spec: MetricSpec, y, fast: bool | None = None, mode: str = "analytic") -> np.ndarray:
    """Right-hand side for the state ``(x, v, u⁰, s*)``.

    ``fast`` selects the stationary form; by default it is used exactly
    when the metric spec is flagged stationary.
    """
    y = np.asarray(y, dtype=float)
    x, v, u0 = y[:4], y[4:7], y[7]
    fr = local_frame(spec, x, mode)
    stationary = spec.stationary if fast is None else fast
    dv, du0 = _accelerations(fr, v, u0, stationary)
    dx = np.empty(4)
    dx[0] = u0 + fr.n @ v
    dx[1:] = v
    ds = math.sqrt(max(float(v @ fr.h @ v), 0.0))
    return np.concatenate([dx, dv, [du0, ds]])


# ---------------------------------------------------------------------------
# states and trajectories


@dataclass(frozen=True)
class GeodesicState:
    lam: float
    x: np.ndarray
    dx: np.ndarray
    delta_x0: float
    s_star: float
    ds_star: float
    K: float

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.x, self.dx[1:], [self.delta_x0, self.s_star]])


def state_from_vector(spec: MetricSpec, lam: float, y) -> GeodesicState:
    y = np.asarray(y, dtype=float)
    x, v, u0 = y[:4], y[4:7], float(y[7])
    s = eval_sample(spec, x, order=1, check_domain=False)
    p = s.phi_sq
    n = s.xi / p
    h = s.g + np.outer(n, s.xi)
    dx = np.concatenate([[u0 + n @ v], v])
    return GeodesicState(lam, x.copy(), dx, u0, float(y[8]),
                         math.sqrt(max(float(v @ h @ v), 0.0)), p * u0)


def initial_state(spec: MetricSpec, x, dx=None, v=None, K=None, normalize: bool = False,
                  lam: float = 0.0) -> GeodesicState:
    """Build an initial state from a coordinate velocity ``dx`` (4 entries)
    or from a spatial velocity ``v`` (3 entries) plus ``K = Φ² δx⁰/δλ``.

    With ``normalize`` the velocity is rescaled so that g(ẋ, ẋ) = −1.
    """
    x = np.asarray(x, dtype=float)
    spec.check_domain(x)
    s = eval_sample(spec, x, order=1)
    p = s.phi_sq
    n = s.xi / p
    if dx is not None:
        dx = np.asarray(dx, dtype=float)
        u0 = dx[0] - n @ dx[1:]
        vel = dx[1:]
    else:
        if v is None or K is None:
            raise ValueError("give either dx, or v together with K")
        vel = np.asarray(v, dtype=float)
        u0 = K / p
    if normalize:
        h = s.g + np.outer(n, s.xi)
        norm = -p * u0 * u0 + vel @ h @ vel
        if norm >= 0.0:
            raise ValueError("velocity is not timelike; cannot normalize")
        scale = 1.0 / math.sqrt(-norm)
        vel, u0 = vel * scale, u0 * scale
    y = np.concatenate([x, vel, [u0, 0.0]])
    return state_from_vector(spec, lam, y)


@dataclass
class Trajectory:
    spec: MetricSpec
    lam: np.ndarray
    y: np.ndarray
    status: str
    boundary_point: np.ndarray | None = None
    k_drift: np.ndarray = field(default=None)
    norm_drift: np.ndarray = field(default=None)

    def states(self):
        for lam, y in zip(self.lam, self.y):
            yield state_from_vector(self.spec, lam, y)

    @property
    def spatial(self) -> bool:
        return bool(abs(self.y[0, 7]) == 0.0)

    def summary(self) -> dict:
        out = {
            "metric": self.spec.name,
            "status": self.status,
            "lambda_start": float(self.lam[0]),
            "lambda_end": float(self.lam[-1]),
            "steps": int(len(self.lam) - 1),
            "K_initial": float(self.y[0, 7] * _phi2(self.spec, self.y[0, :4])),
            "K_drift_max": float(np.max(np.abs(self.k_drift))),
            "norm_drift_max": float(np.max(np.abs(self.norm_drift))),
            "spatial_geodesic": self.spatial,
            "delta_x0_max": float(np.max(np.abs(self.y[:, 7]))),
            "s_star_final": float(self.y[-1, 8]),
        }
        if self.boundary_point is not None:
            out["boundary_point"] = [float(c) for c in self.boundary_point]
        return out


def _phi2(spec, x) -> float:
    return float(spec.values(np.asarray(x, dtype=float))[0])


def _norm(spec: MetricSpec, y) -> float:
    x, v, u0 = y[:4], y[4:7], y[7]
    g4 = spec.g4(x)
    n = g4[0, 1:] / -g4[0, 0]
    dx = np.concatenate([[u0 + n @ v], v])
    return float(dx @ g4 @ dx)


def integrate(spec: MetricSpec, init: GeodesicState, lambda_end: float, tol: float = 1e-10,
              fast: bool | None = None, mode: str = "analytic",
              boundary_tol: float = 1e-10) -> Trajectory:
    """Integrate a geodesic from ``init`` to ``lambda_end``.

    Stops early with status ``"boundary"`` when the path reaches the edge
    of the metric's domain (for Kerr-class metrics, the surface Φ² = 0).
    K drift and drift of g(ẋ, ẋ) are recorded at every step.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")

    def f(lam, y):
        return motion_rhs(spec, y, fast=fast, mode=mode)

    try:
        sol = integrate_ode(f, init.lam, init.vector, lambda_end, tol=tol,
                            inside=lambda y: spec.in_domain(y[:4]), boundary_tol=boundary_tol)
    except StepFailure as exc:
        # near Φ² = 0 the split velocity u⁰ = K/Φ² diverges and the step
        # size collapses before the guard is crossed: that is the boundary
        sol = getattr(exc, "partial", None)
        if sol is None or _phi2(spec, sol.y[-1][:4]) > BOUNDARY_PHI2:
            raise
        sol.status = "boundary"
    ys = np.asarray(sol.y)
    lam = np.asarray(sol.t)
    phi2 = np.array([_phi2(spec, y[:4]) for y in ys])
    K = phi2 * ys[:, 7]
    norms = np.array([_norm(spec, y) for y in ys])
    bp = ys[-1, :4].copy() if sol.status == "boundary" else None
    return Trajectory(spec, lam, ys, sol.status, bp, K - K[0], norms - norms[0])


# ---------------------------------------------------------------------------
# 3D force


@dataclass(frozen=True)
class ForceSample:
    f_up: np.ndarray
    s_star: float
    orthogonality: float


def _arc_derivatives(spec: MetricSpec, y, fr: LocalFrame, fast):
    """``(ds*/dλ, d²s*/dλ², dv/dλ, dx/dλ)`` at a state."""
    x, v, u0 = y[:4], y[4:7], y[7]
    dv, _ = _accelerations(fr, v, u0, spec.stationary if fast is None else fast)
    dx = np.concatenate([[u0 + fr.n @ v], v])
    s1 = math.sqrt(max(float(v @ fr.h @ v), 0.0))
    hdot = np.einsum("ija,a->ij", fr.dh, dx)
    s2 = (float(v @ hdot @ v) + 2.0 * float(v @ fr.h @ dv)) / (2.0 * s1) if s1 > 0 else 0.0
    return s1, s2, dv, dx


def force3(spec: MetricSpec, state, mode: str = "analytic") -> ForceSample:
    """The 3D force F^k = ∇*_{d/ds*} U at a point of a non-spatial geodesic,
    written with the affine parameter and the first integral K."""
    if not spec.stationary:
        raise HypothesisViolated("the 3D force is defined for stationary metrics (Θ = 0, a = 0)")
    y = state.vector if isinstance(state, GeodesicState) else np.asarray(state, dtype=float)
    fr = local_frame(spec, y[:4], mode)
    v, u0 = y[4:7], y[7]
    s1, s2, _, _ = _arc_derivatives(spec, y, fr, True)
    if s1 == 0.0:
        raise SpatialGeodesic("ds*/dλ = 0: the 3D velocity vanishes")
    K = fr.phi2 * u0
    F = -(K * (fr.omega_mixed.T @ v) + K * K / fr.phi2 * (fr.hinv @ fr.c) + (s2 / s1) * v) / s1 ** 2
    orth = float(F @ fr.h @ v)
    return ForceSample(F, float(y[8]), orth)


def force3_direct(spec: MetricSpec, state, mode: str = "analytic") -> np.ndarray:
    """The same force from the actual acceleration of the curve, before the
    equations of motion are substituted."""
    y = state.vector if isinstance(state, GeodesicState) else np.asarray(state, dtype=float)
    fr = local_frame(spec, y[:4], mode)
    v, u0 = y[4:7], y[7]
    s1, s2, dv, _ = _arc_derivatives(spec, y, fr, True)
    K = fr.phi2 * u0
    acc = dv + np.einsum("kij,i,j->k", fr.gamma, v, v) + K * (fr.omega_mixed.T @ v)
    return (acc - (s2 / s1) * v) / s1 ** 2


def force_identity_terms(spec: MetricSpec, y, K: float | None = None, mode: str = "analytic"):
    """``(K² Φ⁻³ dΦ/dλ, ds*/dλ · d²s*/dλ²)`` at a state; they sum to zero
    along a geodesic of a stationary metric."""
    y = np.asarray(y, dtype=float)
    fr = local_frame(spec, y[:4], mode)
    s1, s2, _, dx = _arc_derivatives(spec, y, fr, True)
    if K is None:
        K = fr.phi2 * y[7]
    # dΦ/dλ = ½ Φ⁻¹ dΦ²/dλ
    dphi = 0.5 * float(fr.dphi2 @ dx) / math.sqrt(fr.phi2)
    return K * K * dphi / fr.phi2 ** 1.5, s1 * s2


def force_identity_residual(spec: MetricSpec, trajectory: Trajectory, mode: str = "analytic") -> float:
    """Max over the trajectory of |K² Φ⁻³ dΦ/dλ + (ds*/dλ)(d²s*/dλ²)|, with
    K fixed at its initial value."""
    K0 = float(_phi2(spec, trajectory.y[0, :4]) * trajectory.y[0, 7])
    worst = 0.0
    for y in trajectory.y:
        a, b = force_identity_terms(spec, y, K0, mode)
        worst = max(worst, abs(a + b))
    return worst


# ---------------------------------------------------------------------------
# comparison with the coordinate geodesic equation


def coordinate_rhs(spec: MetricSpec, y) -> np.ndarray:
    """The threading right-hand side converted to coordinate accelerations
    ``(ẋ, ẍ)``, for comparison with the 4D geodesic equation."""
    y = np.asarray(y, dtype=float)
    dy = motion_rhs(spec, y)
    x, v = y[:4], y[4:7]
    s = eval_sample(spec, x, order=1)
    n = s.xi / s.phi_sq
    dn = (s.xi_d1 * s.phi_sq - np.outer(s.xi, s.phi_sq_d1)) / s.phi_sq ** 2
    dx = dy[:4]
    # x⁰'' = u⁰' + (dn/dλ)·v + n·v'
    x0dd = dy[7] + (dn @ dx) @ v + n @ dy[4:7]
    return np.concatenate([dx, [x0dd], dy[4:7]])


def integrate_coordinate(spec: MetricSpec, x, dx, lambda_end: float, tol: float = 1e-10):
    """Integrate the coordinate geodesic equation (oracle path)."""
    y0 = np.concatenate([np.asarray(x, float), np.asarray(dx, float)])
    return integrate_ode(lambda lam, y: oracle4d.geodesic_rhs4(spec, y), 0.0, y0, lambda_end,
                         tol=tol, inside=lambda y: spec.in_domain(y[:4]))


# ---------------------------------------------------------------------------
# integral curves of ξ that are geodesics


def _kerr_params(spec: MetricSpec):
    try:
        return float(spec.params["m"]), float(spec.params["a"]), float(spec.params["e"])
    except KeyError:
        raise HypothesisViolated(f"{spec.name} is not a Kerr-class metric") from None


def geodesic_locus_check(spec: MetricSpec, tol: float = 1e-9) -> list:
    """Places where the curves x^i = const are geodesics, i.e. b_i = 0.

    For a Kerr-class metric with parameters (m, a, e), b_2 = 0 needs a = 0,
    x² = π/2 or x² ∈ {0, π}, and b_1 = 0 needs
    m r² − e² r − m a² cos²x² = 0. Each candidate root is verified by
    evaluating b_i and flagged with whether it lies in the metric's domain.
    """
    m, a, e = _kerr_params(spec)
    loci = []

    def roots(cos2):
        rs = np.roots([m, -e * e, -m * a * a * cos2]) if m != 0 else np.array([])
        return sorted(float(r.real) for r in rs if abs(r.imag) < 1e-14 and abs(r.real) > tol)

    if a == 0.0:
        for r in roots(0.0):
            loci.append(_locus(spec, "hypersurface", r, None))
        return loci
    for r in roots(0.0):
        loci.append(_locus(spec, "equatorial", r, math.pi / 2))
    for theta in (0.0, math.pi):
        for r in roots(1.0):
            loci.append(_locus(spec, "axis", r, theta))
    return loci


def _locus(spec, kind, r, theta):
    th = math.pi / 3 if theta is None else theta
    p = np.array([0.0, r, th, 0.0])
    inside = spec.in_domain(p)
    resid = None
    try:
        s = eval_sample(spec, p, order=1, check_domain=False)
        resid = float(np.max(np.abs(0.5 * s.phi_sq_d1[1:] / s.phi_sq)))
    except Exception:  # poles make the frame singular
        pass
    return {"kind": kind, "r": r, "theta": theta, "in_domain": bool(inside), "b_residual": resid}


# ---------------------------------------------------------------------------
# output


CSV_COLUMNS = ["lambda", "x0", "x1", "x2", "x3", "dx0", "dx1", "dx2", "dx3",
               "delta_x0", "K", "s_star", "ds_star"]


def trajectory_rows(traj: Trajectory, with_force: bool = False):
    for st in traj.states():
        row = [st.lam, *st.x, *st.dx, st.delta_x0, st.K, st.s_star, st.ds_star]
        if with_force:
            try:
                row += list(force3(traj.spec, st).f_up)
            except (SpatialGeodesic, HypothesisViolated, DomainError):
                row += [math.nan] * 3
        yield row


def trajectory_csv(traj: Trajectory, with_force: bool = False) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS + (["F1", "F2", "F3"] if with_force else []))
    for row in trajectory_rows(traj, with_force):
        w.writerow([repr(float(v)) for v in row])
    return buf.getvalue()


def trajectory_summary_json(traj: Trajectory, extra: dict | None = None) -> str:
    d = traj.summary()
    if extra:
        d.update(extra)
    return json.dumps(d, indent=2, sort_keys=True)
