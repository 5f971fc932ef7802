"""Spatial connection, covariant derivatives and curvature in the threading frame.

Index layout for returned arrays: spatial indices run over 0..2 for the
coordinates x¹..x³, row-major, so ``r_star[i, j, k, h]`` is R*_ijkh and
``gamma_space[k, i, j]`` is Γ*^k_ij.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import jets
from .frame import ThreadingGeometry, geometry
from .metric import eval_sample


@dataclass(frozen=True)
class SpatialConnection:
    gamma_space: np.ndarray  # [k, i, j] = Γ*^k_ij
    gamma_time: np.ndarray  # [k, i] = Γ*^k_{i0}


@dataclass(frozen=True)
class CurvatureBundle:
    r_star: np.ndarray
    r_ssss: np.ndarray
    r_s0ss: np.ndarray
    r_s0s0: np.ndarray
    ricci_ss: np.ndarray
    ricci_s0: np.ndarray
    ricci_00: float
    ricci_star: np.ndarray
    scalar_r: float
    scalar_r_star: float
    weyl_e: np.ndarray
    r_tilde_s0s0: np.ndarray
    ricci_tilde: np.ndarray

    def to_dict(self) -> dict:
        return {k: (v.tolist() if isinstance(v, np.ndarray) else float(v))
                for k, v in self.__dict__.items()}


def _geo(spec_or_sample, point=None, mode="analytic") -> ThreadingGeometry:
    return geometry(spec_or_sample, point, mode=mode, order=2)


def _sym(x: np.ndarray) -> np.ndarray:
    return 0.5 * (x + x.T)


class Curvature:
    """Covariant derivatives of the kinematic fields and the curvature
    built from them, at one point. All attributes are plain arrays."""

    def __init__(self, geo: ThreadingGeometry):
        if geo.sample.order < 2:
            raise ValueError("curvature needs second derivatives of the metric")
        self.geo = geo
        self.phi2 = float(geo.phi2.v)
        self.h = geo.h.v
        self.hinv = geo.hinv.v
        self.omega = geo.omega.v
        self.theta = geo.theta.v
        self.theta_scalar = float(geo.theta_scalar.v)
        self.sigma = geo.sigma.v
        self.b = geo.b.v
        self.c = geo.c.v
        self.G = geo.gamma.v
        self.G0 = geo.gamma0.v

    # -- first covariant derivatives of kinematic fields -----------------
    @cached_property
    def db(self) -> np.ndarray:
        """``db[i, k] = b_{i|k}``."""
        return self.geo.cov_spatial(self.geo.b, "l").v

    @cached_property
    def dc(self) -> np.ndarray:
        return self.geo.cov_spatial(self.geo.c, "l").v

    @cached_property
    def dtheta(self) -> np.ndarray:
        """``dtheta[i, h, k] = Θ_{ih|k}``."""
        return self.geo.cov_spatial(self.geo.theta, "ll").v

    @cached_property
    def domega(self) -> np.ndarray:
        """``domega[i, h, k] = ω_{ih|k}``."""
        return self.geo.cov_spatial(self.geo.omega, "ll").v

    @cached_property
    def theta_dot(self) -> np.ndarray:
        """Θ_{ik|0}."""
        return _sym(self.geo.cov_time(self.geo.theta, "ll").v)

    @cached_property
    def omega_dot(self) -> np.ndarray:
        """ω_{ik|0}."""
        return self.geo.cov_time(self.geo.omega, "ll").v

    @cached_property
    def sigma_dot(self) -> np.ndarray:
        """σ_{ik|0}."""
        return _sym(self.geo.cov_time(self.geo.sigma, "ll").v)

    @cached_property
    def theta_scalar_dot(self) -> float:
        """Θ_{|0} = ∂Θ/∂x⁰."""
        return float(self.geo.d0(self.geo.theta_scalar).v)

    @cached_property
    def grad_theta(self) -> np.ndarray:
        """Θ_{|i}."""
        return self.geo.delta(self.geo.theta_scalar).v

    @cached_property
    def div_theta(self) -> np.ndarray:
        """Θ^k_{i|k}, the divergence of the mixed tensor Θ_i^k."""
        d = self.geo.cov_spatial(self.geo.theta_mixed, "lu").v
        return np.einsum("ikk->i", d)

    @cached_property
    def div_omega(self) -> np.ndarray:
        """ω^k_{i|k}, the divergence of the mixed tensor ω_i^k."""
        d = self.geo.cov_spatial(self.geo.omega_mixed, "lu").v
        return np.einsum("ikk->i", d)

    @cached_property
    def div_b(self) -> float:
        """b^k_{|k}."""
        geo = self.geo
        b_up = jets.einsum("kl,l->k", geo.hinv, geo.b)
        return float(np.trace(geo.cov_spatial(b_up, "u").v))

    @cached_property
    def div_c(self) -> float:
        geo = self.geo
        c_up = jets.einsum("kl,l->k", geo.hinv, geo.c)
        return float(np.trace(geo.cov_spatial(c_up, "u").v))

    # -- scalars -----------------------------------------------------------
    @cached_property
    def omega_up(self) -> np.ndarray:
        return self.hinv @ self.omega @ self.hinv

    @cached_property
    def omega_sq(self) -> float:
        return float(np.sum(self.omega * self.omega_up))

    @cached_property
    def sigma_sq(self) -> float:
        return float(np.sum(self.sigma * (self.hinv @ self.sigma @ self.hinv)))

    @cached_property
    def b_sq(self) -> float:
        return float(self.b @ self.hinv @ self.b)

    @cached_property
    def theta_theta(self) -> float:
        """Θ_kh Θ^kh."""
        return float(np.sum(self.theta * (self.hinv @ self.theta @ self.hinv)))

    # -- curvature ---------------------------------------------------------
    @cached_property
    def r_star(self) -> np.ndarray:
        G, G0 = self.G, self.G0
        dG = self.geo.delta(self.geo.gamma).v  # dG[l, i, k, h] = δΓ*^l_ik/δx^h
        GG = np.einsum("nik,lnh->likh", G, G)
        X = (dG - dG.swapaxes(2, 3) + GG - GG.swapaxes(2, 3)
             - 2.0 * np.einsum("kh,li->likh", self.omega, G0))
        return np.einsum("jl,likh->ijkh", self.h, X)

    @cached_property
    def r_star_contracted(self) -> np.ndarray:
        """``R*^h_{i kh} = h^{jh} R*_ijkh`` (not symmetric in general)."""
        return np.einsum("jh,ijkh->ik", self.hinv, self.r_star)

    @cached_property
    def r_ssss(self) -> np.ndarray:
        w, T, p = self.omega, self.theta, self.phi2
        o = np.einsum

        def pair(A, B):
            # A_ik B_jh − A_ih B_jk
            return o("ik,jh->ijkh", A, B) - o("ih,jk->ijkh", A, B)

        return (self.r_star + pair(w, T) + pair(T, T) / p + p * pair(w, w) + pair(T, w))

    @cached_property
    def r_s0ss(self) -> np.ndarray:
        dT, dW, c, b, p = self.dtheta, self.domega, self.c, self.b, self.phi2
        T, w = self.theta, self.omega
        o = np.einsum
        # dT[i, h, k] = Θ_{ih|k}; result index order [i, k, h]
        theta_part = (o("ihk->ikh", dT) - dT + o("ik,h->ikh", T, c) - o("ih,k->ikh", T, c))
        omega_part = (o("ihk->ikh", dW) - dW + o("ih,k->ikh", w, c) - o("ik,h->ikh", w, c)
                      + 2.0 * o("kh,i->ikh", w, b))
        return theta_part + p * omega_part

    @cached_property
    def r_s0s0(self) -> np.ndarray:
        p, b, hinv = self.phi2, self.b, self.hinv
        w, T = self.omega, self.theta
        inner = np.outer(b, b) + _sym(self.db) - p * (w @ hinv @ w)
        return _sym(p * inner - self.theta_dot - T @ hinv @ T)

    @cached_property
    def r_s0s0_full(self) -> np.ndarray:
        """R_i0k0 from the unsymmetrized expression; its antisymmetric part
        vanishes exactly when the vorticity evolution identity holds."""
        p, b, hinv = self.phi2, self.b, self.hinv
        w, T = self.omega, self.theta
        wT = w @ hinv @ T  # wT[k, i] = ω_kh Θ_i^h
        inner = (np.outer(b, b) + self.db + wT.T - wT - self.omega_dot
                 - p * (w @ hinv @ w))
        return p * inner - self.theta_dot - T @ hinv @ T

    @cached_property
    def ricci_ss(self) -> np.ndarray:
        p, b, hinv = self.phi2, self.b, self.hinv
        w, T, th = self.omega, self.theta, self.theta_scalar
        wT = w @ hinv @ T  # wT[k, i] = ω_kh Θ_i^h
        R = (self.r_star_contracted + (self.theta_dot + th * T) / p - np.outer(b, b)
             - _sym(self.db) + th * w + wT.T - wT)
        return _sym(R)

    @cached_property
    def ricci_s0(self) -> np.ndarray:
        p, th = self.phi2, self.theta_scalar
        Tm = self.geo.theta_mixed.v  # Tm[i, k] = Θ_i^k
        Wm = self.geo.omega_mixed.v
        return (self.div_theta - self.grad_theta + th * self.c - Tm @ self.c
                + p * (self.div_omega + Wm @ self.c + 2.0 * Wm @ self.b))

    @cached_property
    def ricci_00(self) -> float:
        p = self.phi2
        return float(p * (self.b_sq + self.div_b + p * self.omega_sq)
                     - self.theta_scalar_dot - self.theta_theta)

    @cached_property
    def ricci_star(self) -> np.ndarray:
        return _sym(self.r_star_contracted)

    @cached_property
    def scalar_r(self) -> float:
        return float(np.sum(self.hinv * self.ricci_ss) - self.ricci_00 / self.phi2)

    @cached_property
    def scalar_r_star(self) -> float:
        return float(np.sum(self.hinv * self.ricci_star))

    @cached_property
    def r_tilde_s0s0(self) -> np.ndarray:
        return self.r_s0s0 - self.ricci_00 * self.h / 3.0

    @cached_property
    def ricci_tilde(self) -> np.ndarray:
        return self.ricci_ss - np.sum(self.hinv * self.ricci_ss) * self.h / 3.0

    @cached_property
    def weyl_e(self) -> np.ndarray:
        p = self.phi2
        E = self.r_s0s0 + 0.5 * (p * self.ricci_ss - (self.ricci_00 + self.scalar_r * p / 3.0) * self.h)
        return _sym(E)

    @cached_property
    def weyl_e_tilde(self) -> np.ndarray:
        """E_ik assembled from the trace-free parts."""
        return _sym(self.r_tilde_s0s0 + 0.5 * self.phi2 * self.ricci_tilde)

    def bundle(self) -> CurvatureBundle:
        return CurvatureBundle(
            r_star=self.r_star, r_ssss=self.r_ssss, r_s0ss=self.r_s0ss, r_s0s0=self.r_s0s0,
            ricci_ss=self.ricci_ss, ricci_s0=self.ricci_s0, ricci_00=self.ricci_00,
            ricci_star=self.ricci_star, scalar_r=self.scalar_r,
            scalar_r_star=self.scalar_r_star, weyl_e=self.weyl_e,
            r_tilde_s0s0=self.r_tilde_s0s0, ricci_tilde=self.ricci_tilde,
        )

    # -- contraction of the curvature components --------------------------
    def ricci_by_contraction(self) -> dict:
        """Ricci components from traces of R_ijkh, R_i0kh and R_i0k0."""
        hinv, p = self.hinv, self.phi2
        R_ik = np.einsum("jh,ijkh->ik", hinv, self.r_ssss) - self.r_s0s0 / p
        R_i0 = np.einsum("jh,jhi->i", hinv, self.r_s0ss)
        R_00 = float(np.sum(hinv * self.r_s0s0))
        return {"ricci_ss": R_ik, "ricci_s0": R_i0, "ricci_00": R_00}

    # -- specializations ---------------------------------------------------
    def static_forms(self) -> dict:
        """Curvature and Ricci components with the vorticity terms dropped.

        These agree with the general forms when ω vanishes identically.
        """
        p, b, hinv, T, th = self.phi2, self.b, self.hinv, self.theta, self.theta_scalar
        o = np.einsum
        dT, c = self.dtheta, self.c
        r_ssss = self.r_star + (o("ik,jh->ijkh", T, T) - o("ih,jk->ijkh", T, T)) / p
        r_s0ss = o("ihk->ikh", dT) - dT + o("ik,h->ikh", T, c) - o("ih,k->ikh", T, c)
        r_s0s0 = p * (np.outer(b, b) + _sym(self.db)) - self.theta_dot - T @ hinv @ T
        Tm = self.geo.theta_mixed.v
        ricci_ss = (self.r_star_contracted + (self.theta_dot + th * T) / p
                    - np.outer(b, b) - _sym(self.db))
        ricci_s0 = self.div_theta - self.grad_theta + th * c - Tm @ c
        ricci_00 = p * (self.b_sq + self.div_b) - self.theta_scalar_dot - self.theta_theta
        return {"r_ssss": r_ssss, "r_s0ss": r_s0ss, "r_s0s0": _sym(r_s0s0),
                "ricci_ss": _sym(ricci_ss), "ricci_s0": ricci_s0, "ricci_00": float(ricci_00)}

    def stationary_forms(self) -> dict:
        """Curvature and Ricci components for Θ = 0, a = 0 (so b = c)."""
        p, c, hinv, w = self.phi2, self.c, self.hinv, self.omega
        o = np.einsum
        Wm = self.geo.omega_mixed.v
        dW = self.domega
        r_ssss = self.r_star + p * (o("ik,jh->ijkh", w, w) - o("ih,jk->ijkh", w, w))
        r_s0ss = p * (o("ihk->ikh", dW) - dW + o("ih,k->ikh", w, c) - o("ik,h->ikh", w, c)
                      + 2.0 * o("kh,i->ikh", w, c))
        r_s0s0 = p * (np.outer(c, c) + _sym(self.dc) - p * (w @ hinv @ w))
        ricci_ss = self.ricci_star - np.outer(c, c) - _sym(self.dc)
        ricci_s0 = p * (self.div_omega + 3.0 * Wm @ c)
        ricci_00 = p * (float(c @ hinv @ c) + self.div_c + p * self.omega_sq)
        return {"r_ssss": r_ssss, "r_s0ss": r_s0ss, "r_s0s0": _sym(r_s0s0),
                "ricci_ss": ricci_ss, "ricci_s0": ricci_s0, "ricci_00": float(ricci_00)}


def curvature(spec_or_sample, point=None, mode: str = "analytic") -> Curvature:
    return Curvature(_geo(spec_or_sample, point, mode))


# ---------------------------------------------------------------------------
# public operations


def spatial_connection(spec_or_sample, point=None, mode: str = "analytic") -> SpatialConnection:
    geo = geometry(spec_or_sample, point, mode=mode, order=1)
    return SpatialConnection(geo.gamma.v.copy(), geo.gamma0.v.copy())


_BUILTIN_FIELDS = {
    "h": ("h", "ll"),
    "h_up": ("hinv", "uu"),
    "omega": ("omega", "ll"),
    "omega_mixed": ("omega_mixed", "lu"),
    "theta": ("theta", "ll"),
    "theta_mixed": ("theta_mixed", "lu"),
    "sigma": ("sigma", "ll"),
    "theta_scalar": ("theta_scalar", ""),
    "phi_sq": ("phi2", ""),
    "a": ("a", "l"),
    "b": ("b", "l"),
    "c": ("c", "l"),
}


def _fd_field_jet(fn, point: np.ndarray) -> jets.Jet:
    """First-order jet of a point function by central differences."""
    f0 = np.asarray(fn(point), dtype=float)
    d1 = np.empty((4,) + f0.shape)
    for a in range(4):
        h = np.finfo(float).eps ** (1.0 / 3.0) * max(1.0, abs(point[a]))
        e = np.zeros(4)
        e[a] = h
        d1[a] = (np.asarray(fn(point + e)) - np.asarray(fn(point - e))) / (2.0 * h)
    return jets.Jet(f0, d1)


def _field(field, geo: ThreadingGeometry, variance):
    if isinstance(field, str):
        if field not in _BUILTIN_FIELDS:
            raise KeyError(f"unknown field {field!r}; choose from {sorted(_BUILTIN_FIELDS)}")
        attr, var = _BUILTIN_FIELDS[field]
        return getattr(geo, attr), (var if variance is None else variance)
    if isinstance(field, jets.Jet):
        T = field
    else:
        T = _fd_field_jet(field, geo.sample.point)
    return T, ("l" * T.ndim if variance is None else variance)


def covariant_derivative_spatial(field, spec_or_sample, point=None, variance=None,
                                 mode: str = "analytic") -> np.ndarray:
    """T_{…|k} at ``point``; the derivative index is last.

    ``field`` is the name of a built-in field (``"h"``, ``"b"``, ``"omega"``,
    ...), a :class:`~spacethread.jets.Jet`, or a callable mapping a 4-point
    to an array (differentiated by central differences). ``variance`` is a
    string of 'u'/'l' per index; callables default to all lower.
    """
    geo = _geo(spec_or_sample, point, mode)
    T, var = _field(field, geo, variance)
    return geo.cov_spatial(T, var).v


def covariant_derivative_time(field, spec_or_sample, point=None, variance=None,
                              mode: str = "analytic") -> np.ndarray:
    """T_{…|0} at ``point``; same conventions as the spatial version."""
    geo = _geo(spec_or_sample, point, mode)
    T, var = _field(field, geo, variance)
    return geo.cov_time(T, var).v


def curvature_bundle(spec_or_sample, point=None, mode: str = "analytic") -> CurvatureBundle:
    return curvature(spec_or_sample, point, mode).bundle()


def skew_ricci_residual(spec_or_sample, point=None, mode: str = "analytic") -> float:
    """Largest deviation in the identity giving the antisymmetric part of
    R*^h_{i kh} in terms of ω and Θ."""
    cv = curvature(spec_or_sample, point, mode)
    Rc = cv.r_star_contracted
    lhs = 0.5 * (Rc - Rc.T)
    w, T, hinv = cv.omega, cv.theta, cv.hinv
    wT = w @ hinv @ T  # wT[k, i] = ω_kh Θ_i^h
    rhs = wT - wT.T - cv.theta_scalar * w
    return float(np.max(np.abs(lhs - rhs)))


def weyl_e_residual(spec_or_sample, point=None, mode: str = "analytic") -> float:
    """Difference between the two expressions for the electric Weyl tensor."""
    cv = curvature(spec_or_sample, point, mode)
    return float(np.max(np.abs(cv.weyl_e - cv.weyl_e_tilde)))


def evaluate_curvature(spec, point, mode: str = "analytic") -> Curvature:
    """Alias of :func:`curvature` taking an explicit spec and point."""
    return Curvature(ThreadingGeometry(eval_sample(spec, point, mode=mode, order=2)))


def levi_civita_table(spec_or_sample, point=None, mode: str = "analytic") -> np.ndarray:
    """Levi-Civita connection of g in the threading frame, assembled from
    the spatial kinematic quantities.

    ``C[A, B, C]`` is the e_A component of ∇_{e_C} e_B with e_0 = ∂/∂x⁰,
    e_i = δ/δx^i; same layout as :func:`spacethread.oracle4d.frame_connection`.
    """
    geo = geometry(spec_or_sample, point, mode=mode, order=1)
    p = float(geo.phi2.v)
    w, T, b, c = geo.omega.v, geo.theta.v, geo.b.v, geo.c.v
    G0 = geo.gamma0.v
    C = np.zeros((4, 4, 4))
    C[1:, 1:, 1:] = geo.gamma.v
    C[0, 1:, 1:] = w + T / p
    C[1:, 1:, 0] = G0
    C[1:, 0, 1:] = G0
    C[0, 1:, 0] = b
    C[0, 0, 1:] = c
    C[1:, 0, 0] = p * geo.hinv.v @ b
    return C
