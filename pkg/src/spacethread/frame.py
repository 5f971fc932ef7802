"""Threading frame quantities at a point.

The threading of spacetime by the integral curves of ξ = ∂/∂x⁰ splits
tangent vectors into a time part along ∂/∂x⁰ and a spatial part along the
adapted frame

    δ/δx^i = ∂/∂x^i + Φ⁻² ξ_i ∂/∂x⁰ .

Every quantity here is built as a :class:`~spacethread.jets.Jet`, so that
the derivatives needed by the curvature formulas come out of the same
code path as the values.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import jets
from .errors import SingularMetric
from .metric import MetricSample, MetricSpec, eval_sample


def _sym(j: jets.Jet) -> jets.Jet:
    return (j + j.T) * 0.5


def _antisym(j: jets.Jet) -> jets.Jet:
    return (j - j.T) * 0.5


class ThreadingGeometry:
    """Lazily computed threading quantities at one sample.

    Attributes that are jets carry derivatives up to ``sample.order``
    minus the number of derivatives already spent building them: metric
    fields have the sample order, kinematic tensors one less, connection
    coefficients one less again.
    """

    def __init__(self, sample: MetricSample):
        self.sample = sample
        phi2, xi, g = sample.field_jets()
        if phi2.v <= 0.0:
            raise SingularMetric(f"Φ² = {float(phi2.v):.6g} is not positive; ∂/∂x⁰ is not timelike")
        self.phi2 = phi2
        self.inv_phi2 = jets.reciprocal(phi2)
        self.xi = xi
        self.g = g
        # δ/δx^i = ∂_i + n_i ∂_0
        self.n = xi * self.inv_phi2
        self.A = -self.n
        self.h = _sym(g + jets.outer(self.n, xi))
        try:
            np.linalg.cholesky(self.h.v)
        except np.linalg.LinAlgError:
            raise SingularMetric(
                f"spatial metric is not positive definite (eigenvalues {np.linalg.eigvalsh(self.h.v)})"
            ) from None
        self.hinv = _sym(jets.inv(self.h))

    # -- derivative operators ------------------------------------------
    def delta(self, T: jets.Jet) -> jets.Jet:
        """Spatial frame derivative; the new index ``k`` of δT/δx^k is last."""
        D = T.diff()
        return D[..., 1:] + D[..., 0:1] * self.n

    def d0(self, T: jets.Jet) -> jets.Jet:
        return T.diff()[..., 0]

    # -- kinematics ------------------------------------------------------
    @cached_property
    def c(self) -> jets.Jet:
        return self.phi2.diff()[1:] * self.inv_phi2 * 0.5

    @cached_property
    def a(self) -> jets.Jet:
        return self.d0(self.xi) * self.inv_phi2

    @cached_property
    def b(self) -> jets.Jet:
        return self.a + self.c

    @cached_property
    def omega(self) -> jets.Jet:
        # dA[j, i] = δA_j/δx^i
        dA = self.delta(self.A)
        return _antisym(dA.T)

    @cached_property
    def theta(self) -> jets.Jet:
        return _sym(self.d0(self.h) * 0.5)

    @cached_property
    def theta_scalar(self) -> jets.Jet:
        return jets.einsum("ij,ij->", self.hinv, self.theta)

    @cached_property
    def sigma(self) -> jets.Jet:
        return _sym(self.theta - self.h * (self.theta_scalar * (1.0 / 3.0)))

    @cached_property
    def omega_mixed(self) -> jets.Jet:
        """``W[i, k] = ω_i^k = h^{kl} ω_{li}``."""
        return jets.einsum("kl,li->ik", self.hinv, self.omega)

    @cached_property
    def theta_mixed(self) -> jets.Jet:
        """``M[i, k] = Θ_i^k = h^{kl} Θ_{li}``."""
        return jets.einsum("kl,li->ik", self.hinv, self.theta)

    # -- connection ------------------------------------------------------
    @cached_property
    def gamma(self) -> jets.Jet:
        """``G[k, i, j] = Γ*^k_ij``, symmetric in the last two indices."""
        dh = self.delta(self.h)  # dh[i, j, k] = δh_ij/δx^k
        # t[l, i, j] = δ_i h_lj + δ_j h_li - δ_l h_ij
        t = dh.swap(-1, -2) + dh - dh.moveaxis(-1, -3)
        G = jets.einsum("kl,lij->kij", self.hinv, t) * 0.5
        return (G + G.swap(-1, -2)) * 0.5

    @cached_property
    def gamma0(self) -> jets.Jet:
        """``G0[k, i] = Γ*^k_{i0} = Θ_i^k + Φ² ω_i^k``."""
        return (self.theta_mixed + self.omega_mixed * self.phi2).T

    # -- covariant derivatives ---------------------------------------------
    def cov_spatial(self, T: jets.Jet, variance: str = "") -> jets.Jet:
        """``T_{…|k}``: the new index is last. ``variance`` has one 'u' or
        'l' per tensor index (upper / lower)."""
        _check_variance(T, variance)
        out = self.delta(T)
        G = self.gamma
        letters = "abcdef"[: len(variance)]
        for p, kind in enumerate(variance):
            L = letters[p]
            src = letters[:p] + "z" + letters[p + 1:]
            if kind == "u":
                out = out + jets.einsum(f"{src},{L}zk->{letters}k", T, G)
            else:
                out = out - jets.einsum(f"{src},z{L}k->{letters}k", T, G)
        return out

    def cov_time(self, T: jets.Jet, variance: str = "") -> jets.Jet:
        """``T_{…|0}``."""
        _check_variance(T, variance)
        out = self.d0(T)
        G0 = self.gamma0
        letters = "abcdef"[: len(variance)]
        for p, kind in enumerate(variance):
            L = letters[p]
            src = letters[:p] + "z" + letters[p + 1:]
            if kind == "u":
                out = out + jets.einsum(f"{src},{L}z->{letters}", T, G0)
            else:
                out = out - jets.einsum(f"{src},z{L}->{letters}", T, G0)
        return out

    def raise_last(self, T: jets.Jet) -> jets.Jet:
        """Raise the last index of T with h^{ij}."""
        return _raise_last(T, self.hinv)


def _raise_last(T: jets.Jet, hinv: jets.Jet) -> jets.Jet:
    letters = "abcdef"[: T.ndim]
    head = letters[:-1]
    return jets.einsum(f"{head}z,z{letters[-1]}->{letters}", T, hinv)


def _check_variance(T: jets.Jet, variance: str) -> None:
    if len(variance) != T.ndim or set(variance) - {"u", "l"}:
        raise ValueError(f"variance {variance!r} does not describe a rank-{T.ndim} tensor")


def geometry(spec_or_sample, point=None, mode: str = "analytic", order: int = 2) -> ThreadingGeometry:
    """Build a :class:`ThreadingGeometry` from a sample or from ``(spec, point)``."""
    if isinstance(spec_or_sample, ThreadingGeometry):
        return spec_or_sample
    if isinstance(spec_or_sample, MetricSample):
        return ThreadingGeometry(spec_or_sample)
    if not isinstance(spec_or_sample, MetricSpec):
        raise TypeError("expected a MetricSpec, MetricSample or ThreadingGeometry")
    return ThreadingGeometry(eval_sample(spec_or_sample, point, mode=mode, order=order))


# ---------------------------------------------------------------------------
# public value-level API


@dataclass(frozen=True)
class KinematicState:
    h_lo: np.ndarray
    h_up: np.ndarray
    omega: np.ndarray
    theta_lo: np.ndarray
    theta_scalar: float
    sigma: np.ndarray
    a_co: np.ndarray
    c_co: np.ndarray
    b_co: np.ndarray
    phi_sq: float = 1.0


@dataclass(frozen=True)
class ThreadingVector:
    time_part: float
    space_part: np.ndarray


def spatial_metric(sample) -> tuple[np.ndarray, np.ndarray]:
    """``(h_ij, h^ij)`` with h_ij = g_ij + Φ⁻² ξ_i ξ_j."""
    geo = geometry(sample)
    return geo.h.v.copy(), geo.hinv.v.copy()


def kinematics(sample) -> KinematicState:
    geo = geometry(sample)
    return KinematicState(
        h_lo=geo.h.v.copy(),
        h_up=geo.hinv.v.copy(),
        omega=geo.omega.v.copy(),
        theta_lo=geo.theta.v.copy(),
        theta_scalar=float(geo.theta_scalar.v),
        sigma=geo.sigma.v.copy(),
        a_co=geo.a.v.copy(),
        c_co=geo.c.v.copy(),
        b_co=geo.b.v.copy(),
        phi_sq=float(geo.phi2.v),
    )


def vorticity_from_xi(sample) -> np.ndarray:
    """ω_ij from Φ⁻²{c_i ξ_j − c_j ξ_i + ½(δξ_i/δx^j − δξ_j/δx^i)}."""
    geo = geometry(sample)
    c, xi = geo.c.v, geo.xi.v
    dxi = geo.delta(geo.xi).v  # dxi[i, j] = δξ_i/δx^j
    w = np.outer(c, xi) - np.outer(xi, c) + 0.5 * (dxi - dxi.T)
    return w / geo.phi2.v


def consistency_vorticity(sample) -> float:
    """Largest difference between the A-form and the ξ-form of ω_ij."""
    geo = geometry(sample)
    return float(np.max(np.abs(geo.omega.v - vorticity_from_xi(geo))))


def raise_omega(state: KinematicState):
    """``(ω_j^k, ω^{kh}, ω², σ², b²)``; ``omega_mixed[j, k] = ω_j^k``."""
    hu = state.h_up
    omega_mixed = np.einsum("ki,ij->jk", hu, state.omega)
    omega_up = hu @ state.omega @ hu
    omega_sq = float(np.einsum("kh,kh->", state.omega, omega_up))
    sigma_up = hu @ state.sigma @ hu
    sigma_sq = float(np.einsum("kh,kh->", state.sigma, sigma_up))
    b_sq = float(state.b_co @ hu @ state.b_co)
    return omega_mixed, omega_up, omega_sq, sigma_sq, b_sq


def coordinate_to_threading(sample, coord_vec) -> ThreadingVector:
    """Split a coordinate-basis vector v^a ∂/∂x^a as
    ``time_part ∂/∂x⁰ + space_part^i δ/δx^i``."""
    v = np.asarray(coord_vec, dtype=float)
    if isinstance(sample, ThreadingGeometry):
        sample = sample.sample
    xi, phi2 = sample.xi, sample.phi_sq
    return ThreadingVector(float(v[0] - xi @ v[1:] / phi2), v[1:].copy())
