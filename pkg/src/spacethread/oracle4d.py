"""Brute-force 4D curvature in coordinates.

This module deliberately shares nothing with the threading machinery
beyond the raw metric sample: Christoffel symbols, Riemann and Ricci
tensors come straight from the coordinate partials of g_ab with plain
numpy. It serves as the ground truth the threading formulas are tested
against.

Conventions: ``R(X, Y)U = ∇_X∇_Y U − ∇_Y∇_X U − ∇_[X,Y] U``,
``riemann[a, b, c, d] = R^a_{bcd}`` with ``R(∂_c, ∂_d)∂_b = R^a_{bcd} ∂_a``,
and ``R_bd = R^a_{bad}``. With these choices de Sitter space has
``R_ab = 3 H² g_ab``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularMetric
from .metric import G_IDX, MetricSample, eval_sample


@dataclass(frozen=True)
class Metric4Sample:
    g4_lo: np.ndarray
    g4_up: np.ndarray
    d1_g4: np.ndarray  # d1_g4[a, b, e] = ∂_e g_ab
    d2_g4: np.ndarray | None  # d2_g4[a, b, e, f] = ∂_e ∂_f g_ab


def _assemble(v):
    """Place the ten field components (first axis of ``v``) into 4x4."""
    out = np.empty((4, 4) + v.shape[1:])
    out[0, 0] = -v[0]
    for i in range(3):
        out[0, i + 1] = out[i + 1, 0] = v[1 + i]
        for j in range(3):
            out[i + 1, j + 1] = v[G_IDX[i][j]]
    return out


def metric4(spec_or_sample, point=None, mode: str = "analytic", order: int = 2) -> Metric4Sample:
    sample = spec_or_sample if isinstance(spec_or_sample, MetricSample) else \
        eval_sample(spec_or_sample, point, mode=mode, order=order)
    g = _assemble(sample.values)
    d1 = _assemble(sample.d1)
    d2 = _assemble(sample.d2) if sample.d2 is not None else None
    if abs(np.linalg.det(g)) < 1e-300:
        raise SingularMetric("4D metric is degenerate")
    return Metric4Sample(g, np.linalg.inv(g), d1, d2)


def _gamma(m: Metric4Sample) -> np.ndarray:
    dg = m.d1_g4
    # t[d, b, c] = ∂_b g_dc + ∂_c g_db − ∂_d g_bc
    t = np.einsum("dcb->dbc", dg) + dg - np.einsum("bcd->dbc", dg)
    return 0.5 * np.einsum("ad,dbc->abc", m.g4_up, t)


def christoffel4(spec_or_sample, point=None, mode: str = "analytic") -> np.ndarray:
    """``G[a, b, c] = Γ^a_bc`` in coordinates."""
    m = metric4(spec_or_sample, point, mode=mode, order=1)
    return _gamma(m)


def _dgamma(m: Metric4Sample) -> np.ndarray:
    """``dG[a, b, c, e] = ∂_e Γ^a_bc``."""
    gu, dg, d2 = m.g4_up, m.d1_g4, m.d2_g4
    t = np.einsum("dcb->dbc", dg) + dg - np.einsum("bcd->dbc", dg)
    dt = (np.einsum("dcbe->dbce", d2) + d2 - np.einsum("bcde->dbce", d2))
    dgu = -np.einsum("ap,pqe,qd->ade", gu, dg, gu)
    return 0.5 * (np.einsum("ade,dbc->abce", dgu, t) + np.einsum("ad,dbce->abce", gu, dt))


def riemann4(spec_or_sample, point=None, mode: str = "analytic") -> np.ndarray:
    """``R[a, b, c, d] = R^a_{bcd}`` in coordinates."""
    m = metric4(spec_or_sample, point, mode=mode, order=2)
    return _riemann(m)


def _riemann(m: Metric4Sample) -> np.ndarray:
    G = _gamma(m)
    dG = _dgamma(m)
    # R^a_bcd = ∂_c Γ^a_db − ∂_d Γ^a_cb + Γ^a_ce Γ^e_db − Γ^a_de Γ^e_cb
    R = np.einsum("adbc->abcd", dG) - np.einsum("acbd->abcd", dG)
    R += np.einsum("ace,edb->abcd", G, G) - np.einsum("ade,ecb->abcd", G, G)
    return R


def riemann4_lowered(spec_or_sample, point=None, mode: str = "analytic") -> np.ndarray:
    """``R_abcd = g_ae R^e_bcd``."""
    m = metric4(spec_or_sample, point, mode=mode, order=2)
    return np.einsum("ae,ebcd->abcd", m.g4_lo, _riemann(m))


def ricci4(spec_or_sample, point=None, mode: str = "analytic") -> tuple[np.ndarray, float]:
    """Coordinate Ricci tensor R_ab and scalar curvature."""
    m = metric4(spec_or_sample, point, mode=mode, order=2)
    ric = np.einsum("abad->bd", _riemann(m))
    ric = 0.5 * (ric + ric.T)
    return ric, float(np.einsum("ab,ab->", m.g4_up, ric))


def frame_matrix(spec_or_sample, point=None, mode: str = "analytic") -> np.ndarray:
    """Columns are the threading frame ∂/∂x⁰, δ/δx¹, δ/δx², δ/δx³ in
    coordinate components."""
    sample = spec_or_sample if isinstance(spec_or_sample, MetricSample) else \
        eval_sample(spec_or_sample, point, mode=mode, order=1)
    E = np.eye(4)
    E[0, 1:] = sample.xi / sample.phi_sq
    return E


def project_ricci(spec_or_sample, point=None, ricci4_out=None, mode: str = "analytic") -> dict:
    """Threading-frame Ricci components ``{"ricci_ss", "ricci_s0", "ricci_00"}``."""
    sample = spec_or_sample if isinstance(spec_or_sample, MetricSample) else \
        eval_sample(spec_or_sample, point, mode=mode, order=2)
    if ricci4_out is None:
        ricci4_out = ricci4(sample)
    ric = ricci4_out[0] if isinstance(ricci4_out, tuple) else ricci4_out
    E = frame_matrix(sample)
    F = E.T @ ric @ E
    return {"ricci_ss": F[1:, 1:], "ricci_s0": F[1:, 0], "ricci_00": float(F[0, 0])}


def project_riemann(spec_or_sample, point=None, mode: str = "analytic") -> np.ndarray:
    """Lowered Riemann tensor in the threading frame (index 0 is ∂/∂x⁰)."""
    sample = spec_or_sample if isinstance(spec_or_sample, MetricSample) else \
        eval_sample(spec_or_sample, point, mode=mode, order=2)
    E = frame_matrix(sample)
    R = riemann4_lowered(sample)
    return np.einsum("abcd,ap,bq,cr,ds->pqrs", R, E, E, E, E)


def frame_connection(spec_or_sample, point=None, mode: str = "analytic") -> np.ndarray:
    """Levi-Civita connection in the threading frame: ``C[A, B, C]`` are the
    frame components of ∇_{e_C} e_B along e_A, with e_0 = ∂/∂x⁰ and
    e_i = δ/δx^i."""
    sample = spec_or_sample if isinstance(spec_or_sample, MetricSample) else \
        eval_sample(spec_or_sample, point, mode=mode, order=2)
    E = frame_matrix(sample)
    G = christoffel4(sample)
    # ∂_C E^μ_B: only the n_i = ξ_i/Φ² entries vary
    n_d1 = (sample.xi_d1 * sample.phi_sq - np.outer(sample.xi, sample.phi_sq_d1)) / sample.phi_sq ** 2
    dE = np.zeros((4, 4, 4))  # dE[mu, B, nu] = ∂_nu E^mu_B
    dE[0, 1:, :] = n_d1
    # ∇_{e_C} e_B = E^ν_C (∂_ν E^μ_B + Γ^μ_νλ E^λ_B) ∂_μ
    V = np.einsum("nC,mBn->mBC", E, dE) + np.einsum("mnl,nC,lB->mBC", G, E, E)
    return np.einsum("Am,mBC->ABC", np.linalg.inv(E), V)


def geodesic_rhs4(spec, state) -> np.ndarray:
    """Coordinate geodesic equation: returns ``(ẋ, ẍ)`` for ``state = (x, ẋ)``."""
    state = np.asarray(state, dtype=float)
    x, v = state[:4], state[4:]
    G = christoffel4(spec, x)
    return np.concatenate([v, -np.einsum("abc,b,c->a", G, v, v)])
