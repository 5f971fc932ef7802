"""Adaptive Dormand-Prince 5(4) integration with event and boundary location.

Written out by hand (rather than calling a library solver) because the
callers need two things at once: an event located by bisection on the
step length, and clean termination when a step would leave the metric's
domain, with the last valid point recorded at the boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, EvalError, StepFailure

# Dormand-Prince tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


class _Outside(Exception):
    pass


@dataclass
class OdeSolution:
    t: list
    y: np.ndarray | list
    status: str  # "done", "event" or "boundary"
    t_event: float | None = None
    n_rejected: int = 0


def _step(f, t, y, h, k1):
    with np.errstate(over="ignore", invalid="ignore"):
        return _stages(f, t, y, h, k1)


def _stages(f, t, y, h, k1):
    ks = [k1]
    for s in range(1, 7):
        yi = y + h * sum(a * k for a, k in zip(_A[s], ks))
        ks.append(np.asarray(f(t + _C[s] * h, yi), dtype=float))
    y5 = y + h * sum(b * k for b, k in zip(_B5, ks) if b != 0.0)
    err = h * sum(e * k for e, k in zip(_E, ks))
    # FSAL: the last stage is f(t + h, y5)
    return y5, err, ks[6]


def integrate_ode(f: Callable, t0: float, y0, t_end: float, tol: float = 1e-10,
                  h0: float | None = None, event: Callable | None = None,
                  event_tol: float = 1e-12, inside: Callable | None = None,
                  boundary_tol: float = 1e-10, max_steps: int = 1_000_000,
                  callback: Callable | None = None) -> OdeSolution:
    """Integrate ``y' = f(t, y)`` from ``t0`` to ``t_end``.

    The local error estimate of every accepted step satisfies
    ``|err_i| <= tol * max(1, |y_i|)``.

    ``event(t, y)``: integration stops where it changes sign; the crossing
    is located by bisection on the step length to ``event_tol`` in t.

    ``inside(y)``: domain predicate. When a trial step leaves the domain
    (or ``f`` raises :class:`DomainError`), the step is halved until it is
    shorter than ``boundary_tol``; integration then stops at the last
    inside point with status ``"boundary"``.
    """
    y = np.asarray(y0, dtype=float).copy()
    t = float(t0)
    direction = 1.0 if t_end >= t0 else -1.0
    span = abs(t_end - t0)
    ts, ys = [t], [y.copy()]
    if span == 0.0:
        return OdeSolution(ts, np.array(ys), "done")

    def ok(v):
        return inside is None or inside(v)

    def safe_f(tt, yy):
        if not ok(yy):
            raise _Outside
        try:
            out = np.asarray(f(tt, yy), dtype=float)
        except (DomainError, EvalError):
            raise _Outside from None
        if not np.all(np.isfinite(out)):
            raise _Outside
        return out

    k1 = safe_f(t, y)
    h = abs(h0) if h0 else min(span, 1e-2 * span + 1e-3)
    hmin = 1e-14 * max(1.0, abs(t), span)
    ev0 = event(t, y) if event else None
    rejected = 0
    for _ in range(max_steps):
        if direction * (t_end - t) <= 0.0:
            return OdeSolution(ts, np.array(ys), "done", n_rejected=rejected)
        h = min(h, abs(t_end - t))
        try:
            y_new, err, k_new = _step(safe_f, t, y, direction * h, k1)
            if not ok(y_new):
                raise _Outside
        except _Outside:
            # bisect the step down to the boundary
            if h <= boundary_tol:
                return OdeSolution(ts, np.array(ys), "boundary", n_rejected=rejected)
            h *= 0.5
            continue
        scale = tol * np.maximum(1.0, np.maximum(np.abs(y), np.abs(y_new)))
        e = float(np.max(np.abs(err) / scale))
        if not np.isfinite(e) or e > 1.0:
            rejected += 1
            h *= max(0.2, 0.9 * e ** -0.2) if np.isfinite(e) else 0.2
            if h < hmin:
                exc = StepFailure(f"step size underflow at t = {t}")
                exc.partial = OdeSolution(ts, np.array(ys), "failed", n_rejected=rejected)
                raise exc
            continue
        if event is not None:
            ev1 = event(t + direction * h, y_new)
            if ev1 == 0.0 or np.sign(ev1) != np.sign(ev0):
                te, ye = _bisect_event(safe_f, event, t, y, k1, direction * h, ev0, event_tol)
                ts.append(te)
                ys.append(ye)
                return OdeSolution(ts, np.array(ys), "event", t_event=te, n_rejected=rejected)
        t += direction * h
        y = y_new
        k1 = k_new
        ts.append(t)
        ys.append(y.copy())
        if callback is not None:
            callback(t, y)
        h *= min(5.0, 0.9 * e ** -0.2) if e > 0 else 5.0
    raise StepFailure(f"more than {max_steps} steps")


def _bisect_event(f, event, t, y, k1, h, ev0, event_tol):
    lo, hi = 0.0, h
    y_hi, _, _ = _step(f, t, y, hi, k1)
    for _ in range(200):
        if abs(hi - lo) <= event_tol:
            break
        mid = 0.5 * (lo + hi)
        ym, _, _ = _step(f, t, y, mid, k1)
        em = event(t + mid, ym)
        if em == 0.0:
            return t + mid, ym
        if np.sign(em) == np.sign(ev0):
            lo = mid
        else:
            hi, y_hi = mid, ym
    return t + hi, y_hi
