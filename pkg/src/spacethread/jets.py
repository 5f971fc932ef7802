"""Second-order forward-mode differentiation over array values.

A :class:`Jet` carries an array value together with its first and second
partial derivatives with respect to the spacetime coordinates. It is the
multivariate form of hyper-dual arithmetic: every operation propagates
value, gradient and Hessian exactly (up to rounding), truncating at the
order of its least-differentiated operand.

Layout: ``v`` has the value shape ``S``; ``d1`` has shape ``(n,) + S``;
``d2`` has shape ``(n, n) + S``. Derivative axes lead so that indexing and
reductions over *value* axes can use negative axis numbers unchanged.

``diff()`` turns derivatives into values: the result's value is the
gradient with the derivative index appended as the last value axis, and
its order drops by one. This is how derivatives of derived fields
(connection coefficients, kinematic tensors) are obtained.
"""

from __future__ import annotations

import numpy as np

_LETTERS = "abcdefghijklmnopqrstuvwxyz"


class Jet:
    __slots__ = ("v", "d1", "d2")
    __array_priority__ = 1000

    def __init__(self, v, d1=None, d2=None):
        self.v = np.asarray(v, dtype=float)
        self.d1 = d1
        self.d2 = d2 if d1 is not None else None

    # -- construction ---------------------------------------------------
    @classmethod
    def variable(cls, x: float, k: int, n: int = 4, order: int = 2) -> "Jet":
        """Seed for coordinate ``k`` at value ``x``."""
        d1 = np.zeros(n)
        d1[k] = 1.0
        return cls(x, d1, np.zeros((n, n)) if order >= 2 else None)

    @classmethod
    def constant(cls, v, n: int = 4, order: int = 2) -> "Jet":
        v = np.asarray(v, dtype=float)
        return cls(v, np.zeros((n,) + v.shape) if order >= 1 else None,
                   np.zeros((n, n) + v.shape) if order >= 2 else None)

    @property
    def order(self) -> int:
        if self.d1 is None:
            return 0
        return 1 if self.d2 is None else 2

    @property
    def shape(self):
        return self.v.shape

    @property
    def ndim(self):
        return self.v.ndim

    def truncate(self, order: int) -> "Jet":
        if order >= self.order:
            return self
        return Jet(self.v, self.d1 if order >= 1 else None, None)

    def __repr__(self):
        return f"Jet(order={self.order}, shape={self.shape}, v={self.v!r})"

    # -- derivative extraction -----------------------------------------
    def diff(self) -> "Jet":
        """Partials as a jet of one lower order (derivative index last)."""
        if self.d1 is None:
            raise ValueError("cannot differentiate an order-0 jet")
        v = np.moveaxis(self.d1, 0, -1)
        d1 = np.moveaxis(self.d2, 1, -1) if self.d2 is not None else None
        return Jet(v, d1)

    # -- structural ops on value axes ----------------------------------
    def __getitem__(self, idx) -> "Jet":
        if not isinstance(idx, tuple):
            idx = (idx,)
        v = self.v[idx]
        d1 = self.d1[(slice(None),) + idx] if self.d1 is not None else None
        d2 = self.d2[(slice(None), slice(None)) + idx] if self.d2 is not None else None
        return Jet(v, d1, d2)

    def swap(self, a: int = -1, b: int = -2) -> "Jet":
        """Swap two value axes (given as negative axis numbers)."""
        return self._map(lambda x: np.swapaxes(x, a, b))

    def moveaxis(self, src: int, dst: int) -> "Jet":
        """Move a value axis (negative axis numbers)."""
        return self._map(lambda x: np.moveaxis(x, src, dst))

    @property
    def T(self) -> "Jet":
        return self.swap(-1, -2)

    def sum(self, axis: int) -> "Jet":
        return self._map(lambda x: x.sum(axis=axis))

    def _map(self, f) -> "Jet":
        return Jet(f(self.v), f(self.d1) if self.d1 is not None else None,
                   f(self.d2) if self.d2 is not None else None)

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other):
        a, b = _align(self, other)
        return Jet(a.v + b.v, _opt(a.d1, b.d1, np.add), _opt(a.d2, b.d2, np.add))

    __radd__ = __add__

    def __sub__(self, other):
        a, b = _align(self, other)
        return Jet(a.v - b.v, _opt(a.d1, b.d1, np.subtract), _opt(a.d2, b.d2, np.subtract))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return self._map(np.negative)

    def __mul__(self, other):
        if not isinstance(other, Jet):
            c = np.asarray(other, dtype=float)
            return Jet(self.v * c, _scale(self.d1, c), _scale(self.d2, c))
        a, b = _align(self, other)
        v = a.v * b.v
        d1 = d2 = None
        if a.d1 is not None:
            d1 = a.d1 * b.v + a.v * b.d1
            if a.d2 is not None:
                cross = a.d1[:, None] * b.d1[None, :]
                d2 = a.d2 * b.v + a.v * b.d2 + cross + np.swapaxes(cross, 0, 1)
        return Jet(v, d1, d2)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return self * (1.0 / np.asarray(other, dtype=float))
        return self * reciprocal(other)

    def __rtruediv__(self, other):
        return reciprocal(self) * other

    def __pow__(self, p):
        return power(self, p)


def _opt(x, y, f):
    if x is None or y is None:
        return None
    return f(x, y)


def _scale(d, c):
    return None if d is None else d * c


def _expand(j: Jet, shape: tuple) -> Jet:
    if j.v.shape == shape:
        return j
    pad = (1,) * (len(shape) - j.v.ndim) + j.v.shape
    v = np.broadcast_to(j.v.reshape(pad), shape)
    d1 = d2 = None
    if j.d1 is not None:
        n = j.d1.shape[0]
        d1 = np.broadcast_to(j.d1.reshape((n,) + pad), (n,) + shape)
        if j.d2 is not None:
            d2 = np.broadcast_to(j.d2.reshape((n, n) + pad), (n, n) + shape)
    return Jet(v, d1, d2)


def _align(a, b) -> tuple[Jet, Jet]:
    if not isinstance(a, Jet):
        a = _like(b, a)
    if not isinstance(b, Jet):
        b = _like(a, b)
    order = min(a.order, b.order)
    a, b = a.truncate(order), b.truncate(order)
    shape = np.broadcast_shapes(a.v.shape, b.v.shape)
    return _expand(a, shape), _expand(b, shape)


def _like(ref: Jet, value) -> Jet:
    n = ref.d1.shape[0] if ref.d1 is not None else 4
    return Jet.constant(value, n, ref.order)


def as_jet(x, n: int = 4, order: int = 2) -> Jet:
    return x if isinstance(x, Jet) else Jet.constant(x, n, order)


# -- elementwise functions --------------------------------------------------

def _chain(x: Jet, f0, f1, f2) -> Jet:
    d1 = d2 = None
    if x.d1 is not None:
        d1 = f1 * x.d1
        if x.d2 is not None:
            d2 = f1 * x.d2 + f2 * (x.d1[:, None] * x.d1[None, :])
    return Jet(f0, d1, d2)


def reciprocal(x: Jet) -> Jet:
    inv = 1.0 / x.v
    return _chain(x, inv, -inv * inv, 2.0 * inv * inv * inv)


def power(x, p):
    if not isinstance(x, Jet):
        return np.power(x, p)
    p = float(p)
    if p == 0.0:
        return Jet.constant(np.ones_like(x.v), _n(x), x.order)
    if p == 1.0:
        return x
    if p.is_integer():
        # integer exponents stay valid for negative bases
        n = int(p)
        f0 = x.v ** n
        f1 = n * x.v ** (n - 1)
        f2 = n * (n - 1) * x.v ** (n - 2)
    else:
        f0 = x.v ** p
        f1 = p * x.v ** (p - 1.0)
        f2 = p * (p - 1.0) * x.v ** (p - 2.0)
    return _chain(x, f0, f1, f2)


def _n(x: Jet) -> int:
    return x.d1.shape[0] if x.d1 is not None else 4


def sqrt(x):
    if not isinstance(x, Jet):
        return np.sqrt(x)
    s = np.sqrt(x.v)
    return _chain(x, s, 0.5 / s, -0.25 / (s * x.v))


def exp(x):
    if not isinstance(x, Jet):
        return np.exp(x)
    e = np.exp(x.v)
    return _chain(x, e, e, e)


def log(x):
    if not isinstance(x, Jet):
        return np.log(x)
    return _chain(x, np.log(x.v), 1.0 / x.v, -1.0 / (x.v * x.v))


def sin(x):
    if not isinstance(x, Jet):
        return np.sin(x)
    s, c = np.sin(x.v), np.cos(x.v)
    return _chain(x, s, c, -s)


def cos(x):
    if not isinstance(x, Jet):
        return np.cos(x)
    s, c = np.sin(x.v), np.cos(x.v)
    return _chain(x, c, -s, -c)


def tan(x):
    if not isinstance(x, Jet):
        return np.tan(x)
    t = np.tan(x.v)
    sec2 = 1.0 + t * t
    return _chain(x, t, sec2, 2.0 * t * sec2)


# -- tensor algebra ---------------------------------------------------------

def einsum(subscripts: str, *operands) -> Jet:
    """``np.einsum`` over value axes with the product rule applied.

    Operands may be jets or plain arrays (treated as constants). Only
    explicit-output subscripts (containing ``->``) are supported.
    """
    lhs, out = subscripts.replace(" ", "").split("->")
    terms = lhs.split(",")
    if len(terms) != len(operands):
        raise ValueError("subscripts do not match operand count")
    used = set(subscripts)
    free = [c for c in _LETTERS + _LETTERS.upper() if c not in used]
    p, q = free[0], free[1]

    jets = [(i, o) for i, o in enumerate(operands) if isinstance(o, Jet)]
    if not jets:
        return Jet(np.einsum(subscripts, *operands))
    order = min(o.order for _, o in jets)
    vals = [o.v if isinstance(o, Jet) else np.asarray(o, dtype=float) for o in operands]
    v = np.einsum(subscripts, *vals)
    d1 = d2 = None
    if order >= 1:
        d1 = 0.0
        for i, o in jets:
            spec = ",".join(p + t if k == i else t for k, t in enumerate(terms)) + "->" + p + out
            args = [o.d1 if k == i else vals[k] for k in range(len(vals))]
            d1 = d1 + np.einsum(spec, *args)
    if order >= 2:
        d2 = 0.0
        for i, o in jets:
            spec = ",".join(p + q + t if k == i else t for k, t in enumerate(terms)) + "->" + p + q + out
            args = [o.d2 if k == i else vals[k] for k in range(len(vals))]
            d2 = d2 + np.einsum(spec, *args)
            for j, o2 in jets:
                if j == i:
                    continue
                spec = ",".join(
                    p + t if k == i else q + t if k == j else t for k, t in enumerate(terms)
                ) + "->" + p + q + out
                args = [o.d1 if k == i else o2.d1 if k == j else vals[k] for k in range(len(vals))]
                d2 = d2 + np.einsum(spec, *args)
    return Jet(v, d1, d2)


def outer(a: Jet, b: Jet) -> Jet:
    return einsum("i,j->ij", a, b)


def inv(a: Jet) -> Jet:
    """Inverse of a square matrix-valued jet (last two value axes)."""
    hi = np.linalg.inv(a.v)
    d1 = d2 = None
    if a.d1 is not None:
        d1 = -np.einsum("ij,ajk,kl->ail", hi, a.d1, hi)
        if a.d2 is not None:
            t = np.einsum("ij,ajk,kl,blm,mn->abin", hi, a.d1, hi, a.d1, hi)
            d2 = t + np.swapaxes(t, 0, 1) - np.einsum("ij,abjk,kl->abil", hi, a.d2, hi)
    return Jet(hi, d1, d2)


def stack(items, axis: int = -1) -> Jet:
    """Stack jets along a new value axis (negative axis numbers only)."""
    if axis >= 0:
        raise ValueError("use a negative axis")
    items = [as_jet(x) for x in items]
    order = min(x.order for x in items)
    shape = np.broadcast_shapes(*(x.v.shape for x in items))
    items = [_expand(x.truncate(order), shape) for x in items]
    v = np.stack([x.v for x in items], axis=axis)
    d1 = np.stack([x.d1 for x in items], axis=axis) if order >= 1 else None
    d2 = np.stack([x.d2 for x in items], axis=axis) if order >= 2 else None
    return Jet(v, d1, d2)


def symmetrize(a: Jet) -> Jet:
    return (a + a.T) * 0.5


def antisymmetrize(a: Jet) -> Jet:
    return (a - a.T) * 0.5
