"""Scalar field expressions over the coordinates x0..x3.

Expressions are immutable trees with structural equality and cached
hashes, so identical subtrees collapse when used as dictionary keys.
They support symbolic differentiation with light constant folding, a
prefix s-expression text format, and compilation to plain Python
functions with common-subexpression elimination.

    >>> r = coord(1)
    >>> f = 1 - 2 * param("m") / r
    >>> to_sexpr(f)
    '(sub 1.0 (div (mul 2.0 m) x1))'
"""

from __future__ import annotations

import math
from typing import Callable, Iterable, Mapping, Sequence

from .errors import EvalError, ParseError

UNARY = ("neg", "sin", "cos", "tan", "sqrt", "exp", "log")
BINARY = ("add", "sub", "mul", "div")
OPS = ("const", "coord", "param", "pow") + UNARY + BINARY
NCOORDS = 4


class Expr:
    __slots__ = ("op", "args", "value", "_hash")

    def __init__(self, op: str, args: tuple = (), value=None):
        if op not in OPS:
            raise ValueError(f"unknown node kind {op!r}")
        arity = 1 if op in UNARY or op == "pow" else 2 if op in BINARY else 0
        if len(args) != arity:
            raise ValueError(f"{op} takes {arity} operand(s), got {len(args)}")
        if op == "pow" and not float(2 * value).is_integer():
            raise ValueError(f"exponent must be an integer or half-integer, got {value}")
        self.op = op
        self.args = args
        self.value = value
        self._hash = hash((op, value, args))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Expr) or self._hash != other._hash:
            return False
        return self.op == other.op and self.value == other.value and self.args == other.args

    def __repr__(self):
        return f"Expr({to_sexpr(self)!r})"

    # arithmetic builds simplified trees
    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(other, self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, p):
        return power(self, p)

    @property
    def is_const(self):
        return self.op == "const"

    def size(self) -> int:
        """Number of distinct nodes."""
        seen = set()
        stack = [self]
        while stack:
            e = stack.pop()
            if e not in seen:
                seen.add(e)
                stack.extend(e.args)
        return len(seen)

    def coords_used(self) -> set[int]:
        return {e.value for e in _walk(self) if e.op == "coord"}

    def params_used(self) -> set[str]:
        return {e.value for e in _walk(self) if e.op == "param"}


def _walk(e: Expr):
    seen = set()
    stack = [e]
    while stack:
        n = stack.pop()
        if n in seen:
            continue
        seen.add(n)
        yield n
        stack.extend(n.args)


def const(x: float) -> Expr:
    return Expr("const", (), float(x))


def coord(k: int) -> Expr:
    if not 0 <= k < NCOORDS:
        raise ValueError(f"coordinate index {k} out of range")
    return Expr("coord", (), int(k))


def param(name: str) -> Expr:
    return Expr("param", (), str(name))


ZERO = const(0.0)
ONE = const(1.0)
X0, X1, X2, X3 = (coord(k) for k in range(NCOORDS))


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, float)):
        return const(x)
    raise TypeError(f"cannot convert {type(x).__name__} to Expr")


def _isval(e: Expr, v: float) -> bool:
    return e.op == "const" and e.value == v


def add(a, b) -> Expr:
    a, b = as_expr(a), as_expr(b)
    if _isval(a, 0.0):
        return b
    if _isval(b, 0.0):
        return a
    if a.is_const and b.is_const:
        return const(a.value + b.value)
    return Expr("add", (a, b))


def sub(a, b) -> Expr:
    a, b = as_expr(a), as_expr(b)
    if _isval(b, 0.0):
        return a
    if _isval(a, 0.0):
        return neg(b)
    if a.is_const and b.is_const:
        return const(a.value - b.value)
    if a == b:
        return ZERO
    return Expr("sub", (a, b))


def mul(a, b) -> Expr:
    a, b = as_expr(a), as_expr(b)
    if _isval(a, 0.0) or _isval(b, 0.0):
        return ZERO
    if _isval(a, 1.0):
        return b
    if _isval(b, 1.0):
        return a
    if a.is_const and b.is_const:
        return const(a.value * b.value)
    if _isval(a, -1.0):
        return neg(b)
    if _isval(b, -1.0):
        return neg(a)
    return Expr("mul", (a, b))


def div(a, b) -> Expr:
    a, b = as_expr(a), as_expr(b)
    if _isval(a, 0.0):
        return ZERO
    if _isval(b, 1.0):
        return a
    if a.is_const and b.is_const and b.value != 0.0:
        return const(a.value / b.value)
    return Expr("div", (a, b))


def neg(a) -> Expr:
    a = as_expr(a)
    if a.is_const:
        return const(-a.value)
    if a.op == "neg":
        return a.args[0]
    return Expr("neg", (a,))


def power(a, p) -> Expr:
    a = as_expr(a)
    p = float(p)
    if p == 0.0:
        return ONE
    if p == 1.0:
        return a
    if a.is_const:
        return const(_pow(a.value, p))
    return Expr("pow", (a,), p)


def _fn(name, fold):
    def build(a) -> Expr:
        a = as_expr(a)
        if a.is_const:
            return const(fold(a.value))
        return Expr(name, (a,))

    build.__name__ = name
    return build


sin = _fn("sin", math.sin)
cos = _fn("cos", math.cos)
tan = _fn("tan", math.tan)
sqrt = _fn("sqrt", math.sqrt)
exp = _fn("exp", math.exp)
log = _fn("log", math.log)


def _pow(x: float, p: float) -> float:
    if p.is_integer():
        return x ** int(p)
    return math.pow(x, p)


# ---------------------------------------------------------------------------
# differentiation


def diff(e: Expr, k: int, memo: dict | None = None) -> Expr:
    """Partial derivative of ``e`` with respect to coordinate ``k``."""
    if memo is None:
        memo = {}
    if e in memo:
        return memo[e]
    op = e.op
    if op in ("const", "param"):
        d = ZERO
    elif op == "coord":
        d = ONE if e.value == k else ZERO
    else:
        d = _diff_node(e, k, memo)
    memo[e] = d
    return d


def _diff_node(e: Expr, k: int, memo: dict) -> Expr:
    op = e.op
    a = e.args[0]
    da = diff(a, k, memo)
    if op == "add":
        return add(da, diff(e.args[1], k, memo))
    if op == "sub":
        return sub(da, diff(e.args[1], k, memo))
    if op == "mul":
        b = e.args[1]
        return add(mul(da, b), mul(a, diff(b, k, memo)))
    if op == "div":
        b = e.args[1]
        db = diff(b, k, memo)
        if _isval(db, 0.0):
            return div(da, b)
        return div(sub(mul(da, b), mul(a, db)), power(b, 2))
    if _isval(da, 0.0):
        return ZERO
    if op == "neg":
        return neg(da)
    if op == "pow":
        p = e.value
        return mul(mul(const(p), power(a, p - 1.0)), da)
    if op == "sin":
        return mul(cos(a), da)
    if op == "cos":
        return neg(mul(sin(a), da))
    if op == "tan":
        return div(da, power(cos(a), 2))
    if op == "sqrt":
        return div(da, mul(const(2.0), e))
    if op == "exp":
        return mul(e, da)
    if op == "log":
        return div(da, a)
    raise AssertionError(op)


def gradient(e: Expr) -> list[Expr]:
    return [diff(e, k) for k in range(NCOORDS)]


def hessian(e: Expr) -> list[list[Expr]]:
    """Symmetric matrix of second partials; the lower triangle aliases the upper."""
    g = gradient(e)
    out = [[None] * NCOORDS for _ in range(NCOORDS)]
    memos: list[dict] = [{} for _ in range(NCOORDS)]
    for a in range(NCOORDS):
        for b in range(a, NCOORDS):
            out[a][b] = out[b][a] = diff(g[a], b, memos[b])
    return out


# ---------------------------------------------------------------------------
# evaluation


def substitute(e: Expr, params: Mapping[str, float]) -> Expr:
    """Replace parameters by constants (folding where possible)."""
    memo: dict = {}

    def go(n: Expr) -> Expr:
        if n in memo:
            return memo[n]
        if n.op == "param":
            r = const(params[n.value]) if n.value in params else n
        elif not n.args:
            r = n
        else:
            args = [go(a) for a in n.args]
            r = _rebuild(n, args)
        memo[n] = r
        return r

    return go(e)


def _rebuild(n: Expr, args: list) -> Expr:
    op = n.op
    if op == "pow":
        return power(args[0], n.value)
    if op in BINARY:
        return {"add": add, "sub": sub, "mul": mul, "div": div}[op](*args)
    return {"neg": neg, "sin": sin, "cos": cos, "tan": tan,
            "sqrt": sqrt, "exp": exp, "log": log}[op](args[0])


def evaluate(e: Expr, coords: Sequence, params: Mapping[str, float] | None = None, lib=math):
    """Evaluate ``e`` by tree walking.

    ``coords`` may hold floats or any number-like objects supporting the
    arithmetic dunders (jets, for instance); ``lib`` supplies the
    elementary functions matching that type.
    """
    params = params or {}
    memo: dict = {}

    def go(n: Expr):
        if n in memo:
            return memo[n]
        op = n.op
        if op == "const":
            r = n.value
        elif op == "coord":
            r = coords[n.value]
        elif op == "param":
            try:
                r = params[n.value]
            except KeyError:
                raise EvalError(f"unbound parameter {n.value!r}") from None
        elif op == "add":
            r = go(n.args[0]) + go(n.args[1])
        elif op == "sub":
            r = go(n.args[0]) - go(n.args[1])
        elif op == "mul":
            r = go(n.args[0]) * go(n.args[1])
        elif op == "div":
            r = go(n.args[0]) / go(n.args[1])
        elif op == "neg":
            r = -go(n.args[0])
        elif op == "pow":
            base = go(n.args[0])
            r = _pow(base, n.value) if lib is math else lib.power(base, n.value)
        else:
            r = getattr(lib, op)(go(n.args[0]))
        memo[n] = r
        return r

    try:
        return go(e)
    except (ValueError, ZeroDivisionError, OverflowError) as exc:
        raise EvalError(str(exc)) from exc


_PY_BINOP = {"add": "+", "sub": "-", "mul": "*", "div": "/"}


def compile_exprs(exprs: Sequence[Expr], params: Mapping[str, float] | None = None,
                  name: str = "fields") -> Callable[..., tuple]:
    """Compile expressions into one function ``f(x0, x1, x2, x3) -> tuple``.

    Shared subtrees are computed once. Parameters are baked in as literals.
    Errors from the math library surface as :class:`EvalError`.
    """
    params = dict(params or {})
    names: dict[Expr, str] = {}
    lines: list[str] = []

    def leaf(n: Expr) -> str | None:
        if n.op == "const":
            return f"({n.value!r})"
        if n.op == "coord":
            return f"x{n.value}"
        if n.op == "param":
            if n.value not in params:
                raise EvalError(f"unbound parameter {n.value!r}")
            return f"({float(params[n.value])!r})"
        return None

    def emit(root: Expr) -> str:
        # iterative post-order keeps deep trees off the Python stack
        stack = [(root, False)]
        while stack:
            n, ready = stack.pop()
            if n in names:
                continue
            s = leaf(n)
            if s is not None:
                names[n] = s
                continue
            if not ready:
                stack.append((n, True))
                stack.extend((a, False) for a in n.args if a not in names)
                continue
            args = [names[a] for a in n.args]
            op = n.op
            if op in _PY_BINOP:
                rhs = f"{args[0]} {_PY_BINOP[op]} {args[1]}"
            elif op == "neg":
                rhs = f"-{args[0]}"
            elif op == "pow":
                p = n.value
                rhs = f"{args[0]} ** {int(p)}" if p.is_integer() else f"_pow({args[0]}, {p!r})"
            else:
                rhs = f"_{op}({args[0]})"
            var = f"t{len(lines)}"
            lines.append(f"    {var} = {rhs}")
            names[n] = var
        return names[root]

    outs = [emit(e) for e in exprs]
    src = [f"def {name}(x0, x1, x2, x3):"] + lines + [f"    return ({', '.join(outs)},)"]
    ns = {"_pow": math.pow, "_sin": math.sin, "_cos": math.cos, "_tan": math.tan,
          "_sqrt": math.sqrt, "_exp": math.exp, "_log": math.log}
    exec(compile("\n".join(src), f"<compiled {name}>", "exec"), ns)
    raw = ns[name]

    def fn(x0, x1, x2, x3):
        try:
            return raw(float(x0), float(x1), float(x2), float(x3))
        except (ValueError, ZeroDivisionError, OverflowError) as exc:
            raise EvalError(f"{name}: {exc}") from exc

    fn.source = "\n".join(src)
    return fn


# ---------------------------------------------------------------------------
# s-expression text format

_COORD_NAMES = {f"x{k}": k for k in range(NCOORDS)}


def to_sexpr(e: Expr, coord_names: Sequence[str] | None = None) -> str:
    names = list(coord_names) if coord_names else [f"x{k}" for k in range(NCOORDS)]
    memo: dict = {}

    def go(n: Expr) -> str:
        if n in memo:
            return memo[n]
        op = n.op
        if op == "const":
            s = repr(n.value)
        elif op == "coord":
            s = names[n.value]
        elif op == "param":
            s = n.value
        elif op == "pow":
            p = n.value
            s = f"(pow {go(n.args[0])} {int(p) if p.is_integer() else p!r})"
        else:
            s = "(" + " ".join([op] + [go(a) for a in n.args]) + ")"
        memo[n] = s
        return s

    return go(e)


def _tokenize(text: str) -> list[str]:
    return text.replace("(", " ( ").replace(")", " ) ").split()


def parse_sexpr(text: str, definitions: Mapping[str, Expr] | None = None,
                coord_names: Mapping[str, int] | None = None) -> Expr:
    """Parse a prefix s-expression.

    Symbols resolve, in order, to coordinates (``x0``..``x3`` unless
    ``coord_names`` says otherwise), entries of ``definitions`` (inlined),
    and finally parameters.
    """
    coord_names = dict(coord_names) if coord_names is not None else _COORD_NAMES
    definitions = definitions or {}
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty expression")
    pos = 0

    def atom(tok: str) -> Expr:
        try:
            return Expr("const", (), float(tok))
        except ValueError:
            pass
        if tok in coord_names:
            return Expr("coord", (), coord_names[tok])
        if tok in definitions:
            return definitions[tok]
        if not (tok[0].isalpha() or tok[0] == "_"):
            raise ParseError(f"bad symbol {tok!r}")
        return Expr("param", (), tok)

    def node() -> Expr:
        nonlocal pos
        if pos >= len(tokens):
            raise ParseError("unexpected end of expression")
        tok = tokens[pos]
        pos += 1
        if tok == ")":
            raise ParseError("unexpected ')'")
        if tok != "(":
            return atom(tok)
        if pos >= len(tokens):
            raise ParseError("unexpected end of expression")
        op = tokens[pos]
        pos += 1
        if op not in UNARY + BINARY + ("pow",):
            raise ParseError(f"unknown operator {op!r}")
        if op == "pow":
            base = node()
            if pos >= len(tokens):
                raise ParseError("pow needs an exponent")
            try:
                p = float(tokens[pos])
            except ValueError:
                raise ParseError("pow exponent must be a number literal") from None
            pos += 1
            args, value = (base,), p
        else:
            args = []
            while pos < len(tokens) and tokens[pos] != ")":
                args.append(node())
            args, value = tuple(args), None
        if pos >= len(tokens) or tokens[pos] != ")":
            raise ParseError(f"missing ')' after {op}")
        pos += 1
        try:
            return Expr(op, args, value)
        except ValueError as exc:
            raise ParseError(str(exc)) from None

    out = node()
    if pos != len(tokens):
        raise ParseError(f"trailing tokens: {' '.join(tokens[pos:])}")
    return out


def coerce(x, definitions: Mapping[str, Expr] | None = None,
           coord_names: Mapping[str, int] | None = None) -> Expr:
    """Accept an Expr, a number, or s-expression text."""
    if isinstance(x, str):
        return parse_sexpr(x, definitions, coord_names)
    return as_expr(x)


def all_params(exprs: Iterable[Expr]) -> set[str]:
    out: set[str] = set()
    for e in exprs:
        out |= e.params_used()
    return out
