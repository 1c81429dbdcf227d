"""Immutable expression trees over x1..xn with exact partial derivatives.

Constructors perform constant folding (and the trivial 0/1 identities) and
nothing else; two trees that are mathematically equal may still differ
structurally, so equality checks in this package are numeric.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Callable, Iterable, Sequence

KINDS = ("const", "var", "add", "mul", "div", "pow", "exp", "log", "neg", "sin", "cos")
_FUNCS = ("exp", "log", "sin", "cos")


class DomainError(ValueError):
    """Evaluation left the domain of a subexpression (or of the positive orthant)."""


class Expr:
    __slots__ = ("kind", "value", "args", "_hash")

    def __init__(self, kind: str, value: float | int | None = None, args: tuple = ()):
        if kind not in KINDS:
            raise ValueError(f"unknown node kind {kind!r}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "args", tuple(args))
        object.__setattr__(self, "_hash", hash((kind, value, self.args)))

    def __setattr__(self, name, value):
        raise AttributeError("Expr is immutable")

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Expr) or self._hash != other._hash:
            return False
        return self.kind == other.kind and self.value == other.value and self.args == other.args

    def __repr__(self):
        return f"Expr({to_text(self)!r})"

    def __str__(self):
        return to_text(self)

    @property
    def is_const(self) -> bool:
        return self.kind == "const"

    # operator sugar for building trees in code and tests
    def __add__(self, other):
        return add(self, _wrap(other))

    def __radd__(self, other):
        return add(_wrap(other), self)

    def __sub__(self, other):
        return sub(self, _wrap(other))

    def __rsub__(self, other):
        return sub(_wrap(other), self)

    def __mul__(self, other):
        return mul(self, _wrap(other))

    def __rmul__(self, other):
        return mul(_wrap(other), self)

    def __truediv__(self, other):
        return div(self, _wrap(other))

    def __rtruediv__(self, other):
        return div(_wrap(other), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, p):
        if isinstance(p, Expr):
            if not p.is_const:
                raise TypeError("exponent must be a constant")
            p = p.value
        return power(self, p)


def _wrap(v) -> Expr:
    return v if isinstance(v, Expr) else const(v)


# ---------------------------------------------------------------- constructors


def const(v: float) -> Expr:
    v = float(v)
    if not math.isfinite(v):
        raise ValueError(f"non-finite constant {v}")
    if v == 0.0:
        v = 0.0  # drop the sign of -0.0
    return Expr("const", v)


def var(i: int) -> Expr:
    if int(i) != i or i < 1:
        raise ValueError(f"variable index must be a positive integer, got {i}")
    return Expr("var", int(i))


ZERO = const(0.0)
ONE = const(1.0)


def add(*terms: Expr) -> Expr:
    flat: list[Expr] = []
    c = 0.0
    for t in terms:
        parts = t.args if t.kind == "add" else (t,)
        for p in parts:
            if p.is_const:
                c += p.value
            else:
                flat.append(p)
    if c != 0.0:
        flat.append(const(c))
    if not flat:
        return ZERO
    if len(flat) == 1:
        return flat[0]
    return Expr("add", None, tuple(flat))


def sub(a: Expr, b: Expr) -> Expr:
    return add(a, neg(b))


def mul(*factors: Expr) -> Expr:
    flat: list[Expr] = []
    c = 1.0
    for f in factors:
        parts = f.args if f.kind == "mul" else (f,)
        for p in parts:
            if p.is_const:
                c *= p.value
            else:
                flat.append(p)
    if c == 0.0:
        return ZERO
    if not flat:
        return const(c)
    if c != 1.0:
        flat.insert(0, const(c))
    if len(flat) == 1:
        return flat[0]
    return Expr("mul", None, tuple(flat))


def div(a: Expr, b: Expr) -> Expr:
    if b.is_const and b.value != 0.0:
        if a.is_const:
            return const(a.value / b.value)
        if b.value == 1.0:
            return a
    if a.is_const and a.value == 0.0 and not (b.is_const and b.value == 0.0):
        return ZERO
    return Expr("div", None, (a, b))


def power(base: Expr, p: float) -> Expr:
    p = float(p)
    if not math.isfinite(p):
        raise ValueError("non-finite exponent")
    if p == 0.0:
        return ONE
    if p == 1.0:
        return base
    if base.is_const:
        try:
            return const(_pow(base.value, p))
        except DomainError:
            pass
    return Expr("pow", p, (base,))


def neg(a: Expr) -> Expr:
    if a.is_const:
        return const(-a.value)
    if a.kind == "neg":
        return a.args[0]
    return Expr("neg", None, (a,))


def _func(kind: str, a: Expr) -> Expr:
    if a.is_const:
        try:
            return const(_UNARY[kind](a.value))
        except DomainError:
            pass
    return Expr(kind, None, (a,))


def exp(a: Expr) -> Expr:
    return _func("exp", a)


def log(a: Expr) -> Expr:
    return _func("log", a)


def sin(a: Expr) -> Expr:
    return _func("sin", a)


def cos(a: Expr) -> Expr:
    return _func("cos", a)


def sqrt(a: Expr) -> Expr:
    return power(a, 0.5)


# ------------------------------------------------------------------ numerics


def _pow(b: float, p: float) -> float:
    if b < 0.0 and not p.is_integer():
        raise DomainError(f"negative base {b!r} with non-integer exponent {p!r}")
    if b == 0.0 and p < 0.0:
        raise DomainError("0 raised to a negative power")
    try:
        return b**p
    except OverflowError:
        raise DomainError(f"overflow in {b!r}^{p!r}") from None


def _exp(v: float) -> float:
    try:
        return math.exp(v)
    except OverflowError:
        raise DomainError(f"overflow in exp({v!r})") from None


def _log(v: float) -> float:
    if v <= 0.0:
        raise DomainError(f"log of nonpositive value {v!r}")
    return math.log(v)


_UNARY = {"exp": _exp, "log": _log, "sin": math.sin, "cos": math.cos}


def _div(a: float, b: float) -> float:
    if b == 0.0:
        raise DomainError("division by zero")
    return a / b


# ----------------------------------------------------------------- structure


@lru_cache(maxsize=65536)
def max_var_index(e: Expr) -> int:
    if e.kind == "var":
        return e.value
    return max((max_var_index(a) for a in e.args), default=0)


def substitute(e: Expr, mapping: dict[int, Expr]) -> Expr:
    """Replace variables by expressions, re-folding on the way up."""
    if e.kind == "var":
        return mapping.get(e.value, e)
    if e.kind == "const":
        return e
    args = [substitute(a, mapping) for a in e.args]
    return _rebuild(e, args)


def _rebuild(e: Expr, args: Sequence[Expr]) -> Expr:
    k = e.kind
    if k == "add":
        return add(*args)
    if k == "mul":
        return mul(*args)
    if k == "div":
        return div(*args)
    if k == "pow":
        return power(args[0], e.value)
    if k == "neg":
        return neg(args[0])
    return _func(k, args[0])


def fold(e: Expr) -> Expr:
    """Rebuild bottom-up through the folding constructors."""
    if e.kind in ("const", "var"):
        return e
    return _rebuild(e, [fold(a) for a in e.args])


# ------------------------------------------------------------ differentiation


@lru_cache(maxsize=65536)
def differentiate(e: Expr, i: int) -> Expr:
    """Exact partial derivative with respect to x_i."""
    k = e.kind
    if k == "const":
        return ZERO
    if k == "var":
        return ONE if e.value == i else ZERO
    if k == "add":
        return add(*(differentiate(a, i) for a in e.args))
    if k == "neg":
        return neg(differentiate(e.args[0], i))
    if k == "mul":
        terms = []
        for j, a in enumerate(e.args):
            da = differentiate(a, i)
            if da == ZERO:
                continue
            terms.append(mul(*e.args[:j], da, *e.args[j + 1 :]))
        return add(*terms)
    if k == "div":
        u, v = e.args
        du, dv = differentiate(u, i), differentiate(v, i)
        if dv == ZERO:
            return div(du, v)
        return div(sub(mul(du, v), mul(u, dv)), power(v, 2.0))
    u = e.args[0]
    du = differentiate(u, i)
    if du == ZERO:
        return ZERO
    if k == "pow":
        p = e.value
        return mul(const(p), power(u, p - 1.0), du)
    if k == "exp":
        return mul(e, du)
    if k == "log":
        return div(du, u)
    if k == "sin":
        return mul(cos(u), du)
    if k == "cos":
        return neg(mul(sin(u), du))
    raise AssertionError(k)


# ---------------------------------------------------------------- evaluation

Compiled = Callable[[Sequence[float]], float]


@lru_cache(maxsize=65536)
def compile_expr(e: Expr) -> Compiled:
    """Turn a tree into a nest of closures; raises DomainError while evaluating."""
    k = e.kind
    if k == "const":
        v = e.value
        return lambda x: v
    if k == "var":
        j = e.value - 1
        return lambda x: x[j]
    fs = [compile_expr(a) for a in e.args]
    if k == "add":
        return lambda x: math.fsum(f(x) for f in fs)
    if k == "mul":
        def _mul(x):
            r = 1.0
            for f in fs:
                r *= f(x)
            return r
        return _mul
    if k == "div":
        fa, fb = fs
        return lambda x: _div(fa(x), fb(x))
    (f,) = fs
    if k == "pow":
        p = e.value
        if p == 2.0:
            def _sq(x):
                v = f(x)
                return v * v
            return _sq
        return lambda x: _pow(f(x), p)
    if k == "neg":
        return lambda x: -f(x)
    g = _UNARY[k]
    return lambda x: g(f(x))


def check_point(x: Iterable[float], n: int | None = None) -> tuple[float, ...]:
    pt = tuple(float(v) for v in x)
    if n is not None and len(pt) != n:
        raise ValueError(f"expected a point with {n} coordinates, got {len(pt)}")
    for v in pt:
        if not (v > 0.0 and math.isfinite(v)):
            raise DomainError(f"point {pt} is not in the open positive orthant")
    return pt


def evaluate(e: Expr, x: Sequence[float], *, positive: bool = True) -> float:
    """Evaluate at a point. Off the open positive orthant is an error unless
    ``positive=False`` (used for one-variable curve parameters)."""
    if positive:
        x = check_point(x)
    if max_var_index(e) > len(x):
        raise ValueError(f"expression uses x{max_var_index(e)} but the point has {len(x)} coordinates")
    try:
        v = compile_expr(e)(x)
    except OverflowError:
        raise DomainError("overflow during evaluation") from None
    if not math.isfinite(v):
        raise DomainError(f"non-finite result {v!r} at {tuple(x)}")
    return v


# ------------------------------------------------------------------ printing

_PREC = {"add": 1, "mul": 2, "div": 2, "neg": 3, "pow": 4}
_ATOM = 5


def _num(v: float) -> str:
    if v.is_integer() and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def to_text(e: Expr, names: Sequence[str] | None = None) -> str:
    """Render in the parser's grammar; ``parse(to_text(e))`` folds back to ``e``."""

    def name(i):
        return names[i - 1] if names else f"x{i}"

    def prec(a: Expr) -> int:
        if a.kind == "const":
            return _ATOM if a.value >= 0 else 3
        return _PREC.get(a.kind, _ATOM)

    def wrap(a: Expr, min_prec: int) -> str:
        s = go(a)
        return f"({s})" if prec(a) < min_prec else s

    def go(a: Expr) -> str:
        k = a.kind
        if k == "const":
            return _num(a.value)
        if k == "var":
            return name(a.value)
        if k == "add":
            out = go(a.args[0]) if prec(a.args[0]) > 1 else wrap(a.args[0], 2)
            for t in a.args[1:]:
                if t.kind == "neg":
                    out += " - " + wrap(t.args[0], 2)
                elif t.is_const and t.value < 0:
                    out += " - " + _num(-t.value)
                else:
                    out += " + " + wrap(t, 2)
            return out
        if k == "mul":
            return "*".join(wrap(f, 3) for f in a.args)
        if k == "div":
            return wrap(a.args[0], 2) + "/" + wrap(a.args[1], 3)
        if k == "neg":
            return "-" + wrap(a.args[0], _ATOM)
        if k == "pow":
            return wrap(a.args[0], _ATOM) + "^" + _num(a.value)
        return f"{k}({go(a.args[0])})"

    return go(e)
