"""Production-function families and their lowering to expression trees."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Union

from . import nodes
from .nodes import Expr


def _floats(values: Sequence[float], what: str, *, nonzero: bool = True) -> tuple[float, ...]:
    out = tuple(float(v) for v in values)
    for v in out:
        if not math.isfinite(v):
            raise ValueError(f"{what} must be finite, got {v}")
        if nonzero and v == 0.0:
            raise ValueError(f"{what} must be nonzero")
    return out


def _check_dim(n: int):
    if n < 2:
        raise ValueError(f"a production model needs at least 2 inputs, got {n}")


@dataclass(frozen=True)
class CobbDouglas:
    """gamma * x1^alpha1 * ... * xn^alphan"""

    gamma: float
    alpha: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "alpha", _floats(self.alpha, "Cobb-Douglas exponents"))
        object.__setattr__(self, "gamma", float(self.gamma))
        if not self.gamma > 0:
            raise ValueError("Cobb-Douglas gamma must be positive")
        _check_dim(self.n)

    @property
    def n(self) -> int:
        return len(self.alpha)

    @property
    def degree(self) -> float:
        return math.fsum(self.alpha)


@dataclass(frozen=True)
class CES:
    """gamma * (sum a_i^rho x_i^rho)^(d/rho)"""

    gamma: float
    d: float
    rho: float
    a: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "a", _floats(self.a, "CES weights"))
        for name in ("gamma", "d", "rho"):
            object.__setattr__(self, name, _floats([getattr(self, name)], f"CES {name}")[0])
        if not float(self.rho).is_integer() and any(v < 0 for v in self.a):
            raise ValueError("negative CES weights need an integer rho")
        _check_dim(self.n)

    @property
    def n(self) -> int:
        return len(self.a)

    @property
    def degree(self) -> float:
        return self.d


@dataclass(frozen=True)
class PerfectSubstitute:
    """sum a_i x_i"""

    a: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "a", _floats(self.a, "perfect-substitute coefficients"))
        _check_dim(self.n)

    @property
    def n(self) -> int:
        return len(self.a)

    @property
    def degree(self) -> float:
        return 1.0


@dataclass(frozen=True)
class Homothetic:
    """outer(inner(x)); ``outer`` is a one-variable expression in x1.

    Monotonicity of the outer function is not enforced.
    """

    outer: Expr
    inner: "FunctionModel"

    def __post_init__(self):
        if nodes.max_var_index(self.outer) > 1:
            raise ValueError("the outer function of a homothetic model must use x1 only")

    @property
    def n(self) -> int:
        return self.inner.n


@dataclass(frozen=True)
class Generic:
    expr: Expr
    n: int

    def __post_init__(self):
        _check_dim(self.n)
        if nodes.max_var_index(self.expr) > self.n:
            raise ValueError(f"expression uses more than {self.n} variables")


FunctionModel = Union[CobbDouglas, CES, PerfectSubstitute, Homothetic, Generic]


@lru_cache(maxsize=4096)
def lower(m: FunctionModel) -> Expr:
    """Closed-form expression for a model."""
    if isinstance(m, Generic):
        return m.expr
    if isinstance(m, PerfectSubstitute):
        return nodes.add(*(nodes.mul(nodes.const(a), nodes.var(i + 1)) for i, a in enumerate(m.a)))
    if isinstance(m, CobbDouglas):
        return nodes.mul(
            nodes.const(m.gamma),
            *(nodes.power(nodes.var(i + 1), a) for i, a in enumerate(m.alpha)),
        )
    if isinstance(m, CES):
        inner = nodes.add(
            *(
                nodes.mul(nodes.const(a**m.rho), nodes.power(nodes.var(i + 1), m.rho))
                for i, a in enumerate(m.a)
            )
        )
        return nodes.mul(nodes.const(m.gamma), nodes.power(inner, m.d / m.rho))
    if isinstance(m, Homothetic):
        return nodes.substitute(m.outer, {1: lower(m.inner)})
    raise TypeError(f"not a function model: {m!r}")


def polynomial(coeffs: Sequence[float]) -> Expr:
    """c0 + c1*x1 + c2*x1^2 + ... as a one-variable expression."""
    t = nodes.var(1)
    return nodes.add(*(nodes.mul(nodes.const(c), nodes.power(t, k)) for k, c in enumerate(coeffs) if c != 0))


def as_model(f, n: int | None = None) -> FunctionModel:
    """Accept a model, an Expr, or expression text."""
    if isinstance(f, (CobbDouglas, CES, PerfectSubstitute, Homothetic, Generic)):
        return f
    if isinstance(f, str):
        from .parser import parse

        if n is None:
            raise ValueError("dimension required to parse expression text")
        f = parse(f, n)
    if isinstance(f, Expr):
        if n is None:
            n = max(2, nodes.max_var_index(f))
        return Generic(f, n)
    raise TypeError(f"cannot build a function model from {f!r}")
