"""Gradients, Hessians and Laplacians of function models.

The production path is symbolic: differentiate the lowered expression and
evaluate. ``fd_oracle`` is a finite-difference cross-check for tests and the
acceptance suite; nothing else calls it.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .expr import FunctionModel, check_point, differentiate, evaluate, lower
from .expr.nodes import Expr, add, compile_expr, DomainError
from .numeric import SymmetricMatrix


@dataclass(frozen=True)
class DiffBundle:
    point: tuple[float, ...]
    value: float
    gradient: tuple[float, ...]
    hessian: SymmetricMatrix

    def to_dict(self) -> dict:
        return {
            "point": list(self.point),
            "value": self.value,
            "gradient": list(self.gradient),
            "hessian": self.hessian.rows(),
        }


@lru_cache(maxsize=1024)
def symbolic_derivatives(e: Expr, n: int) -> tuple[tuple[Expr, ...], tuple[Expr, ...]]:
    """(gradient expressions, upper-triangle Hessian expressions)."""
    grad = tuple(differentiate(e, i) for i in range(1, n + 1))
    hess = tuple(differentiate(grad[i], j + 1) for i in range(n) for j in range(i, n))
    return grad, hess


@lru_cache(maxsize=1024)
def laplacian_expr(e: Expr, n: int) -> Expr:
    return add(*(differentiate(differentiate(e, i), i) for i in range(1, n + 1)))


def _eval_all(exprs: Sequence[Expr], x: tuple[float, ...]) -> tuple[float, ...]:
    return tuple(evaluate(e, x) for e in exprs)


def diff_bundle(m: FunctionModel, x: Sequence[float]) -> DiffBundle:
    x = check_point(x, m.n)
    e = lower(m)
    grad, hess = symbolic_derivatives(e, m.n)
    return DiffBundle(x, evaluate(e, x), _eval_all(grad, x), SymmetricMatrix(m.n, _eval_all(hess, x)))


def gradient(m: FunctionModel, x: Sequence[float]) -> tuple[float, ...]:
    x = check_point(x, m.n)
    return _eval_all(symbolic_derivatives(lower(m), m.n)[0], x)


def laplacian(m: FunctionModel, x: Sequence[float]) -> float:
    return diff_bundle(m, x).hessian.trace()


def bilaplacian(m: FunctionModel, x: Sequence[float]) -> float:
    x = check_point(x, m.n)
    lap = laplacian_expr(lower(m), m.n)
    return evaluate(laplacian_expr(lap, m.n), x)


# --------------------------------------------------------------- FD oracle


def fd_steps(x: Sequence[float]) -> tuple[float, ...]:
    return tuple(1e-5 * max(v, 1.0) for v in x)


def fd_oracle(m: FunctionModel, x: Sequence[float], order: int):
    """Central differences: gradient (order 1) or Hessian rows (order 2).

    Steps are h_i = 1e-5 * max(x_i, 1); off-diagonal second derivatives use
    the four-point cross stencil.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    x = check_point(x, m.n)
    h = fd_steps(x)
    for xi, hi in zip(x, h):
        if xi - 10 * hi <= 0:
            raise DomainError(f"point {x} is within 10 steps of the orthant boundary")
    f = compile_expr(lower(m))
    n = m.n

    def at(*shifts: tuple[int, float]) -> float:
        p = list(x)
        for i, s in shifts:
            p[i] += s * h[i]
        return f(p)

    if order == 1:
        return tuple((at((i, 1)) - at((i, -1))) / (2 * h[i]) for i in range(n))

    f0 = f(x)
    H = [[0.0] * n for _ in range(n)]
    for i in range(n):
        H[i][i] = (at((i, 1)) - 2 * f0 + at((i, -1))) / (h[i] * h[i])
        for j in range(i + 1, n):
            v = (at((i, 1), (j, 1)) - at((i, 1), (j, -1)) - at((i, -1), (j, 1)) + at((i, -1), (j, -1))) / (
                4 * h[i] * h[j]
            )
            H[i][j] = H[j][i] = v
    return H
