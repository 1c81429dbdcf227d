"""Curves on a graph hypersurface parametrised by isotropic arclength.

A curve is given by its top view x(u) in the positive orthant; the lift is
X = x + f(x) i with i = (0, ..., 0, 1). Arclength is the Euclidean
arclength of the top view.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from scipy.interpolate import PchipInterpolator

from .calculus import diff_bundle
from .expr import DomainError, Expr, FunctionModel, differentiate, evaluate, parse_curve
from .curvature import lift

KAPPA_G_FLOOR = 1e-10
IRREGULAR_SPEED = 1e-12


class IrregularCurveError(DomainError):
    def __init__(self, u: float, speed: float):
        super().__init__(f"top view is not regular at u={u!r} (speed {speed:.3e})")
        self.u = u


def _dot(a, b) -> float:
    return math.fsum(p * q for p, q in zip(a, b))


@dataclass(frozen=True)
class TopViewCurve:
    coords: tuple[Expr, ...]
    a: float
    b: float
    panels: int = 1024

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))
        if not self.b > self.a:
            raise ValueError("curve interval must have b > a")
        if self.panels < 2:
            raise ValueError("need at least two panels")

    @classmethod
    def parse(cls, texts: Sequence[str], a: float, b: float, panels: int = 1024) -> "TopViewCurve":
        return cls(tuple(parse_curve(t) for t in texts), float(a), float(b), panels)

    @property
    def n(self) -> int:
        return len(self.coords)

    @cached_property
    def _d1(self) -> tuple[Expr, ...]:
        return tuple(differentiate(c, 1) for c in self.coords)

    @cached_property
    def _d2(self) -> tuple[Expr, ...]:
        return tuple(differentiate(c, 1) for c in self._d1)

    def point(self, u: float) -> tuple[float, ...]:
        return tuple(evaluate(c, (u,), positive=False) for c in self.coords)

    def velocity(self, u: float) -> tuple[float, ...]:
        return tuple(evaluate(c, (u,), positive=False) for c in self._d1)

    def acceleration(self, u: float) -> tuple[float, ...]:
        return tuple(evaluate(c, (u,), positive=False) for c in self._d2)

    def speed(self, u: float) -> float:
        return math.sqrt(_dot(self.velocity(u), self.velocity(u)))


class ArclengthTable:
    """Monotone map u <-> s built once by panel-wise Simpson quadrature."""

    def __init__(self, curve: TopViewCurve):
        self.curve = curve
        N = curve.panels
        h = (curve.b - curve.a) / N
        us = [curve.a + k * h for k in range(N + 1)]
        speeds = [self._speed(u) for u in us]
        mids = [self._speed(curve.a + (k + 0.5) * h) for k in range(N)]
        s = [0.0]
        for k in range(N):
            s.append(s[-1] + h / 6.0 * (speeds[k] + 4.0 * mids[k] + speeds[k + 1]))
        self.u_nodes = us
        self.s_nodes = s
        self._inverse = PchipInterpolator(s, us)

    def _speed(self, u: float) -> float:
        sp = self.curve.speed(u)
        if sp < IRREGULAR_SPEED:
            raise IrregularCurveError(u, sp)
        return sp

    @property
    def length(self) -> float:
        return self.s_nodes[-1]

    def _segment(self, u0: float, u1: float) -> float:
        mid = 0.5 * (u0 + u1)
        return (u1 - u0) / 6.0 * (self._speed(u0) + 4.0 * self._speed(mid) + self._speed(u1))

    def s_of_u(self, u: float) -> float:
        c = self.curve
        if not c.a <= u <= c.b:
            raise ValueError(f"parameter {u} outside [{c.a}, {c.b}]")
        h = (c.b - c.a) / c.panels
        k = min(int((u - c.a) / h), c.panels - 1)
        return self.s_nodes[k] + self._segment(self.u_nodes[k], u)

    def u_of_s(self, s: float) -> float:
        """Interpolated guess refined by Newton steps on s(u) - s."""
        L = self.length
        if not -1e-12 * L <= s <= L * (1 + 1e-12):
            raise ValueError(f"arclength {s} outside [0, {L}]")
        s = min(max(s, 0.0), L)
        u = float(self._inverse(s))
        c = self.curve
        for _ in range(4):
            u = min(max(u, c.a), c.b)
            step = (self.s_of_u(u) - s) / self._speed(u)
            u -= step
            if abs(step) <= 1e-15 * (1.0 + abs(u)):
                break
        return min(max(u, c.a), c.b)


@dataclass(frozen=True)
class CurveFrame:
    s: float
    u: float
    X: tuple[float, ...]
    T: tuple[float, ...]
    t: tuple[float, ...]
    kappa_g: float
    S: tuple[float, ...]
    kappa_n: float
    kappa_s: float | None
    acceleration: tuple[float, ...]  # X'' from the lift formula

    def to_dict(self) -> dict:
        return {
            "s": self.s,
            "u": self.u,
            "X": list(self.X),
            "T": list(self.T),
            "t": list(self.t),
            "kappa_g": self.kappa_g,
            "S": list(self.S),
            "kappa_n": self.kappa_n,
            "kappa_s": self.kappa_s,
        }


def reparametrize(curve: TopViewCurve) -> ArclengthTable:
    return ArclengthTable(curve)


def frame_at(m: FunctionModel, curve: TopViewCurve, s: float, table: ArclengthTable | None = None) -> CurveFrame:
    if curve.n != m.n:
        raise ValueError(f"curve lives in {curve.n} dimensions, model in {m.n}")
    table = table or ArclengthTable(curve)
    u = table.u_of_s(s)
    x = curve.point(u)
    b = diff_bundle(m, x)
    v = curve.velocity(u)
    a = curve.acceleration(u)
    sigma = math.sqrt(_dot(v, v))
    t = tuple(vi / sigma for vi in v)
    # d2x/ds2: component of x_uu normal to t, divided by speed squared
    along = _dot(t, a)
    xss = tuple((ai - along * ti) / sigma**2 for ai, ti in zip(a, t))
    kappa_g = math.sqrt(_dot(xss, xss))
    kappa_n = b.hessian.quadratic_form(t)
    S_tilde = lift(xss, b.gradient)
    n = len(x)
    if kappa_g < KAPPA_G_FLOOR:
        S = (0.0,) * n + (1.0,)
        kappa_s = S_tilde[-1] + kappa_n
    else:
        S = tuple(c / kappa_g for c in S_tilde)
        kappa_s = None
    acc = (*xss, S_tilde[-1] + kappa_n)
    return CurveFrame(
        s=s,
        u=u,
        X=(*x, b.value),
        T=lift(t, b.gradient),
        t=t,
        kappa_g=kappa_g,
        S=S,
        kappa_n=kappa_n,
        kappa_s=kappa_s,
        acceleration=acc,
    )


def curvature_along(m: FunctionModel, curve: TopViewCurve, k: int) -> list[CurveFrame]:
    """Frames at k equally spaced arclength stations, first at 0, last at the full length."""
    if k < 2:
        raise ValueError("need at least two stations")
    table = ArclengthTable(curve)
    L = table.length
    return [frame_at(m, curve, L if j == k - 1 else j * L / (k - 1), table) for j in range(k)]
