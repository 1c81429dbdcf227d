"""Seeded random models and points shared by the property tests."""

from __future__ import annotations

from isoprod.expr import CES, CobbDouglas, Generic, Homothetic, PerfectSubstitute, parse, polynomial
from isoprod.numeric import SamplePlan, Xoshiro256, sample_points


def _vec(rng: Xoshiro256, n: int, lo: float, hi: float) -> list[float]:
    return [rng.uniform(lo, hi) for _ in range(n)]


def random_generic_text(rng: Xoshiro256, n: int, depth: int = 2) -> str:
    """Random expression text that is finite everywhere (log and / only see squares + 1)."""
    if depth == 0 or rng.random() < 0.3:
        if rng.random() < 0.25:
            return f"{rng.uniform(0.5, 2.0):.3f}"
        return f"x{1 + int(rng.random() * n)}"
    op = int(rng.random() * 7)
    a = random_generic_text(rng, n, depth - 1)
    b = random_generic_text(rng, n, depth - 1)
    if op == 0:
        return f"({a} + {b})"
    if op == 1:
        return f"{a}*{b}"
    if op == 2:
        return f"{a}/({b}*{b} + 1)"
    if op == 3:
        return f"({a}*{a} + 1)^{rng.uniform(0.5, 2.5):.3f}"
    if op == 4:
        return f"exp(0.1*{a}/({a}*{a} + 1))"
    if op == 5:
        return f"log(1 + {a}*{a})"
    return f"({a} - {b})"


def random_family(rng: Xoshiro256, n: int):
    kind = int(rng.random() * 4)
    if kind == 0:
        return CobbDouglas(rng.uniform(0.5, 3.0), _vec(rng, n, 0.1, 2.0))
    if kind == 1:
        rho = rng.uniform(0.3, 2.5)
        return CES(rng.uniform(0.5, 3.0), rng.uniform(0.3, 2.5), rho, _vec(rng, n, 0.5, 3.0))
    if kind == 2:
        return PerfectSubstitute(_vec(rng, n, 0.5, 3.0))
    return Homothetic(polynomial([0.0] + _vec(rng, 1 + int(rng.random() * 3), 0.2, 2.0)), random_family(rng, n))


def random_model(rng: Xoshiro256, n: int):
    """Families and random Generic expressions in roughly equal measure."""
    if rng.random() < 0.5:
        return random_family(rng, n)
    return Generic(parse(random_generic_text(rng, n), n), n)


def random_pairs(count: int, seed: int, lo: float = 0.2, hi: float = 5.0, dims=(2, 3, 4)):
    rng = Xoshiro256(seed)
    out = []
    for k in range(count):
        n = dims[k % len(dims)]
        m = random_model(rng, n)
        x = sample_points(SamplePlan(n, 1, lo, hi, seed + k))[0]
        out.append((m, x))
    return out


def random_symmetric(rng: Xoshiro256, n: int, scale: float = 1.0) -> list[list[float]]:
    a = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            a[i][j] = a[j][i] = rng.uniform(-scale, scale)
    return a
