"""Isotropic curvature invariants of graph hypersurfaces and sampled predicates."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .calculus import DiffBundle, bilaplacian, diff_bundle
from .expr import DomainError, FunctionModel, check_point, evaluate, lower
from .numeric import (
    SamplePlan,
    SymmetricMatrix,
    Tolerance,
    Xoshiro256,
    determinant,
    elementary_symmetric_means,
    jacobi_eigh,
    principal_minor_means,
    sample_points,
)

UNIT_TOL = 1e-10


class RouteMismatchError(RuntimeError):
    """Eigenvalue and principal-minor routes to K_j disagree."""


class SampleDomainError(DomainError):
    def __init__(self, point, cause: Exception):
        super().__init__(f"at sample point {tuple(point)}: {cause}")
        self.point = tuple(point)


def route_tolerance(H: SymmetricMatrix) -> float:
    return 1e-8 * (1.0 + H.max_abs() ** H.n)


@dataclass(frozen=True)
class CurvatureProfile:
    point: tuple[float, ...]
    value: float
    gradient: tuple[float, ...]
    hessian: SymmetricMatrix
    principal_curvatures: tuple[float, ...]
    principal_directions: tuple[tuple[float, ...], ...]
    fundamental_curvatures: tuple[float, ...]
    minor_route: tuple[float, ...]

    @property
    def n(self) -> int:
        return len(self.point)

    @property
    def mean_curvature(self) -> float:
        return self.fundamental_curvatures[0]

    @property
    def relative_curvature(self) -> float:
        return self.fundamental_curvatures[-1]

    @property
    def lifted_directions(self) -> tuple[tuple[float, ...], ...]:
        """T_j = t_j + <t_j, grad f> i in (n+1)-coordinates."""
        return tuple(lift(t, self.gradient) for t in self.principal_directions)

    def to_dict(self) -> dict:
        return {
            "point": list(self.point),
            "value": self.value,
            "gradient": list(self.gradient),
            "hessian": self.hessian.rows(),
            "principal_curvatures": list(self.principal_curvatures),
            "principal_directions": [list(t) for t in self.principal_directions],
            "lifted_directions": [list(t) for t in self.lifted_directions],
            "fundamental_curvatures": list(self.fundamental_curvatures),
            "fundamental_curvatures_minor_route": list(self.minor_route),
            "mean_curvature": self.mean_curvature,
            "relative_curvature": self.relative_curvature,
        }


def lift(t: Sequence[float], grad: Sequence[float]) -> tuple[float, ...]:
    return (*t, math.fsum(a * b for a, b in zip(t, grad)))


def profile_from_bundle(b: DiffBundle) -> CurvatureProfile:
    H = b.hessian
    kappa, Q = jacobi_eigh(H)
    n = H.n
    dirs = tuple(tuple(Q[k][j] for k in range(n)) for j in range(n))
    K = elementary_symmetric_means(kappa)
    K_minor = principal_minor_means(H)
    tol = route_tolerance(H)
    worst = max(abs(a - c) for a, c in zip(K, K_minor))
    if worst > tol:
        raise RouteMismatchError(
            f"fundamental curvature routes disagree by {worst:.3e} (> {tol:.3e}) at {b.point}"
        )
    return CurvatureProfile(b.point, b.value, b.gradient, H, tuple(kappa), dirs, tuple(K), tuple(K_minor))


def curvature_profile(m: FunctionModel, x: Sequence[float]) -> CurvatureProfile:
    return profile_from_bundle(diff_bundle(m, x))


def _unit(t: Sequence[float]) -> tuple[float, ...]:
    t = tuple(float(v) for v in t)
    if abs(math.sqrt(math.fsum(v * v for v in t)) - 1.0) > UNIT_TOL:
        raise ValueError(f"direction {t} is not a unit vector")
    return t


def normal_curvature(m: FunctionModel, x: Sequence[float], t: Sequence[float]) -> float:
    """t^T D^2 f(x) t for a unit top-view direction t."""
    t = _unit(t)
    if len(t) != m.n:
        raise ValueError("direction has the wrong dimension")
    return diff_bundle(m, x).hessian.quadratic_form(t)


def restricted_form(H: SymmetricMatrix, u: Sequence[float], v: Sequence[float]) -> tuple[float, float, float]:
    return H.quadratic_form(u), H.quadratic_form(u, v), H.quadratic_form(v)


def plane_sectional(H: SymmetricMatrix, u: Sequence[float], v: Sequence[float]) -> float:
    huu, huv, hvv = restricted_form(H, u, v)
    return huu * hvv - huv * huv


def _check_plane(u, v, n):
    u, v = _unit(u), _unit(v)
    if len(u) != n or len(v) != n:
        raise ValueError("plane vectors have the wrong dimension")
    if abs(math.fsum(a * b for a, b in zip(u, v))) > UNIT_TOL:
        raise ValueError("plane vectors are not orthogonal")
    return u, v


def sectional_curvature(m: FunctionModel, x: Sequence[float], u: Sequence[float], v: Sequence[float]) -> float:
    """Product of the extremal normal curvatures over directions in span(u, v)."""
    u, v = _check_plane(u, v, m.n)
    return plane_sectional(diff_bundle(m, x).hessian, u, v)


def extremal_normal_curvatures(H: SymmetricMatrix, u, v) -> tuple[float, float]:
    huu, huv, hvv = restricted_form(H, u, v)
    mid = 0.5 * (huu + hvv)
    rad = math.hypot(0.5 * (huu - hvv), huv)
    return mid - rad, mid + rad


def coordinate_minors(H: SymmetricMatrix) -> list[float]:
    n = H.n
    return [H[j, j] * H[k, k] - H[j, k] ** 2 for j in range(n) for k in range(j + 1, n)]


def random_planes(n: int, k: int, seed: int) -> list[tuple[tuple[float, ...], tuple[float, ...]]]:
    """k orthonormal pairs from Gram-Schmidt on uniform [-1, 1] draws."""
    rng = Xoshiro256(seed)
    planes = []
    while len(planes) < k:
        u = [rng.uniform(-1, 1) for _ in range(n)]
        v = [rng.uniform(-1, 1) for _ in range(n)]
        nu = math.sqrt(math.fsum(a * a for a in u))
        if nu < 1e-3:
            continue
        u = [a / nu for a in u]
        d = math.fsum(a * b for a, b in zip(u, v))
        v = [b - d * a for a, b in zip(u, v)]
        nv = math.sqrt(math.fsum(b * b for b in v))
        if nv < 1e-3:
            continue
        planes.append((tuple(u), tuple(b / nv for b in v)))
    return planes


# ---------------------------------------------------------------- predicates


@dataclass
class PredicateVerdict:
    predicate: str
    holds: bool
    worst_point: tuple[float, ...] | None
    worst_residual: float
    worst_bound: float
    plan: SamplePlan
    tolerance: Tolerance
    strategy: str | None = None
    points_checked: int = 0
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {
            "predicate": self.predicate,
            "verdict": "holds" if self.holds else "fails",
            "worst_point": list(self.worst_point) if self.worst_point else None,
            "worst_residual": self.worst_residual,
            "worst_bound": self.worst_bound,
            "points_checked": self.points_checked,
            "plan": self.plan.to_dict(),
            "tolerances": self.tolerance.to_dict(),
        }
        if self.strategy is not None:
            d["strategy"] = self.strategy
        d.update(self.extra)
        return d


def _sweep(
    name: str,
    m: FunctionModel,
    plan: SamplePlan,
    tol: Tolerance,
    measure: Callable[[tuple[float, ...]], tuple[float, float]],
    strategy: str | None = None,
) -> PredicateVerdict:
    """Run ``measure(x) -> (residual, scale)`` over the plan.

    The worst point maximises residual / bound, ties going to the lowest index.
    """
    if plan.n != m.n:
        raise ValueError(f"plan dimension {plan.n} does not match model dimension {m.n}")
    worst = (-1.0, None, 0.0, 0.0)
    for x in sample_points(plan):
        try:
            r, scale = measure(x)
        except DomainError as exc:
            raise SampleDomainError(x, exc) from exc
        bound = tol.bound(scale)
        ratio = abs(r) / bound if bound > 0 else (math.inf if r != 0 else 0.0)
        if ratio > worst[0]:
            worst = (ratio, x, abs(r), bound)
    _, wx, wr, wb = worst
    return PredicateVerdict(name, wr <= wb, wx, wr, wb, plan, tol, strategy, plan.count)


def _minimal_measure(m: FunctionModel):
    def measure(x):
        b = diff_bundle(m, x)
        return b.hessian.trace(), b.value

    return measure


def _null_relative_measure(m: FunctionModel):
    def measure(x):
        H = diff_bundle(m, x).hessian
        return determinant(H.rows()), H.max_abs() ** H.n

    return measure


COORDINATE_PAIRS = "coordinatePairs"


def _flat_measure(m: FunctionModel, strategy: str, planes: int, seed: int):
    if strategy == COORDINATE_PAIRS:
        label = strategy

        def sections(H):
            return coordinate_minors(H)

    elif strategy in ("randomPlanes", "random"):
        label = f"randomPlanes({planes})"
        chosen = random_planes(m.n, planes, seed ^ 0x5EC7)

        def sections(H):
            return [plane_sectional(H, u, v) for u, v in chosen]

    else:
        raise ValueError(f"unknown plane strategy {strategy!r}")

    def measure(x):
        H = diff_bundle(m, x).hessian
        return max(abs(s) for s in sections(H)), H.max_abs() ** 2

    return measure, label


def _biharmonic_measure(m: FunctionModel):
    def measure(x):
        return bilaplacian(m, x), evaluate(lower(m), x)

    return measure


def is_isotropic_minimal(m: FunctionModel, plan: SamplePlan | None = None, tol: Tolerance = Tolerance()):
    """Harmonicity: |Lap f| <= atol + rtol*|f| at every sample point."""
    plan = plan or SamplePlan(m.n)
    return _sweep("isotropic_minimal", m, plan, tol, _minimal_measure(m))


def has_null_relative_curvature(m: FunctionModel, plan: SamplePlan | None = None, tol: Tolerance = Tolerance()):
    """|det D^2 f| <= atol + rtol*||D^2 f||_max^n at every sample point."""
    plan = plan or SamplePlan(m.n)
    return _sweep("null_relative_curvature", m, plan, tol, _null_relative_measure(m))


def is_isotropic_flat(
    m: FunctionModel,
    plan: SamplePlan | None = None,
    tol: Tolerance = Tolerance(),
    strategy: str = COORDINATE_PAIRS,
    planes: int = 8,
):
    """Sectional curvatures vanish, scaled by ||D^2 f||_max^2.

    ``strategy`` is ``"coordinatePairs"`` (the planes spanned by two
    coordinate axes) or ``"randomPlanes"`` with ``planes`` seeded planes per
    point.
    """
    plan = plan or SamplePlan(m.n)
    measure, label = _flat_measure(m, strategy, planes, plan.seed)
    return _sweep("isotropic_flat", m, plan, tol, measure, strategy=label)


def is_isotropic_biharmonic(m: FunctionModel, plan: SamplePlan | None = None, tol: Tolerance = Tolerance()):
    """|Lap^2 f| <= atol + rtol*|f| at every sample point."""
    plan = plan or SamplePlan(m.n)
    return _sweep("isotropic_biharmonic", m, plan, tol, _biharmonic_measure(m))


def predicates_at(m: FunctionModel, x: Sequence[float], tol: Tolerance = Tolerance()) -> dict[str, dict]:
    """The four predicates evaluated at a single point, same scaling as the sweeps."""
    x = check_point(x, m.n)
    measures = {
        "isotropic_minimal": _minimal_measure(m),
        "null_relative_curvature": _null_relative_measure(m),
        "isotropic_flat": _flat_measure(m, COORDINATE_PAIRS, 0, 0)[0],
        "isotropic_biharmonic": _biharmonic_measure(m),
    }
    out = {}
    for name, measure in measures.items():
        r, scale = measure(x)
        bound = tol.bound(scale)
        out[name] = {"holds": abs(r) <= bound, "residual": abs(r), "bound": bound}
    return out
