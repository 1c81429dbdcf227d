"""Economic reading of a production model: homogeneity, returns to scale,
perfect substitutes and numeric family fingerprinting."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .calculus import diff_bundle, gradient
from .expr import Expr, FunctionModel, Generic, evaluate, lower
from .numeric import SamplePlan, sample_points


class VanishingValueError(ValueError):
    pass


@dataclass
class Homogeneity:
    homogeneous: bool
    degree: float  # mean Euler ratio over the sample
    spread: float
    scaling_residual: float

    def to_dict(self) -> dict:
        d = {"verdict": "homogeneous" if self.homogeneous else "notHomogeneous", "spread": self.spread}
        d["degree"] = self.degree
        d["scaling_residual"] = self.scaling_residual
        return d


def euler_ratios(m: FunctionModel, points: Sequence[Sequence[float]]) -> list[float]:
    out = []
    for x in points:
        b = diff_bundle(m, x)
        if b.value == 0.0:
            raise VanishingValueError(f"f vanishes at {tuple(x)}")
        out.append(math.fsum(xi * gi for xi, gi in zip(x, b.gradient)) / b.value)
    return out


def estimate_homogeneity_degree(m: FunctionModel, plan: SamplePlan | None = None) -> Homogeneity:
    """Euler-ratio constancy, confirmed by f(2x) = 2^d f(x) on the first ten points."""
    plan = plan or SamplePlan(m.n)
    pts = sample_points(plan)
    ratios = euler_ratios(m, pts)
    mean = math.fsum(ratios) / len(ratios)
    spread = max(ratios) - min(ratios)
    e = lower(m)
    scaling = 0.0
    for x in pts[:10]:
        fx = evaluate(e, x)
        f2x = evaluate(e, [2 * v for v in x])
        scaling = max(scaling, abs(f2x - 2.0**mean * fx) / abs(f2x))
    homogeneous = spread <= 1e-6 * (1 + abs(mean)) and scaling <= 1e-6
    return Homogeneity(homogeneous, mean, spread, scaling)


def returns_to_scale(h: Homogeneity, tol: float = 1e-6) -> str:
    if not h.homogeneous:
        return "n/a"
    if abs(h.degree - 1.0) <= tol:
        return "constant"
    return "increasing" if h.degree > 1.0 else "decreasing"


@dataclass
class PerfectSubstituteVerdict:
    yes: bool
    coefficients: tuple[float, ...] | None
    hessian_residual: float
    linearity_residual: float

    def to_dict(self) -> dict:
        return {
            "verdict": "yes" if self.yes else "no",
            "coefficients": list(self.coefficients) if self.coefficients else None,
            "hessian_residual": self.hessian_residual,
            "linearity_residual": self.linearity_residual,
        }


def is_perfect_substitute(m: FunctionModel, plan: SamplePlan | None = None) -> PerfectSubstituteVerdict:
    """Zero Hessian everywhere and f(x) = <grad f(x0), x> (no intercept)."""
    plan = plan or SamplePlan(m.n)
    pts = sample_points(plan)
    a = gradient(m, pts[0])
    hess_res = 0.0
    lin_res = 0.0
    for x in pts:
        b = diff_bundle(m, x)
        gnorm = max(abs(g) for g in b.gradient)
        hess_res = max(hess_res, b.hessian.max_abs() / (1 + gnorm))
        linear = math.fsum(ai * xi for ai, xi in zip(a, x))
        lin_res = max(lin_res, abs(b.value - linear) / abs(b.value) if b.value else math.inf)
    yes = hess_res <= 1e-9 and lin_res <= 1e-8
    return PerfectSubstituteVerdict(yes, a if yes else None, hess_res, lin_res)


# ------------------------------------------------------------ fingerprinting


@dataclass
class FamilyTag:
    family: str
    params: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"family": self.family, "params": self.params, "residuals": self.residuals}


def _cobb_douglas_fit(m: FunctionModel, pts) -> tuple[list[float], float, float] | None:
    """Exponents from the log-derivatives x_i f_i / f, which must be constant."""
    cols = []
    logf = []
    for x in pts:
        b = diff_bundle(m, x)
        if b.value <= 0:
            return None
        cols.append([xi * gi / b.value for xi, gi in zip(x, b.gradient)])
        logf.append(math.log(b.value))
    E = np.array(cols)
    alpha = E.mean(axis=0)
    spread = float((E.max(axis=0) - E.min(axis=0)).max())
    L = np.log(np.array(pts))
    log_gamma = np.array(logf) - L @ alpha
    lg = float(log_gamma.mean())
    resid = max(spread, float(np.abs(log_gamma - lg).max()))
    return alpha.tolist(), math.exp(lg), resid


def _ratio_slopes(pts, grads) -> tuple[list[float], list[float], float] | None:
    """Fit log(f_1/f_j) = (rho-1) log(x_1/x_j) + c_j on each 2-input slice."""
    slopes, intercepts, resid = [], [], 0.0
    n = len(pts[0])
    for j in range(1, n):
        X, Y = [], []
        for x, g in zip(pts, grads):
            if g[0] <= 0 or g[j] <= 0:
                return None
            X.append(math.log(x[0] / x[j]))
            Y.append(math.log(g[0] / g[j]))
        A = np.vstack([X, np.ones(len(X))]).T
        (k, c), *_ = np.linalg.lstsq(A, np.array(Y), rcond=None)
        r = np.abs(A @ np.array([k, c]) - np.array(Y)).max() / (1 + np.abs(Y).max())
        slopes.append(float(k))
        intercepts.append(float(c))
        resid = max(resid, float(r))
    return slopes, intercepts, resid


def classify_family(e: Expr | FunctionModel, plan: SamplePlan, n: int | None = None) -> FamilyTag:
    """Best-effort family tag for an expression; Generic when nothing fits.

    Order: perfect substitute, Cobb-Douglas, CES (or a power of a perfect
    substitute when the fitted rho is 1).
    """
    m = e if not isinstance(e, Expr) else Generic(e, n or plan.n)
    ps = is_perfect_substitute(m, plan)
    if ps.yes:
        return FamilyTag("PerfectSubstitute", {"a": list(ps.coefficients)}, {"hessian": ps.hessian_residual})

    pts = sample_points(plan)
    cd = _cobb_douglas_fit(m, pts)
    if cd is not None and cd[2] <= 1e-8:
        alpha, gamma, r = cd
        return FamilyTag("CobbDouglas", {"gamma": gamma, "alpha": alpha}, {"log_linear": r})

    try:
        h = estimate_homogeneity_degree(m, plan)
    except VanishingValueError:
        return FamilyTag("Generic", {}, {})
    if not h.homogeneous:
        return FamilyTag("Generic", {}, {"euler_spread": h.spread})
    grads = [gradient(m, x) for x in pts]
    fit = _ratio_slopes(pts, grads)
    if fit is None:
        return FamilyTag("Generic", {"degree": h.degree}, {})
    slopes, intercepts, resid = fit
    slope_spread = max(slopes) - min(slopes)
    if resid > 1e-8 or slope_spread > 1e-6:
        return FamilyTag("Generic", {"degree": h.degree}, {"ratio_fit": resid, "slope_spread": slope_spread})
    rho = 1.0 + sum(slopes) / len(slopes)
    if abs(rho) < 1e-6:
        return FamilyTag("Generic", {"degree": h.degree}, {"ratio_fit": resid})
    # weights normalised to a_1 = 1: (a_1/a_j)^rho = exp(c_j)
    a = [1.0] + [math.exp(-c / rho) for c in intercepts]
    x0 = pts[0]
    S = math.fsum((ai * xi) ** rho for ai, xi in zip(a, x0))
    gamma = evaluate(lower(m), x0) / S ** (h.degree / rho)
    residuals = {"ratio_fit": resid, "euler_spread": h.spread}
    if abs(rho - 1.0) <= 1e-6:
        if abs(h.degree - 1.0) <= 1e-6:
            return FamilyTag("PerfectSubstitute", {"a": [gamma * ai for ai in a]}, residuals)
        return FamilyTag("PowerOfPerfectSubstitute", {"gamma": gamma, "d": h.degree, "c": a}, residuals)
    return FamilyTag("CES", {"gamma": gamma, "d": h.degree, "rho": rho, "a": a}, residuals)


@dataclass
class EconReport:
    homogeneity: Homogeneity | None
    returns_to_scale: str
    perfect_substitute: PerfectSubstituteVerdict
    positivity: float
    family: FamilyTag
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "homogeneity": self.homogeneity.to_dict() if self.homogeneity else {"verdict": "notHomogeneous"},
            "returns_to_scale": self.returns_to_scale,
            "perfect_substitute": self.perfect_substitute.to_dict(),
            "positivity": self.positivity,
            "family": self.family.to_dict(),
            "notes": list(self.notes),
        }


def econ_report(m: FunctionModel, plan: SamplePlan | None = None) -> EconReport:
    plan = plan or SamplePlan(m.n)
    notes = []
    try:
        h = estimate_homogeneity_degree(m, plan)
    except VanishingValueError as exc:
        h = None
        notes.append(str(exc))
    e = lower(m)
    pts = sample_points(plan)
    positive = sum(1 for x in pts if evaluate(e, x) > 0) / len(pts)
    return EconReport(
        homogeneity=h,
        returns_to_scale=returns_to_scale(h) if h else "n/a",
        perfect_substitute=is_perfect_substitute(m, plan),
        positivity=positive,
        family=classify_family(m, plan),
        notes=notes,
    )
