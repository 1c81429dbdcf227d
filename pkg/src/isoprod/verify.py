"""Parametric sweeps that test the classification statements numerically.

Each check builds a grid of cells, evaluates geometric predicates on every
cell's model over a seeded sample, and compares the outcome with an expected
pattern written as a pure function of the cell parameters. A disagreement is
reported with its worst point; it is never tuned away. Cells whose expected
pattern is ``None`` are exploration cells: they feed ``findings`` and do not
gate the overall verdict.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

from .calculus import diff_bundle
from .curvature import (
    PredicateVerdict,
    has_null_relative_curvature,
    is_isotropic_biharmonic,
    is_isotropic_flat,
    is_isotropic_minimal,
)
from .econ import estimate_homogeneity_degree, is_perfect_substitute
from .expr import CES, CobbDouglas, Generic, Homothetic, PerfectSubstitute, parse, polynomial
from .expr import nodes
from .numeric import SamplePlan, Tolerance, Xoshiro256, sample_points

CHECK_IDS = ("C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8", "C9")


class SpecError(ValueError):
    pass


@dataclass
class CheckSpec:
    check_id: str
    grid: dict[str, list] = field(default_factory=dict)
    count: int = 128
    lo: float = 0.1
    hi: float = 10.0
    seed: int = 42
    tolerance: Tolerance | None = None

    def plan(self, n: int, count: int | None = None) -> SamplePlan:
        return SamplePlan(n, count or self.count, self.lo, self.hi, self.seed)

    @property
    def tol(self) -> Tolerance:
        return self.tolerance or CHECKS[self.check_id].tolerance


@dataclass
class CellResult:
    index: int
    label: str
    params: dict
    expected: dict | None
    observed: dict
    details: dict
    error: str | None = None

    @property
    def report_only(self) -> bool:
        return self.expected is None

    @property
    def agrees(self) -> bool | None:
        if self.report_only:
            return None
        if self.error is not None:
            return False
        return all(self.observed.get(k) == v for k, v in self.expected.items())

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "label": self.label,
            "params": self.params,
            "expected": self.expected,
            "observed": self.observed,
            "agrees": self.agrees,
            "report_only": self.report_only,
            "error": self.error,
            "details": self.details,
        }


@dataclass
class VerificationReport:
    check_id: str
    title: str
    statement: str
    spec: CheckSpec
    cells: list[CellResult]
    findings: list[dict]
    summary: dict

    @property
    def overall(self) -> bool:
        return all(c.agrees for c in self.cells if not c.report_only)

    def counterexamples(self) -> list[dict]:
        out = []
        for c in self.cells:
            if c.report_only or c.agrees:
                continue
            entry = {"cell": c.index, "label": c.label, "expected": c.expected, "observed": c.observed}
            if c.error:
                entry["error"] = c.error
            for key, want in (c.expected or {}).items():
                v = c.details.get(key)
                if c.observed.get(key) != want and isinstance(v, dict):
                    entry.update(
                        predicate=key,
                        point=v.get("worst_point"),
                        residual=v.get("worst_residual"),
                        bound=v.get("worst_bound"),
                    )
                    break
            out.append(entry)
        return out

    def true_set(self, key: str) -> list[str]:
        return [c.label for c in self.cells if c.observed.get(key)]

    def to_dict(self) -> dict:
        return {
            "check": self.check_id,
            "title": self.title,
            "statement": self.statement,
            "overall": self.overall,
            "cell_count": len(self.cells),
            "gated_cells": sum(1 for c in self.cells if not c.report_only),
            "plan": {"count": self.spec.count, "lo": self.spec.lo, "hi": self.spec.hi, "seed": self.spec.seed},
            "tolerances": self.spec.tol.to_dict(),
            "grid": self.spec.grid,
            "summary": self.summary,
            "cells": [c.to_dict() for c in self.cells],
            "counterexamples": self.counterexamples(),
        }


@dataclass
class _Check:
    title: str
    statement: str
    tolerance: Tolerance
    default_grid: dict
    cells: Callable[[CheckSpec], list[tuple[str, dict]]]
    expected: Callable[[dict], dict | None]
    run: Callable[[dict, CheckSpec], tuple[dict, dict]]
    summarize: Callable[[list[CellResult]], tuple[dict, list[dict]]] | None = None


def _v(verdict: PredicateVerdict) -> dict:
    d = verdict.to_dict()
    d.pop("plan")
    return d


def _cell_rng(seed: int, *salt: int) -> Xoshiro256:
    s = seed
    for k in salt:
        s = (s * 1_000_003 + k + 1) & ((1 << 64) - 1)
    return Xoshiro256(s)


def _draw(rng: Xoshiro256, lo: float, hi: float, k: int) -> list[float]:
    return [round(rng.uniform(lo, hi), 3) for _ in range(k)]


def _is(value: float, target: float) -> bool:
    return abs(value - target) <= 1e-12


# -------------------------------------------------------------------- C1


def _c1_cells(spec: CheckSpec):
    degrees = [int(d) for d in spec.grid["g_degree"]]
    per = int(spec.grid.get("per_degree", [4])[0])
    out = []
    for di, deg in enumerate(degrees):
        for j in range(per):
            rng = _cell_rng(spec.seed, 1, di, j)
            out.append((f"g deg {deg} #{j}", {"g_degree": deg, "coeffs": _draw(rng, 0.5, 2.0, deg + 1)}))
    return out


def _c1_model(p: dict) -> Generic:
    # x1 * g(x2/x1) with g(r) = sum c_k r^k
    x1, x2 = nodes.var(1), nodes.var(2)
    terms = [
        nodes.mul(nodes.const(c), nodes.power(x1, 1 - k), nodes.power(x2, k)) for k, c in enumerate(p["coeffs"])
    ]
    return Generic(nodes.add(*terms), 2)


def _c1_run(p: dict, spec: CheckSpec):
    m = _c1_model(p)
    plan = spec.plan(2)
    minimal = is_isotropic_minimal(m, plan, spec.tol)
    worst = 0.0
    ok = True
    for x in sample_points(plan):
        H = diff_bundle(m, x).hessian
        lap = H[0, 0] + H[1, 1]
        rhs = -H[0, 1] * (x[0] ** 2 + x[1] ** 2) / (x[0] * x[1])
        scale = abs(H[0, 0]) + abs(H[1, 1]) + abs(rhs)
        err = abs(lap - rhs)
        worst = max(worst, err / (1e-12 + scale))
        ok = ok and err <= 1e-12 + 1e-6 * scale
    observed = {"minimal": minimal.holds, "euler_identity": ok}
    details = {
        "function": nodes.to_text(m.expr),
        "minimal": _v(minimal),
        "euler_identity_max_rel_dev": worst,
    }
    return observed, details


# -------------------------------------------------------------------- C2


def _c2_cells(spec: CheckSpec):
    return [(t, {"f": t}) for t in spec.grid["f"]]


def _c2_run(p: dict, spec: CheckSpec):
    m = Generic(parse(p["f"], 2), 2)
    plan = spec.plan(2)
    minimal = is_isotropic_minimal(m, plan, spec.tol)
    ps = is_perfect_substitute(m, plan)
    return (
        {"minimal": minimal.holds, "perfect_substitute": ps.yes},
        {"minimal": _v(minimal), "perfect_substitute": ps.to_dict()},
    )


# -------------------------------------------------------------------- C3


def _c3_cells(spec: CheckSpec):
    out = []
    for n in spec.grid["n"]:
        for alpha in itertools.product(spec.grid["alpha"], repeat=int(n)):
            out.append((f"alpha={list(alpha)}", {"n": int(n), "alpha": list(alpha), "gamma": 1.0}))
    return out


def _c3_run(p: dict, spec: CheckSpec):
    m = CobbDouglas(p["gamma"], p["alpha"])
    v = is_isotropic_minimal(m, spec.plan(m.n), spec.tol)
    return {"minimal": v.holds}, {"minimal": _v(v)}


# -------------------------------------------------------------------- C4


def ces_laplacian_printed(gamma: float, d: float, rho: float, a: Sequence[float], x: Sequence[float]):
    """The published closed form of the CES Laplacian, evaluated term by term.

    Returns (value, scale) where scale is the same expression with every
    bracketed term replaced by its absolute value.
    """
    n = len(x)
    S = math.fsum((ai * xi) ** rho for ai, xi in zip(a, x))
    P2 = math.prod(xi * xi for xi in x)
    pref = gamma * d * S ** (d / rho - 2) / P2
    diag = []
    for j in range(n):
        rest = math.prod(x[k] ** 2 for k in range(n) if k != j)
        diag.append(a[j] ** (2 * rho) * x[j] ** (2 * rho) * rest)
    pairs = []
    for i in range(n):
        for j in range(i + 1, n):
            rest = math.prod(x[k] ** 2 for k in range(n) if k not in (i, j))
            pairs.append((a[i] * a[j] * x[i] * x[j]) ** rho * (x[i] ** 2 + x[j] ** 2) * rest)
    value = pref * ((d - 1) * math.fsum(diag) + (rho - 1) * math.fsum(pairs))
    scale = abs(pref) * (abs(d - 1) * math.fsum(diag) + abs(rho - 1) * math.fsum(pairs))
    return value, scale


EQ47_RTOL = 1e-6


def _c4_cells(spec: CheckSpec):
    out = []
    for i, d in enumerate(spec.grid["d"]):
        for j, rho in enumerate(spec.grid["rho"]):
            models = []
            for n in spec.grid["n"]:
                rng = _cell_rng(spec.seed, 4, i, j, int(n))
                models.append({"n": int(n), "a": _draw(rng, 0.5, 2.0, int(n))})
            out.append((f"d={d}, rho={rho}", {"d": d, "rho": rho, "gamma": 1.0, "models": models}))
    return out


def _c4_run(p: dict, spec: CheckSpec):
    observed_min = True
    details = {"by_n": []}
    worst_dev = 0.0
    for mp in p["models"]:
        m = CES(p["gamma"], p["d"], p["rho"], mp["a"])
        v = is_isotropic_minimal(m, spec.plan(m.n), spec.tol)
        observed_min = observed_min and v.holds
        dev = 0.0
        for x in sample_points(spec.plan(m.n, count=50)):
            direct = diff_bundle(m, x).hessian.trace()
            lit, scale = ces_laplacian_printed(p["gamma"], p["d"], p["rho"], mp["a"], x)
            denom = max(scale, abs(direct))
            dev = max(dev, abs(lit - direct) / denom if denom > 0 else abs(lit - direct))
        worst_dev = max(worst_dev, dev)
        details["by_n"].append({"n": m.n, "a": mp["a"], "minimal": _v(v), "printed_formula_max_rel_dev": dev})
    details["printed_formula_max_rel_dev"] = worst_dev
    return {"minimal": observed_min}, details


def _c4_summary(cells: list[CellResult]):
    devs = [c.details.get("printed_formula_max_rel_dev", 0.0) for c in cells if c.error is None]
    worst = max(devs, default=0.0)
    findings = []
    for c in cells:
        dev = c.details.get("printed_formula_max_rel_dev")
        if dev is not None and dev > EQ47_RTOL:
            findings.append(
                {
                    "check": "C4",
                    "cell": c.label,
                    "kind": "printed-formula-mismatch",
                    "max_rel_dev": dev,
                    "summary": "printed CES Laplacian disagrees with the direct Hessian trace",
                }
            )
    return {"printed_formula_max_rel_dev": worst, "printed_formula_rtol": EQ47_RTOL}, findings


# ---------------------------------------------------------------- C5 - C7


def _poly_label(coeffs: Sequence[float]) -> str:
    return nodes.to_text(polynomial(coeffs), names=["t"])


def _composite_degree(coeffs: Sequence[float], inner_degree: float) -> float | None:
    """Homogeneity degree of F(h) up to an additive constant, or None."""
    nz = [k for k, c in enumerate(coeffs) if c != 0 and k > 0]
    if len(nz) == 1:
        return nz[0] * inner_degree
    return None


def _is_affine(coeffs: Sequence[float]) -> bool:
    return all(c == 0 for c in coeffs[2:]) and len(coeffs) > 1 and coeffs[1] != 0


def _null_rc(m, spec: CheckSpec):
    v = has_null_relative_curvature(m, spec.plan(m.n), spec.tol)
    return {"null_relative_curvature": v.holds}, {"null_relative_curvature": _v(v)}


def _c5_cells(spec: CheckSpec):
    out = []
    for F in spec.grid["outer"]:
        for alpha in itertools.product(spec.grid["alpha"], repeat=2):
            out.append((f"F={_poly_label(F)}, alpha={list(alpha)}", {"outer": list(F), "alpha": list(alpha)}))
    for F, alpha in spec.grid.get("explore", []):
        out.append(
            (f"explore F={_poly_label(F)}, alpha={list(alpha)}", {"outer": list(F), "alpha": list(alpha), "explore": True})
        )
    return out


def _c5_expected(p: dict):
    if p.get("explore"):
        return None
    return {"null_relative_curvature": _is_affine(p["outer"]) and _is(sum(p["alpha"]), 1.0)}


def _c5_run(p: dict, spec: CheckSpec):
    m = Homothetic(polynomial(p["outer"]), CobbDouglas(1.0, p["alpha"]))
    obs, det = _null_rc(m, spec)
    if p.get("explore"):
        h = estimate_homogeneity_degree(m, spec.plan(m.n))
        det["composite_degree"] = h.to_dict()
    return obs, det


def _c5_summary(cells: list[CellResult]):
    findings = []
    for c in cells:
        if not c.report_only or c.error:
            continue
        holds = c.observed["null_relative_curvature"]
        literal = _is_affine(c.params["outer"]) and _is(sum(c.params["alpha"]), 1.0)
        deg = c.details.get("composite_degree", {}).get("degree")
        text = (
            f"null relative curvature {'holds' if holds else 'fails'}; the literal reading "
            f"'F and h both linear' predicts {'holds' if literal else 'fails'}"
        )
        if holds != literal:
            text += f"; F(h) is homogeneous of degree {deg:.12g}" if deg is not None else ""
        findings.append(
            {
                "check": "C5",
                "cell": c.label,
                "kind": "exploration",
                "observed": holds,
                "literal_prediction": literal,
                "agrees_with_literal_statement": holds == literal,
                "summary": text,
            }
        )
    return {}, findings


def _c6_cells(spec: CheckSpec):
    out = []
    for F in spec.grid["outer"]:
        for i, d in enumerate(spec.grid["d"]):
            for j, rho in enumerate(spec.grid["rho"]):
                models = []
                for n in spec.grid["n"]:
                    rng = _cell_rng(spec.seed, 6, i, j, int(n))
                    models.append({"n": int(n), "a": _draw(rng, 0.5, 2.0, int(n))})
                out.append(
                    (f"F={_poly_label(F)}, d={d}, rho={rho}", {"outer": list(F), "d": d, "rho": rho, "models": models})
                )
    return out


def _c6_expected(p: dict):
    deg = _composite_degree(p["outer"], p["d"])
    return {"null_relative_curvature": _is(p["rho"], 1.0) or (deg is not None and _is(deg, 1.0))}


def _c6_run(p: dict, spec: CheckSpec):
    holds = True
    details = {"by_n": []}
    for mp in p["models"]:
        m = Homothetic(polynomial(p["outer"]), CES(1.0, p["d"], p["rho"], mp["a"]))
        obs, det = _null_rc(m, spec)
        holds = holds and obs["null_relative_curvature"]
        details["by_n"].append({"n": mp["n"], "a": mp["a"], **det})
    return {"null_relative_curvature": holds}, details


def _inner_model(spec_inner: dict):
    kind = spec_inner["family"]
    if kind == "PerfectSubstitute":
        return PerfectSubstitute(spec_inner["a"])
    if kind == "CobbDouglas":
        return CobbDouglas(spec_inner.get("gamma", 1.0), spec_inner["alpha"])
    if kind == "CES":
        return CES(spec_inner.get("gamma", 1.0), spec_inner["d"], spec_inner["rho"], spec_inner["a"])
    raise SpecError(f"unknown inner family {kind!r}")


def _inner_degree(spec_inner: dict) -> float:
    return _inner_model(spec_inner).degree


def _inner_label(s: dict) -> str:
    args = ", ".join(f"{k}={v}" for k, v in s.items() if k != "family")
    return f"{s['family']}({args})"


def _c7_cells(spec: CheckSpec):
    out = []
    for inner in spec.grid["inner"]:
        for F in spec.grid["outer"]:
            out.append((f"F={_poly_label(F)}, h={_inner_label(inner)}", {"outer": list(F), "inner": dict(inner)}))
    return out


def _c7_expected(p: dict):
    deg = _composite_degree(p["outer"], _inner_degree(p["inner"]))
    linhom = deg is not None and _is(deg, 1.0)
    return {"null_relative_curvature": linhom or p["inner"]["family"] == "PerfectSubstitute"}


def _c7_run(p: dict, spec: CheckSpec):
    return _null_rc(Homothetic(polynomial(p["outer"]), _inner_model(p["inner"])), spec)


# -------------------------------------------------------------------- C8


def _c8_model(p: dict):
    if p["family"] == "CobbDouglas":
        return CobbDouglas(1.0, p["alpha"])
    if p["family"] == "PowerOfPerfectSubstitute":
        return Homothetic(nodes.power(nodes.var(1), p["k"]), PerfectSubstitute(p["c"]))
    if p["family"] == "Generic":
        return Generic(parse(p["f"], p["n"]), p["n"])
    raise SpecError(f"unknown C8 family {p['family']!r}")


def _c8_theorem_predicate(p: dict) -> bool:
    if p["family"] == "PowerOfPerfectSubstitute":
        return True
    if p["family"] == "CobbDouglas":
        return _is(sum(p["alpha"]), 1.0)
    return bool(p.get("declared_crs", False))


def _c8_cells(spec: CheckSpec):
    return [(c["label"], dict(c)) for c in spec.grid["cells"]]


def _c8_expected(p: dict):
    if p.get("report_only"):
        return None
    return {"flat": _c8_theorem_predicate(p)}


def _c8_run(p: dict, spec: CheckSpec):
    m = _c8_model(p)
    plan = spec.plan(m.n)
    coord = is_isotropic_flat(m, plan, spec.tol)
    observed = {"flat": coord.holds}
    details = {"flat": _v(coord)}
    if p.get("report_only"):
        rnd = is_isotropic_flat(m, plan, spec.tol, strategy="randomPlanes")
        observed["flat_random_planes"] = rnd.holds
        details["flat_random_planes"] = _v(rnd)
        details["homogeneity"] = estimate_homogeneity_degree(m, plan).to_dict()
    return observed, details


def _c8_summary(cells: list[CellResult]):
    findings = []
    for c in cells:
        if not c.report_only:
            continue
        if c.error:
            findings.append({"check": "C8", "cell": c.label, "kind": "exploration", "error": c.error})
            continue
        predicted = _c8_theorem_predicate(c.params)
        coord = c.observed["flat"]
        rnd = c.observed["flat_random_planes"]
        parts = [
            f"coordinatePairs: {'flat' if coord else 'not flat'}",
            f"randomPlanes: {'flat' if rnd else 'not flat'}",
            f"theorem predicate (CRS or power of perfect substitute): {predicted}",
        ]
        if coord != rnd:
            parts.append("plane strategies diverge")
        if coord != predicted:
            parts.append("coordinate-pair flatness disagrees with the theorem predicate")
        findings.append(
            {
                "check": "C8",
                "cell": c.label,
                "kind": "exploration",
                "theorem_predicts_flat": predicted,
                "coordinate_pairs_flat": coord,
                "random_planes_flat": rnd,
                "divergence": coord != rnd,
                "worst_coordinate_residual": c.details["flat"]["worst_residual"],
                "worst_random_plane_residual": c.details["flat_random_planes"]["worst_residual"],
                "summary": "; ".join(parts),
            }
        )
    return {}, findings


# -------------------------------------------------------------------- C9


def _c9_cells(spec: CheckSpec):
    return [(f, {"f": f}) for f in spec.grid["f"]]


def _c9_run(p: dict, spec: CheckSpec):
    m = Generic(parse(p["f"], 2), 2)
    plan = spec.plan(2)
    bi = is_isotropic_biharmonic(m, plan, spec.tol)
    mi = is_isotropic_minimal(m, plan, spec.tol)
    return {"biharmonic": bi.holds, "minimal": mi.holds}, {"biharmonic": _v(bi), "minimal": _v(mi)}


# --------------------------------------------------------------- registry

_POW_PS = [
    {"label": "(b) (2*x1+3*x2)^5", "family": "PowerOfPerfectSubstitute", "c": [2.0, 3.0], "k": 5},
    {"label": "(b) (x1+x2+x3)^2", "family": "PowerOfPerfectSubstitute", "c": [1.0, 1.0, 1.0], "k": 2},
    {"label": "(b) (x1+2*x2+x3+x4)^0.5", "family": "PowerOfPerfectSubstitute", "c": [1.0, 2.0, 1.0, 1.0], "k": 0.5},
]

_C8_CELLS = (
    [{"label": f"(a) CD alpha=[{a}, {1 - a}]", "family": "CobbDouglas", "alpha": [a, 1 - a]} for a in (0.25, 0.5, 0.75)]
    + _POW_PS
    + [
        {"label": f"(c) CD alpha={al}", "family": "CobbDouglas", "alpha": al}
        for al in ([1.0, 1.0], [0.5, 1.0], [1.5, 1.5], [1.0, 1.0, 1.0], [1.0, 0.5, 1.5])
    ]
    + [
        {
            "label": "(d) sqrt(x1^2+x2^2+x3^2)",
            "family": "Generic",
            "f": "sqrt(x1^2 + x2^2 + x3^2)",
            "n": 3,
            "declared_crs": True,
            "report_only": True,
        },
        {"label": "(e) CD alpha=[0.25, 0.25, 0.5]", "family": "CobbDouglas", "alpha": [0.25, 0.25, 0.5], "report_only": True},
        {"label": "(f) CD alpha=[0.5, 0.5, 0.5]", "family": "CobbDouglas", "alpha": [0.5, 0.5, 0.5], "report_only": True},
    ]
)

_REL = Tolerance(atol=1e-12, rtol=1e-8)

CHECKS: dict[str, _Check] = {
    "C1": _Check(
        "2-input linearly homogeneous: isotropic minimal iff perfect substitute",
        "f = x1*g(x2/x1): isotropic minimal iff g is affine; Lap f = -f_12 (x1^2+x2^2)/(x1 x2)",
        Tolerance(1e-8, 1e-8),
        {"g_degree": [1, 2, 3], "per_degree": [4]},
        _c1_cells,
        lambda p: {"minimal": p["g_degree"] <= 1, "euler_identity": True},
        _c1_run,
    ),
    "C2": _Check(
        "degree-2 counterexamples: isotropic minimal, not perfect substitutes",
        "x1*x2 and x1^2-x2^2 are harmonic but not perfect substitutes",
        Tolerance(1e-8, 1e-8),
        {"f": ["x1*x2", "x1^2 - x2^2"]},
        _c2_cells,
        lambda p: {"minimal": True, "perfect_substitute": False},
        _c2_run,
    ),
    "C3": _Check(
        "Cobb-Douglas isotropic minimality",
        "Cobb-Douglas is isotropic minimal iff every exponent equals 1",
        Tolerance(1e-8, 1e-8),
        {"alpha": [0.5, 1.0, 1.5], "n": [2, 3]},
        _c3_cells,
        lambda p: {"minimal": all(_is(a, 1.0) for a in p["alpha"])},
        _c3_run,
    ),
    "C4": _Check(
        "CES isotropic minimality",
        "CES is isotropic minimal iff d = rho = 1; printed Laplacian matches the Hessian trace",
        Tolerance(1e-8, 1e-8),
        {"d": [0.5, 1.0, 1.5, 2.0], "rho": [0.5, 1.0, 1.5, 2.0], "n": [2, 3]},
        _c4_cells,
        lambda p: {"minimal": _is(p["d"], 1.0) and _is(p["rho"], 1.0)},
        _c4_run,
        _c4_summary,
    ),
    "C5": _Check(
        "homothetic with Cobb-Douglas inner: null relative curvature",
        "F(h), h Cobb-Douglas: det D^2 f = 0 iff F(t) = a t + b and h has degree 1",
        _REL,
        {
            "outer": [[0.0, 1.0], [1.0, 2.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0, 1.0], [0.0, 1.0, 1.0]],
            "alpha": [0.5, 1.0, 1.5],
            "explore": [[[0.0, 0.0, 1.0], [0.25, 0.25]]],
        },
        _c5_cells,
        _c5_expected,
        _c5_run,
        _c5_summary,
    ),
    "C6": _Check(
        "homothetic with CES inner: null relative curvature",
        "F(h), h CES: det D^2 f = 0 iff rho = 1 or F(h) has constant returns to scale",
        _REL,
        {"outer": [[0.0, 1.0], [0.0, 0.0, 1.0], [0.0, 1.0, 1.0]], "d": [0.5, 1.0, 2.0], "rho": [0.5, 1.0, 1.5, 2.0], "n": [2, 3]},
        _c6_cells,
        _c6_expected,
        _c6_run,
    ),
    "C7": _Check(
        "2-input homothetic: null relative curvature",
        "F(h(x,y)): det D^2 f = 0 iff f is linearly homogeneous or h is a perfect substitute",
        _REL,
        {
            "outer": [[0.0, 1.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0, 1.0]],
            "inner": [
                {"family": "PerfectSubstitute", "a": [1.0, 2.0]},
                {"family": "PerfectSubstitute", "a": [3.0, 1.0]},
                {"family": "CobbDouglas", "alpha": [0.5, 0.5]},
                {"family": "CobbDouglas", "alpha": [0.25, 0.25]},
                {"family": "CobbDouglas", "alpha": [0.5, 1.0]},
                {"family": "CES", "d": 1.0, "rho": 0.5, "a": [1.0, 2.0]},
                {"family": "CES", "d": 2.0, "rho": 0.5, "a": [1.0, 2.0]},
            ],
        },
        _c7_cells,
        _c7_expected,
        _c7_run,
    ),
    "C8": _Check(
        "isotropic flatness of homogeneous functions",
        "homogeneous f is isotropic flat iff it has constant returns to scale or is a power of a perfect substitute",
        _REL,
        {"cells": _C8_CELLS},
        _c8_cells,
        _c8_expected,
        _c8_run,
        _c8_summary,
    ),
    "C9": _Check(
        "biharmonic but not harmonic",
        "x1^3*x2 is isotropically biharmonic and not isotropic minimal",
        Tolerance(1e-9, 1e-6),
        {"f": ["x1^3*x2"]},
        _c9_cells,
        lambda p: {"biharmonic": True, "minimal": False},
        _c9_run,
    ),
}


def builtin_spec(check_id: str, **overrides) -> CheckSpec:
    check_id = check_id.upper()
    if check_id not in CHECKS:
        raise SpecError(f"unknown check {check_id!r}; expected one of {', '.join(CHECK_IDS)}")
    grid = {k: list(v) for k, v in CHECKS[check_id].default_grid.items()}
    grid.update(overrides.pop("grid", None) or {})
    return CheckSpec(check_id, grid, **overrides)


def run_check(spec: CheckSpec) -> VerificationReport:
    """Evaluate every cell in order; per-cell failures are recorded, not raised."""
    check = CHECKS[spec.check_id]
    results = []
    for i, (label, params) in enumerate(check.cells(spec)):
        try:
            expected = check.expected(params)
        except Exception as exc:  # noqa: BLE001
            raise SpecError(f"cell {label!r}: cannot evaluate expected pattern: {exc}") from exc
        try:
            observed, details = check.run(params, spec)
            error = None
        except Exception as exc:  # noqa: BLE001
            observed, details, error = {}, {}, f"{type(exc).__name__}: {exc}"
        results.append(CellResult(i, label, params, expected, observed, details, error))
    summary, findings = check.summarize(results) if check.summarize else ({}, [])
    keys = sorted({k for c in results for k in (c.expected or {})})
    summary = {**summary, "true_sets": {k: [c.label for c in results if c.observed.get(k)] for k in keys}}
    return VerificationReport(spec.check_id, check.title, check.statement, spec, results, findings, summary)


# ----------------------------------------------------------- config files


def parse_values(text: str) -> list:
    """``a,b,c`` or ``start:stop:step`` (inclusive) into a list of numbers."""
    text = text.strip()
    if ":" in text:
        parts = [float(p) for p in text.split(":")]
        if len(parts) != 3 or parts[2] <= 0:
            raise SpecError(f"bad range {text!r}; expected start:stop:step with step > 0")
        start, stop, step = parts
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + k * step, 12) for k in range(max(count, 0))]
    out = []
    for p in text.split(","):
        p = p.strip()
        if not p:
            continue
        try:
            out.append(float(p))
        except ValueError:
            out.append(p)
    return out


def read_config(path: str) -> dict[str, str]:
    """Flat ``key = value`` file; ``#`` starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise SpecError(f"{path}:{lineno}: expected 'key = value'")
            k, v = line.split("=", 1)
            out[k.strip().lower()] = v.strip()
    return out


_GRID_KEYS = {"alpha", "d", "rho", "n", "g_degree", "per_degree"}


def spec_from_config(cfg: dict[str, str]) -> CheckSpec:
    unknown = set(cfg) - _GRID_KEYS - {"check", "seed", "count", "lo", "hi", "atol", "rtol"}
    if unknown:
        raise SpecError(f"unknown config keys: {', '.join(sorted(unknown))}")
    if "check" not in cfg:
        raise SpecError("config needs a 'check' key")
    try:
        kw = {}
        for key, conv in (("seed", int), ("count", int), ("lo", float), ("hi", float)):
            if key in cfg:
                kw[key] = conv(cfg[key])
        grid = {k: parse_values(cfg[k]) for k in _GRID_KEYS & set(cfg)}
        spec = builtin_spec(cfg["check"], grid=grid, **kw)
        if "atol" in cfg or "rtol" in cfg:
            base = spec.tol
            spec = replace(
                spec, tolerance=Tolerance(float(cfg.get("atol", base.atol)), float(cfg.get("rtol", base.rtol)))
            )
    except ValueError as exc:
        raise SpecError(str(exc)) from exc
    for k in grid:
        if k not in CHECKS[spec.check_id].default_grid:
            raise SpecError(f"check {spec.check_id} has no grid axis {k!r}")
        if not grid[k]:
            raise SpecError(f"grid axis {k!r} is empty")
    return spec
