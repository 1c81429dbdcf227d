import math

import numpy as np
import pytest

from helpers import random_pairs
from isoprod.calculus import diff_bundle
from isoprod.curvature import (
    RouteMismatchError,
    SampleDomainError,
    coordinate_minors,
    curvature_profile,
    extremal_normal_curvatures,
    has_null_relative_curvature,
    is_isotropic_biharmonic,
    is_isotropic_flat,
    is_isotropic_minimal,
    normal_curvature,
    plane_sectional,
    predicates_at,
    profile_from_bundle,
    random_planes,
    sectional_curvature,
)
from isoprod.expr import CES, CobbDouglas, Generic, Homothetic, PerfectSubstitute, parse, polynomial
from isoprod.expr.nodes import add, const, mul, substitute, var
from isoprod.numeric import SamplePlan, SymmetricMatrix, Tolerance, Xoshiro256, sample_points

R2 = 1 / math.sqrt(2)


def g(text, n=2):
    return Generic(parse(text, n), n)


# ----------------------------------------------------------------- profiles


def test_profile_of_product():
    p = curvature_profile(g("x1*x2"), (1, 1))
    assert p.principal_curvatures == (-1.0, 1.0)
    assert p.fundamental_curvatures == (0.0, -1.0)
    assert p.mean_curvature == 0.0 and p.relative_curvature == -1.0


def test_profile_of_saddle_is_constant():
    for x in sample_points(SamplePlan(2, 10)):
        p = curvature_profile(g("x1^2 - x2^2"), x)
        assert p.principal_curvatures == pytest.approx((-2, 2), abs=1e-14)
        assert p.fundamental_curvatures == pytest.approx((0, -4), abs=1e-13)


def test_profile_of_square_of_sum():
    p = curvature_profile(g("(x1 + x2)^2"), (1, 1))
    assert p.principal_curvatures == pytest.approx((0, 4), abs=1e-14)
    assert p.relative_curvature == pytest.approx(0, abs=1e-14)


def test_lifted_directions_carry_gradient_component():
    p = curvature_profile(g("x1*x2 + 3*x1"), (1, 2))
    for t, T in zip(p.principal_directions, p.lifted_directions):
        assert T[:2] == t
        assert T[2] == pytest.approx(t[0] * p.gradient[0] + t[1] * p.gradient[1])


def test_route_mismatch_is_raised(monkeypatch):
    from isoprod import curvature as cv

    monkeypatch.setattr(cv, "principal_minor_means", lambda H: [0.0, 0.5])
    with pytest.raises(RouteMismatchError):
        profile_from_bundle(diff_bundle(g("x1*x2"), (1, 1)))


def test_profile_routes_agree_on_random_models():
    for m, x in random_pairs(100, 31):
        p = curvature_profile(m, x)
        H = p.hessian
        tol = 1e-8 * (1 + H.max_abs() ** H.n)
        assert max(abs(a - b) for a, b in zip(p.fundamental_curvatures, p.minor_route)) <= tol


# ------------------------------------------------------ normal and sectional


@pytest.mark.parametrize("t, want", [((1, 0), 0), ((R2, R2), 1), ((R2, -R2), -1)])
def test_normal_curvature_examples(t, want):
    assert normal_curvature(g("x1*x2"), (1, 1), t) == pytest.approx(want, abs=1e-15)


def test_normal_curvature_requires_unit_direction():
    with pytest.raises(ValueError):
        normal_curvature(g("x1*x2"), (1, 1), (1, 1))


def test_coordinate_plane_sectional_is_minor():
    m = CES(1.3, 1.7, 0.6, (1, 2, 3))
    x = (0.7, 1.4, 2.2)
    H = diff_bundle(m, x).hessian
    e = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
    for j in range(3):
        for k in range(j + 1, 3):
            want = H[j, j] * H[k, k] - H[j, k] ** 2
            assert sectional_curvature(m, x, e[j], e[k]) == pytest.approx(want, rel=1e-12)


def test_square_of_sum_is_flat_on_any_plane():
    m = g("(x1 + x2)^2")
    for u, v in random_planes(2, 10, 4):
        assert sectional_curvature(m, (1.5, 0.5), u, v) == pytest.approx(0, abs=1e-12)


def test_product_sectional_on_coordinate_plane():
    for x in sample_points(SamplePlan(2, 5)):
        assert sectional_curvature(g("x1*x2"), x, (1, 0), (0, 1)) == -1


def test_sectional_rejects_non_orthonormal_planes():
    with pytest.raises(ValueError):
        sectional_curvature(g("x1*x2"), (1, 1), (1, 0), (R2, R2))


def test_random_planes_are_orthonormal_and_seeded():
    planes = random_planes(4, 20, 8)
    assert planes == random_planes(4, 20, 8)
    for u, v in planes:
        assert np.dot(u, u) == pytest.approx(1) and np.dot(v, v) == pytest.approx(1)
        assert abs(np.dot(u, v)) < 1e-12


# ------------------------------------------------------------- predicates


def test_minimal_examples():
    assert is_isotropic_minimal(CobbDouglas(1, (1, 1, 1))).holds
    assert is_isotropic_minimal(PerfectSubstitute((2.5, 0.3, 7))).holds
    v = is_isotropic_minimal(CES(1, 2, 2, (1, 1)))
    assert not v.holds and v.worst_residual == pytest.approx(4)


def test_null_relative_curvature_examples():
    assert has_null_relative_curvature(g("(x1 + x2)^2")).holds
    assert has_null_relative_curvature(CobbDouglas(1, (0.5, 0.5))).holds
    v = has_null_relative_curvature(g("x1*x2"))
    assert not v.holds and v.worst_residual == 1.0


@pytest.mark.parametrize("strategy", ["coordinatePairs", "randomPlanes"])
def test_power_of_perfect_substitute_is_flat(strategy):
    assert is_isotropic_flat(g("(2*x1 + 3*x2)^5"), strategy=strategy).holds


@pytest.mark.parametrize("a", [0.25, 0.5, 0.75])
def test_crs_cobb_douglas_is_coordinate_flat(a):
    assert is_isotropic_flat(CobbDouglas(1, (a, 1 - a))).holds


def test_product_is_not_flat():
    assert not is_isotropic_flat(g("x1*x2")).holds


def test_biharmonic_examples():
    m = g("x1^3*x2")
    assert is_isotropic_biharmonic(m).holds and not is_isotropic_minimal(m).holds
    assert is_isotropic_biharmonic(g("x1*x2")).holds
    assert not is_isotropic_biharmonic(g("x1^4")).holds


def test_verdict_carries_plan_and_tolerance():
    plan = SamplePlan(2, 7, 0.5, 2.0, 3)
    tol = Tolerance(1e-10, 1e-7)
    v = is_isotropic_minimal(g("x1*x2"), plan, tol)
    d = v.to_dict()
    assert d["plan"] == plan.to_dict() and d["tolerances"] == {"atol": 1e-10, "rtol": 1e-7}
    assert d["points_checked"] == 7 and len(d["worst_point"]) == 2


def test_worst_point_is_a_sample_point():
    plan = SamplePlan(2, 30, seed=8)
    v = is_isotropic_minimal(CobbDouglas(1, (0.5, 0.7)), plan)
    assert tuple(v.worst_point) in sample_points(plan)


def test_plan_dimension_must_match():
    with pytest.raises(ValueError):
        is_isotropic_minimal(g("x1*x2"), SamplePlan(3))


def test_domain_failure_names_the_sample_point():
    with pytest.raises(SampleDomainError) as err:
        is_isotropic_minimal(g("log(x1 - 1)*x2"), SamplePlan(2, 20))
    assert err.value.point is not None


def test_pointwise_predicates_at_a_crs_point():
    m = CobbDouglas(1, (0.5, 0.5))
    x = (1.7, 0.4)
    at = predicates_at(m, x)
    assert at["null_relative_curvature"]["holds"] and at["isotropic_flat"]["holds"]
    assert not at["isotropic_minimal"]["holds"]


# --------------------------------------------------------------- properties


def test_normal_curvature_bounded_by_principal_curvatures():
    rng = Xoshiro256(77)
    for m, x in random_pairs(30, 41):
        p = curvature_profile(m, x)
        lo, hi = p.principal_curvatures[0], p.principal_curvatures[-1]
        H = p.hessian
        vals = []
        for _ in range(1000):
            t = [rng.uniform(-1, 1) for _ in range(m.n)]
            r = math.sqrt(sum(v * v for v in t))
            vals.append(H.quadratic_form([v / r for v in t]))
        slack = 1e-8 * (1 + H.max_abs())
        assert lo - slack <= min(vals) and max(vals) <= hi + slack
        for kappa, t in zip(p.principal_curvatures, p.principal_directions):
            assert normal_curvature(m, x, t) == pytest.approx(kappa, abs=slack)


def test_sectional_on_eigenplanes_is_product_of_principal_curvatures():
    for m, x in random_pairs(30, 43):
        p = curvature_profile(m, x)
        k, t = p.principal_curvatures, p.principal_directions
        for j in range(m.n):
            for l in range(j + 1, m.n):
                got = plane_sectional(p.hessian, t[j], t[l])
                assert abs(got - k[j] * k[l]) <= 1e-8 * (1 + abs(k[j] * k[l])) * (1 + p.hessian.max_abs())


def test_extremal_normal_curvatures_on_plane():
    H = SymmetricMatrix.from_rows([[2, 1, 0], [1, -1, 0.5], [0, 0.5, 3]])
    u, v = (1, 0, 0), (0, 1, 0)
    lo, hi = extremal_normal_curvatures(H, u, v)
    assert (lo, hi) == pytest.approx(sorted(np.linalg.eigvalsh([[2, 1], [1, -1]])), abs=1e-12)


def test_rotation_invariance_of_spectrum():
    rng = Xoshiro256(5)
    base = parse("x1^3 + x1*x2^2 + exp(0.2*x1)*x2", 2)
    checked = 0
    while checked < 25:
        theta = rng.uniform(-math.pi, math.pi)
        c, s = math.cos(theta), math.sin(theta)
        y = (rng.uniform(0.5, 5), rng.uniform(0.5, 5))
        x = (c * y[0] + s * y[1], -s * y[0] + c * y[1])  # R^T y
        if min(x) <= 0.05:
            continue
        rotated = substitute(
            base,
            {
                1: add(mul(const(c), var(1)), mul(const(-s), var(2))),
                2: add(mul(const(s), var(1)), mul(const(c), var(2))),
            },
        )
        k_rot = curvature_profile(Generic(rotated, 2), x).principal_curvatures
        k_base = curvature_profile(Generic(base, 2), y).principal_curvatures
        assert k_rot == pytest.approx(k_base, abs=1e-8 * (1 + max(map(abs, k_base))))
        checked += 1


FLAT_MODELS = [
    CobbDouglas(2, (0.3, 0.7)),
    g("(x1 + 2*x2 + x3)^3", 3),
    g("(x1 + x2 + 3*x3 + x4)^0.5", 4),
    Homothetic(polynomial([0, 0, 1]), PerfectSubstitute((1, 2, 3))),
    CES(1, 2, 1, (1, 1, 2)),
]


@pytest.mark.parametrize("m", FLAT_MODELS, ids=range(len(FLAT_MODELS)))
def test_coordinate_flatness_implies_rank_one(m):
    plan = SamplePlan(m.n, 64)
    assert is_isotropic_flat(m, plan).holds
    for x in sample_points(plan):
        H = np.array(diff_bundle(m, x).hessian.rows())
        sv = np.linalg.svd(H, compute_uv=False)
        assert sv[1] <= 1e-8 * (1 + sv[0])
    assert is_isotropic_flat(m, plan, strategy="randomPlanes", planes=16).holds


def test_coordinate_flatness_without_rank_one_is_surfaced():
    # all 2x2 coordinate minors of (x1 x2 x3)^(1/2) vanish, yet the Hessian has full rank
    m = CobbDouglas(1, (0.5, 0.5, 0.5))
    plan = SamplePlan(3, 64)
    assert is_isotropic_flat(m, plan).holds
    x = sample_points(plan)[0]
    H = diff_bundle(m, x).hessian
    assert max(abs(v) for v in coordinate_minors(H)) <= 1e-12 * H.max_abs() ** 2
    assert np.linalg.matrix_rank(np.array(H.rows())) == 3
    assert not is_isotropic_flat(m, plan, strategy="randomPlanes").holds
