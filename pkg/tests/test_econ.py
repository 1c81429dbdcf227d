import pytest

from isoprod.econ import (
    VanishingValueError,
    classify_family,
    econ_report,
    estimate_homogeneity_degree,
    euler_ratios,
    is_perfect_substitute,
    returns_to_scale,
)
from isoprod.expr import CES, CobbDouglas, Generic, Homothetic, PerfectSubstitute, lower, parse, polynomial
from isoprod.numeric import SamplePlan, Xoshiro256


def g(text, n=2):
    return Generic(parse(text, n), n)


def plan(n, count=128, seed=42):
    return SamplePlan(n, count, seed=seed)


# -------------------------------------------------------------- homogeneity


def test_ces_degree_is_d():
    h = estimate_homogeneity_degree(CES(1.5, 1.7, 0.4, (1, 2, 3)), plan(3))
    assert h.homogeneous and h.spread < 1e-9
    assert h.degree == pytest.approx(1.7, abs=1e-12)


def test_cobb_douglas_degree_is_exponent_sum():
    h = estimate_homogeneity_degree(CobbDouglas(2, (0.3, 0.45, 0.8)), plan(3))
    assert h.homogeneous and h.degree == pytest.approx(1.55, abs=1e-12)


def test_non_homogeneous_polynomial():
    h = estimate_homogeneity_degree(g("x1 + x2^2"), plan(2))
    assert not h.homogeneous and h.spread > 0.1


def test_euler_ratio_of_vanishing_value():
    with pytest.raises(VanishingValueError):
        euler_ratios(g("x1 - x2"), [(1.0, 1.0)])


@pytest.mark.parametrize("d, want", [(1.0, "constant"), (1.3, "increasing"), (0.6, "decreasing")])
def test_returns_to_scale(d, want):
    h = estimate_homogeneity_degree(CES(1, d, 0.5, (1, 1)), plan(2))
    assert returns_to_scale(h) == want


def test_returns_to_scale_of_non_homogeneous():
    assert returns_to_scale(estimate_homogeneity_degree(g("x1 + x2^2"), plan(2))) == "n/a"


def _draw(rng, n):
    kind = int(rng.random() * 3)
    if kind == 0:
        m = CobbDouglas(rng.uniform(0.5, 3), [rng.uniform(0.1, 1.5) for _ in range(n)])
        return m, m.degree
    if kind == 1:
        m = CES(rng.uniform(0.5, 3), rng.uniform(0.3, 2.5), rng.uniform(0.3, 2.5), [rng.uniform(0.5, 3) for _ in range(n)])
        return m, m.d
    m = PerfectSubstitute([rng.uniform(0.5, 3) for _ in range(n)])
    return m, 1.0


def test_declared_degree_recovered_on_100_draws():
    rng = Xoshiro256(2718)
    for k in range(100):
        m, d = _draw(rng, 2 + k % 3)
        h = estimate_homogeneity_degree(Generic(lower(m), m.n), plan(m.n, 32, seed=k))
        assert h.homogeneous and h.degree == pytest.approx(d, abs=1e-8)


def test_returns_to_scale_invariant_under_output_scaling():
    rng = Xoshiro256(99)
    for k in range(20):
        m, _ = _draw(rng, 2 + k % 2)
        c = rng.uniform(0.1, 10)
        base = estimate_homogeneity_degree(m, plan(m.n, 32))
        composed = Homothetic(polynomial([0, c]), m)
        h2 = estimate_homogeneity_degree(composed, plan(m.n, 32))
        assert h2.degree == pytest.approx(base.degree, abs=1e-9)
        assert returns_to_scale(h2) == returns_to_scale(base)


# ---------------------------------------------------------- perfect substitutes


def test_perfect_substitute_family():
    v = is_perfect_substitute(PerfectSubstitute((2, 3)), plan(2))
    assert v.yes and v.coefficients == pytest.approx((2, 3), abs=1e-12)


def test_ces_degenerates_to_perfect_substitute():
    v = is_perfect_substitute(CES(1, 1, 1, (2, 5)), plan(2))
    assert v.yes and v.coefficients == pytest.approx((2, 5), rel=1e-12)


def test_unit_cobb_douglas_is_not_perfect_substitute():
    assert not is_perfect_substitute(CobbDouglas(1, (1, 1)), plan(2)).yes


def test_affine_function_is_not_perfect_substitute():
    # zero Hessian but a nonzero intercept
    v = is_perfect_substitute(g("2*x1 + 3*x2 + 1"), plan(2))
    assert not v.yes and v.hessian_residual == 0


# ------------------------------------------------------------ fingerprinting


def test_classify_cobb_douglas_text():
    tag = classify_family(parse("3*x1^0.5*x2^0.5", 2), plan(2))
    assert tag.family == "CobbDouglas"
    assert tag.params["gamma"] == pytest.approx(3, rel=1e-10)
    assert tag.params["alpha"] == pytest.approx([0.5, 0.5], abs=1e-12)


def test_classify_perfect_substitute_text():
    tag = classify_family(parse("2*x1+3*x2", 2), plan(2))
    assert tag.family == "PerfectSubstitute" and tag.params["a"] == pytest.approx([2, 3])


def test_classify_generic_text():
    assert classify_family(parse("x1 + x2^2", 2), plan(2)).family == "Generic"


def test_classify_power_of_perfect_substitute():
    tag = classify_family(parse("(2*x1 + 3*x2)^5", 2), plan(2))
    assert tag.family == "PowerOfPerfectSubstitute"
    assert tag.params["d"] == pytest.approx(5, abs=1e-9)


def test_classify_recovers_ces_parameters():
    rng = Xoshiro256(314)
    for k in range(30):
        n = 2 + k % 3
        rho = rng.uniform(0.3, 2.5)
        if abs(rho - 1) < 0.25:
            rho += 0.5
        d = rng.uniform(0.3, 2.5)
        a = [rng.uniform(0.5, 3) for _ in range(n)]
        gamma = rng.uniform(0.5, 3)
        tag = classify_family(lower(CES(gamma, d, rho, a)), plan(n, 64, k), n)
        assert tag.family == "CES", (gamma, d, rho, a)
        p = tag.params
        assert p["rho"] == pytest.approx(rho, rel=1e-6)
        assert p["d"] == pytest.approx(d, rel=1e-6)
        # weights come back normalised to a_1 = 1, with gamma absorbing the scale
        want = [ai / a[0] for ai in a]
        assert p["a"] == pytest.approx(want, rel=1e-6)
        assert p["gamma"] == pytest.approx(gamma * a[0] ** d, rel=1e-6)


def test_classify_recovers_cobb_douglas_parameters():
    rng = Xoshiro256(2)
    for k in range(30):
        n = 2 + k % 3
        alpha = [rng.uniform(0.1, 1.5) for _ in range(n)]
        gamma = rng.uniform(0.5, 3)
        tag = classify_family(lower(CobbDouglas(gamma, alpha)), plan(n, 64, k), n)
        assert tag.family == "CobbDouglas"
        assert tag.params["alpha"] == pytest.approx(alpha, rel=1e-6)
        assert tag.params["gamma"] == pytest.approx(gamma, rel=1e-6)


def test_report_positivity_fraction():
    rep = econ_report(g("x1^2 - x2^2"), plan(2, 200))
    assert 0.3 < rep.positivity < 0.7
    d = rep.to_dict()
    assert d["homogeneity"]["verdict"] == "homogeneous" and d["returns_to_scale"] == "increasing"


def test_homothetic_square_is_homogeneous_of_degree_two():
    m = Homothetic(polynomial([0, 0, 1]), CobbDouglas(1, (0.5, 0.5)))
    h = estimate_homogeneity_degree(m, plan(2))
    assert h.homogeneous and h.degree == pytest.approx(2, abs=1e-12)
