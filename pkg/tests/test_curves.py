import math

import pytest

from isoprod.curvature import normal_curvature
from isoprod.curves import (
    ArclengthTable,
    IrregularCurveError,
    TopViewCurve,
    curvature_along,
    frame_at,
    reparametrize,
)
from isoprod.expr import CES, CobbDouglas, Generic, PerfectSubstitute, evaluate, lower, parse

CIRCLE = ("2 + cos(u)", "2 + sin(u)")
R2 = 1 / math.sqrt(2)


def g(text, n=2):
    return Generic(parse(text, n), n)


def lifted(m, table, s):
    x = table.curve.point(table.u_of_s(s))
    return (*x, evaluate(lower(m), x))


def fd_second(m, table, s, h=1e-2):
    """Fourth-order central second difference of the lifted curve."""
    p = [lifted(m, table, s + k * h) for k in (-2, -1, 0, 1, 2)]
    return [(-a + 16 * b - 30 * c + 16 * d - e) / (12 * h**2) for a, b, c, d, e in zip(*p)]


# --------------------------------------------------------------- arclength


def test_straight_segment_length():
    t = reparametrize(TopViewCurve.parse(("2*u + 1", "1"), 0, 1))
    assert t.length == pytest.approx(2, rel=1e-14)
    for u in (0.0, 0.3, 0.71, 1.0):
        assert t.s_of_u(u) == pytest.approx(2 * u, abs=1e-14)


def test_half_circle_length():
    t = reparametrize(TopViewCurve.parse(CIRCLE, 0, math.pi))
    assert abs(t.length - math.pi) <= 1e-8


def test_diagonal_length():
    t = reparametrize(TopViewCurve.parse(("u", "u"), 1, 2))
    assert t.length == pytest.approx(math.sqrt(2), rel=1e-14)


def test_inverse_map_round_trips():
    t = reparametrize(TopViewCurve.parse(("1 + u^2", "2 + u^3"), 0.5, 2.0))
    for k in range(21):
        u = 0.5 + 1.5 * k / 20
        assert t.u_of_s(t.s_of_u(u)) == pytest.approx(u, abs=1e-12)


def test_irregular_top_view_is_reported():
    with pytest.raises(IrregularCurveError) as err:
        reparametrize(TopViewCurve.parse(("1 + u^2", "1 + u^2"), -1, 1))
    assert err.value.u == 0.0


def test_out_of_range_arclength():
    t = reparametrize(TopViewCurve.parse(("u", "u"), 1, 2))
    with pytest.raises(ValueError):
        t.u_of_s(2.0)
    with pytest.raises(ValueError):
        t.u_of_s(-0.1)


def test_curve_interval_validation():
    with pytest.raises(ValueError):
        TopViewCurve.parse(("u", "u"), 2, 1)


# ------------------------------------------------------------------- frames


def test_circle_frame_at_start():
    c = TopViewCurve.parse(CIRCLE, 0, 2 * math.pi)
    f = frame_at(g("x1*x2"), c, 0.0)
    assert f.t == pytest.approx((0, 1), abs=1e-14)
    assert f.kappa_g == pytest.approx(1, abs=1e-9)
    assert f.kappa_n == pytest.approx(0, abs=1e-14)
    assert f.kappa_s is None


def test_circle_frame_at_eighth_turn():
    c = TopViewCurve.parse(CIRCLE, 0, 2 * math.pi)
    f = frame_at(g("x1*x2"), c, math.pi / 4)
    assert f.t == pytest.approx((-R2, R2), abs=1e-9)
    assert f.kappa_n == pytest.approx(-1, abs=1e-9)


def test_line_on_plane_is_degenerate_branch():
    c = TopViewCurve.parse(("1 + u*0.7071067811865476", "1 + u*0.7071067811865476"), 0, 2)
    f = frame_at(PerfectSubstitute((1, 1)), c, 1.0)
    assert f.kappa_g == 0 and f.kappa_n == 0
    assert f.S == (0, 0, 1)
    assert f.kappa_s == 0


def test_line_kappa_s_is_second_derivative_of_height():
    # f = x1*x2 along x = (1 + s, 1): height 1 + s is linear, so kappa_s = 0;
    # along the diagonal the height is (1 + s/sqrt2)^2 with second derivative 1
    m = g("x1*x2")
    f1 = frame_at(m, TopViewCurve.parse(("1 + u", "1"), 0, 1), 0.5)
    f2 = frame_at(m, TopViewCurve.parse(("1 + u", "1 + u"), 0, 1), 0.5)
    assert f1.kappa_s == pytest.approx(0, abs=1e-14)
    assert f2.kappa_s == pytest.approx(1, abs=1e-12)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        frame_at(g("x1*x2*x3", 3), TopViewCurve.parse(CIRCLE, 0, 1), 0.1)


def test_constant_hessian_line_has_constant_normal_curvature():
    frames = curvature_along(g("x1^2 + 3*x1*x2 - x2^2"), TopViewCurve.parse(("1 + u", "1 + 2*u"), 0, 3), 7)
    assert max(f.kappa_n for f in frames) - min(f.kappa_n for f in frames) <= 1e-12


def test_stations_ascending_and_span_curve():
    c = TopViewCurve.parse(("1 + u^2", "2 + sin(u)"), 0.2, 2.0)
    frames = curvature_along(CobbDouglas(1, (0.3, 0.6)), c, 9)
    s = [f.s for f in frames]
    assert s[0] == 0 and s == sorted(s) and s[-1] == ArclengthTable(c).length
    with pytest.raises(ValueError):
        curvature_along(CobbDouglas(1, (0.3, 0.6)), c, 1)


# -------------------------------------------------------------- invariants

CURVES = [
    (("2 + cos(u)", "2 + sin(u)"), 0, 6.0),
    (("1 + u^2", "2 + sin(u)"), 0.2, 2.0),
    (("1 + u", "3 - u + u^2/5"), 0, 2),
    (("2 + 0.5*cos(u)", "2 + sin(u)", "1 + u/4"), 0, 5),
]
MODELS = {
    2: [g("x1*x2"), CobbDouglas(2, (0.3, 0.9)), CES(1, 1.5, 0.5, (1, 2))],
    3: [CobbDouglas(1, (0.5, 0.5, 0.5)), g("exp(0.2*x1)*x2 + x3^2", 3)],
}


def _cases():
    for coords, a, b in CURVES:
        for m in MODELS[len(coords)]:
            yield coords, a, b, m


@pytest.mark.parametrize("coords, a, b, m", list(_cases()))
def test_frame_invariants(coords, a, b, m):
    c = TopViewCurve.parse(coords, a, b)
    table = ArclengthTable(c)
    for f in curvature_along(m, c, 12)[1:-1]:
        assert math.hypot(*f.t) == pytest.approx(1, abs=1e-9)
        assert f.T[: len(f.t)] == f.t
        # Euclidean curvature of the top view from the raw u-derivatives
        v, acc = c.velocity(f.u), c.acceleration(f.u)
        sp2 = sum(p * p for p in v)
        cross2 = sp2 * sum(p * p for p in acc) - sum(p * q for p, q in zip(v, acc)) ** 2
        assert f.kappa_g == pytest.approx(math.sqrt(max(cross2, 0)) / sp2**1.5, abs=1e-6)
        if f.kappa_g > 0:
            assert abs(normal_curvature(m, f.X[:-1], f.t) - f.kappa_n) <= 1e-9 * (1 + abs(f.kappa_n))
        # X'' against a finite-difference second derivative of the lift
        fd = fd_second(m, table, f.s)
        recon = [f.kappa_g * S for S in f.S]
        recon[-1] += f.kappa_n
        if f.kappa_s is not None:
            recon[-1] = f.kappa_s
        assert max(abs(p - q) for p, q in zip(fd, recon)) <= 1e-6 * (1 + max(map(abs, recon)))
        # first derivative of the height along the curve
        h = 1e-5
        dh = (lifted(m, table, f.s + h)[-1] - lifted(m, table, f.s - h)[-1]) / (2 * h)
        assert dh == pytest.approx(f.T[-1], abs=1e-6 * (1 + abs(dh)))


def test_normal_curvature_depends_only_on_point_and_tangent():
    m = CES(1.1, 1.4, 0.7, (1, 2))
    # both curves pass through (2, 2) at u = 0 heading along (1, 1)/sqrt2
    c1 = TopViewCurve.parse(("2 + u", "2 + u"), -0.5, 0.5)
    c2 = TopViewCurve.parse(("2 + u + u^2", "2 + u - 3*u^2"), -0.2, 0.2)
    f1 = frame_at(m, c1, ArclengthTable(c1).s_of_u(0.0))
    f2 = frame_at(m, c2, ArclengthTable(c2).s_of_u(0.0))
    assert f1.X[:2] == pytest.approx((2, 2), abs=1e-12) and f2.X[:2] == pytest.approx((2, 2), abs=1e-12)
    assert f1.t == pytest.approx(f2.t, abs=1e-10)
    assert f1.kappa_n == pytest.approx(f2.kappa_n, abs=1e-8)
    assert f1.kappa_g == pytest.approx(0, abs=1e-10) and f2.kappa_g > 1


def test_frames_serialize():
    f = frame_at(g("x1*x2"), TopViewCurve.parse(CIRCLE, 0, 1), 0.5)
    d = f.to_dict()
    assert set(d) == {"s", "u", "X", "T", "t", "kappa_g", "S", "kappa_n", "kappa_s"}
