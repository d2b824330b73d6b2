import random
from fractions import Fraction
from importlib import resources
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from catalix.arith import UPoly
from catalix.dde import (ModeError, TruncatedSeries, build_p, check_h1, divided_difference,
                         expand_series, fixed_point_spec, format_dde, load_dde, parse_dde,
                         residual_of_p, series_at_point, specialize_series)
from catalix.mpoly import MultiPoly, ParseError, parse_poly


def corpus(name):
    return load_dde(resources.files("catalix").joinpath("data", name))


def test_parse_3const():
    s = corpus("3const.dde")
    assert (s.k, s.a) == (2, 1)
    Q = parse_poly("u*(3*x - (u-1)*y1)*y1 + u*x^3 + u*y2", s.q_vars)
    assert s.Q.with_vars(s.q_vars) == Q
    assert s.f.constant_value() == 1


def test_parse_inline_and_errors():
    s = parse_dde("order: 1\npoint: 1\nf: 1\nQ: x^2*u\n")
    assert s.k == 1 and s.Q.degree("x") == 2
    with pytest.raises(ParseError) as info:
        parse_dde("order: 1\npoint: 1\nf: 1\nQ: x +\n")
    assert info.value.line == 4


def test_format_round_trip():
    s = corpus("3const.dde")
    again = parse_dde(format_dde(s))
    assert build_p(again) == build_p(s)


def test_long_running_tag():
    assert "long-running" in corpus("4const.dde").tags
    assert "long-running" not in corpus("3const.dde").tags


def test_build_p_3const():
    s = corpus("3const.dde")
    P = build_p(s)
    t, u, x = (MultiPoly.var(v, P.vars) for v in ("t", "u", "x"))
    assert P.degree("x") == 3
    target = t * u * x**3 * (u - 1) ** 2
    for e, c in target.terms.items():
        assert P.terms.get(e) in (c, -c)
    assert all(c.is_zero() for c in residual_of_p(P, s, 20))


def test_build_p_without_divided_differences():
    P = build_p(fixed_point_spec("1", "x", 1, 1))
    x, t = (MultiPoly.var(v, P.vars) for v in ("x", "t"))
    assert P in (x - 1 - t * x, 1 + t * x - x)


def test_build_p_minimal_u_power():
    P = build_p(fixed_point_spec("u", "y1", 1, 0))
    x, t, u, z0 = (MultiPoly.var(v, P.vars) for v in ("x", "t", "u", "z0"))
    expected = u * (x - u) - t * (x - z0)
    assert P in (expected, -expected)


def test_h1_examples():
    rep = check_h1(corpus("3const.dde"))
    assert rep.ok and rep.details["derivative"] == 1
    cat = check_h1(corpus("catalan.dde"))
    assert not cat.degree_ok
    assert cat.message() == "H1 violated: deg_u ∂_xP at t=0 is 0 < k = 1"
    assert check_h1(fixed_point_spec("u^2", "y2", 2, 0)).details["derivative"] == 1


def test_series_3const_and_catalan():
    assert series_at_point(corpus("3const.dde"), 5)[0] == [1, 1, 6, 54, 594]
    assert series_at_point(corpus("catalan.dde"), 6)[0] == [1, 1, 2, 5, 14, 42]
    F = expand_series(corpus("3const.dde"), 5)
    assert specialize_series(F, 1) == [1, 1, 6, 54, 594]


def test_series_q0_is_constant():
    assert series_at_point(corpus("q0.dde"), 4)[0] == [1, 0, 0, 0]
    F = expand_series(corpus("q0.dde"), 3)
    assert F.coeffs[0] == UPoly([0, 1], None, "u")


def test_tutte_series_against_closed_form():
    # rooted planar maps with n edges: 2*3^n*(2n)! / (n!(n+2)!)
    ser = series_at_point(corpus("tutte.dde"), 8)[0]
    assert ser == [2 * 3**n * comb(2 * n, n) // ((n + 1) * (n + 2)) for n in range(8)]


@pytest.mark.parametrize("m", [3, 4])
def test_constellation_series(m):
    name = f"{m}const.dde"
    ser = series_at_point(corpus(name), 6)[0]
    ref = [1] + [(m + 1) * m ** (n - 1) * comb(m * n, n)
                 // (((m - 1) * n + 2) * ((m - 1) * n + 1)) for n in range(1, 6)]
    assert ser == ref


def test_divided_difference_examples():
    F = TruncatedSeries([UPoly([0, 0, 1], None, "u")])
    assert divided_difference(F, 1, 1).coeffs[0] == UPoly([1, 1], None, "u")
    assert divided_difference(F, 1, 2).coeffs[0] == UPoly([1], None, "u")
    assert specialize_series(TruncatedSeries([UPoly([1], None, "u"),
                                              UPoly([1, 1], None, "u")]), 1) == [1, 2]


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.integers(-9, 9), max_size=5), min_size=1, max_size=4),
       st.integers(-3, 3))
def test_divided_difference_identity(rows, a):
    F = TruncatedSeries([UPoly(r, None, "u") for r in rows])
    D = divided_difference(F, a, 1)
    lin = UPoly([-a, 1], None, "u")
    for c, d in zip(F.coeffs, D.coeffs):
        assert d * lin + c(Fraction(a)) == c


def test_poly_mode_spec_rejects_expansion():
    s = parse_dde("order: 1\npoint: 1\nP: (u-1)*(x - 1) - t*u*(u-1)*x^2\n")
    assert s.mode == "poly"
    with pytest.raises(ModeError):
        expand_series(s, 3)
