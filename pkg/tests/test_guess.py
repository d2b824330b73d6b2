from importlib import resources
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from catalix.dde import fixed_point_spec, load_dde, series_at_point
from catalix.guess import (TZ, bivariate_gcd, bound_b, certify, guess_algebraic, guess_ladder,
                           normalize_annihilator, residual_valuation)
from catalix.mpoly import MultiPoly, parse_poly

CUBIC = "81*t^2*z0^3 - 81*t^2*z0^2 + 18*t*z0^2 + 27*t^2*z0 - 66*t*z0 + z0 - 3*t^2 + 47*t - 1"
CATALAN = [comb(2 * n, n) // (n + 1) for n in range(30)]


def R(text):
    return parse_poly(text, TZ)


def corpus(name):
    return load_dde(resources.files("catalix").joinpath("data", name))


def test_guess_catalan_and_constant():
    assert guess_algebraic(CATALAN, 1, 2) == R("t*z0^2 - z0 + 1")
    assert guess_algebraic([1] + [0] * 9, 0, 1) == R("z0 - 1")


def test_guess_cubic():
    ser = series_at_point(corpus("3const.dde"), 20)[0]
    assert guess_algebraic(ser, 2, 3) == R(CUBIC)


def test_guess_fails_below_true_degree():
    assert guess_algebraic(CATALAN, 3, 1) is None


def test_guess_ladder():
    got, caps = guess_ladder(CATALAN)
    assert got == R("t*z0^2 - z0 + 1") and caps == (1, 2)


@settings(max_examples=25, deadline=None)
@given(st.integers(-5, 5), st.integers(1, 5), st.integers(-5, 5))
def test_guess_rational_series(a, b, c):
    # F = (1 + a t) / (1 - b t) satisfies (1 - b t) z0 - (1 + a t) = 0
    ser = [1] + [b ** (n - 1) * (b + a) for n in range(1, 12)]
    got = guess_algebraic(ser, 1, 1)
    assert got == normalize_annihilator(R(f"(1 - {b}*t)*z0 - 1 - ({a})*t"))


def test_certify_examples():
    cat = corpus("catalan.dde")
    ok = certify(R("t*z0^2 - z0 + 1"), cat, "probe", (1, 2))
    assert ok.status == "certified" and ok.rule_order == 4
    bad = certify(R("z0 - 2"), cat, "probe", (1, 2))
    assert bad.status == "refuted" and bad.order_checked == 1 and bad.valuation == 0
    cube = certify(R(CUBIC), corpus("3const.dde"), "probe", (2, 3))
    assert cube.status == "certified"


def test_certify_below_rule_is_inconclusive():
    c = certify(R(CUBIC), corpus("3const.dde"), "probe", (2, 3), order=11)
    assert c.status == "inconclusive" and c.rule_order == 12


def test_residual_valuation():
    assert residual_valuation(R("z0 - 1"), CATALAN[:10]) == 1
    assert residual_valuation(R("t*z0^2 - z0 + 1"), CATALAN[:10]) is None


@pytest.mark.parametrize("P,k,expected", [
    ("x + t*u", 1, 2),                    # delta = 2
    ("x + t*u*z0", 1, 12),                # delta = 3
    ("x*u*t*z0 + z1", 2, 648),            # delta = 4
])
def test_bound_b(P, k, expected):
    spec = fixed_point_spec("1", "x", k, 1)
    poly = parse_poly(P, ("x", "t", "u") + tuple(f"z{i}" for i in range(k)))
    assert bound_b(spec, poly) == expected


def test_normalization():
    r = normalize_annihilator(R("-6*z0^2*t + 6*z0 - 6"))
    assert r == R("t*z0^2 - z0 + 1")
    sq = normalize_annihilator(R("(t*z0^2 - z0 + 1)^2*(z0 - 1)"))
    assert sq == normalize_annihilator(R("(t*z0^2 - z0 + 1)*(z0 - 1)"))


def test_bivariate_gcd():
    a = R("(t*z0^2 - z0 + 1)*(z0 + t)")
    b = R("(t*z0^2 - z0 + 1)*(z0 - 3*t + 1)")
    assert bivariate_gcd(a, b) == R("t*z0^2 - z0 + 1")
