import itertools
import random
from collections import Counter
from fractions import Fraction

import pytest
import sympy

from catalix.arith import UPoly, upoly_interpolate
from catalix.groebner import (ResourceLimit, buchberger, char_poly, elimination_ideal,
                              hermite_minors, hermite_rank, is_zero_dim, mult_matrix, saturate,
                              time_limit)
from catalix.mpoly import MonomialOrder, MultiPoly

LEX = MonomialOrder.lex("x", "y")
GREVLEX = MonomialOrder.grevlex("x", "y")


def xy(p=None):
    return MultiPoly.gens(["x", "y"], p)


def test_buchberger_hand_example():
    x, y = xy()
    gb = buchberger([x**2 - 1, y - x], LEX)
    assert set(gb.gens) == {x - y, y**2 - 1}


def test_unit_and_principal():
    x, y = xy()
    assert buchberger([MultiPoly.const(1, ("x", "y"))], GREVLEX).is_unit()
    gb = buchberger([3 * x**2 * y - 6], GREVLEX)
    assert gb.gens == [x**2 * y - 2]


def test_saturation_examples():
    x, y = xy()
    assert saturate([x * y], y) == [x]
    assert buchberger(saturate([x**2], x), GREVLEX).is_unit()


def test_saturation_removes_the_parasite_branch():
    x, u, z0 = MultiPoly.gens(["x", "u", "z0"])
    order = MonomialOrder.grevlex("x", "u", "z0")
    gens = [(u - 1) * (x**2 - z0), (u - 1) * (x - u)]
    # the plane u = 1 survives in every fibre z0 = c until it is saturated away
    fibre = lambda G: buchberger([g.eval({"z0": 3}).with_vars(("x", "u")) for g in G],
                                 MonomialOrder.grevlex("x", "u"))
    assert is_zero_dim(fibre(gens))[0] is False
    J = saturate(gens, u - 1, order=order)
    zd, qb = is_zero_dim(fibre(J))
    assert zd and qb.dim == 2
    assert set(buchberger(J, order).gens) == set(buchberger([x**2 - z0, x - u], order).gens)


def test_elimination_examples():
    x, y = xy()
    gb = buchberger([x**2 - 1, y - x], LEX)
    assert elimination_ideal(gb, {"y"}) == [y**2 - 1]
    assert set(elimination_ideal(gb, {"x", "y"})) == set(gb.gens)


def test_zero_dim_examples():
    x, y = xy()
    zd, qb = is_zero_dim(buchberger([x**2 - 1, y - x], LEX))
    assert zd and qb.dim == 2
    assert is_zero_dim(buchberger([x * y], GREVLEX))[0] is False
    zd, qb = is_zero_dim(buchberger([MultiPoly.const(1, ("x", "y"))], GREVLEX))
    assert zd and qb.dim == 0


def test_mult_matrix_examples():
    x, y = xy()
    gb = buchberger([x**2 - 1, y - x], LEX)
    _, qb = is_zero_dim(gb)
    M = mult_matrix(gb, qb, y)
    assert char_poly(M, None, "y") == UPoly([-1, 0, 1], None, "y")
    assert all(v == 0 for row in mult_matrix(gb, qb, x - y) for v in row)
    one = mult_matrix(gb, qb, MultiPoly.const(1, ("x", "y")))
    assert one == [[1, 0], [0, 1]]


def test_char_poly_examples():
    assert char_poly([[1, 0], [0, 1]], None, "l") == UPoly([1, -2, 1], None, "l")
    assert char_poly([[0, -2], [1, 3]], None, "l") == UPoly([2, -3, 1], None, "l")
    assert char_poly([[0, 5], [1, 3]], 7, "l") == UPoly([2, 4, 1], 7, "l")


def test_pair_budget_and_deadline():
    x, y, z = MultiPoly.gens(["x", "y", "z"])
    gens = [x**3 - y * z + 1, y**3 - x * z, z**3 - x * y - 2]
    with pytest.raises(ResourceLimit):
        buchberger(gens, MonomialOrder.lex("x", "y", "z"), max_pairs=2)
    with pytest.raises(ResourceLimit), time_limit(0):
        buchberger(gens, MonomialOrder.lex("x", "y", "z"))


# --- Stickelberger: char poly of m_f lists f over the variety --------------

def random_zero_dim(rng, p):
    """Ideal of random points with distinct first coordinates, then a linear change of variables."""
    n = rng.randint(1, 3)
    names = ["x", "y", "z"][:n]
    npts = rng.randint(1, min(8, p - 1))
    firsts = rng.sample(range(p), npts)
    pts = [tuple([a] + [rng.randrange(p) for _ in range(n - 1)]) for a in firsts]
    X = MultiPoly.gens(names, p)
    g = MultiPoly.const(1, tuple(names), p)
    for a in firsts:
        g = g * (X[0] - a)
    gens = [g]
    for j in range(1, n):
        h = upoly_interpolate([(q[0], q[j]) for q in pts], p, names[0])
        gens.append(X[j] - MultiPoly.from_upoly(h, names[0], tuple(names)))
    if n > 1:
        # shear x -> x + c*y to mix the coordinates
        c = rng.randrange(1, p)
        gens = [f.eval({names[0]: X[0] + c * X[1]}) for f in gens]
        pts = [(q[0] - c * q[1],) + q[1:] for q in pts]
        pts = [(q[0] % p,) + q[1:] for q in pts]
    return names, gens, pts


def roots_with_multiplicity(f: UPoly, p: int) -> Counter:
    out = Counter()
    for r in range(p):
        lin = UPoly([-r, 1], p, f.var)
        while f.degree > 0 and f(r) == 0:
            f = f.exact_div(lin)
            out[r] += 1
    return out


@pytest.mark.parametrize("seed", range(50))
def test_stickelberger(seed):
    rng = random.Random(seed)
    p = rng.choice([p for p in range(11, 100) if sympy.isprime(p)])
    names, gens, pts = random_zero_dim(rng, p)
    gb = buchberger(gens, MonomialOrder.grevlex(*names))
    zd, qb = is_zero_dim(gb)
    assert zd
    # exhaustive search for the variety over F_p
    variety = [pt for pt in itertools.product(range(p), repeat=len(names))
               if all(g.eval(dict(zip(names, pt))).is_zero() for g in gb.gens)]
    assert sorted(variety) == sorted(pts)
    X = MultiPoly.gens(names, p)
    f = sum((rng.randrange(p) * v for v in X), MultiPoly.const(rng.randrange(p), tuple(names), p))
    cp = char_poly(mult_matrix(gb, qb, f), p, "l")
    assert cp.degree == qb.dim == len(pts)
    vals = Counter(f.eval(dict(zip(names, pt))).constant_value() % p for pt in pts)
    assert roots_with_multiplicity(cp, p) == vals


# --- Hermite rank -------------------------------------------------------------

@pytest.mark.parametrize("seed", range(100))
def test_hermite_rank_counts_distinct_roots(seed):
    rng = random.Random(seed)
    u = sympy.Symbol("u")
    g = sympy.Integer(rng.randint(1, 5))
    deg = 0
    while deg < rng.randint(1, 6):
        if rng.random() < 0.5 or deg == 5:
            fac = u - sympy.Rational(rng.randint(-4, 4), rng.randint(1, 3))
            d = 1
        else:
            fac = u**2 + rng.randint(-3, 3) * u + rng.randint(-3, 3)
            d = 2
        g *= fac
        deg += d
    coeffs = [Fraction(int(c.p), int(c.q)) for c in sympy.Poly(g, u).all_coeffs()[::-1]]
    expected = sympy.degree(sympy.sqf_part(sympy.Poly(g, u)), u)
    assert hermite_rank(UPoly(coeffs, None, "u")) == expected


def test_hermite_minors_examples():
    u, z1 = MultiPoly.gens(["u", "z1"])
    g = (u - 1) ** 2 * (u - 2)
    assert any(not m.numerator.is_zero() for m in hermite_minors(g, 2, "u"))
    assert all(m.numerator.is_zero() for m in hermite_minors(g, 3, "u"))
    (m,) = hermite_minors(u**2 - z1, 2, "u")
    assert m.numerator.used_vars() == ("z1",) and m.numerator.degree("z1") == 1
    h = u**3 - 2 * u + 5
    (full,) = hermite_minors(h, 3, "u")
    disc = -4 * (-2) ** 3 - 27 * 5**2
    ratio = Fraction(full.numerator.constant_value()) / disc
    assert ratio != 0
