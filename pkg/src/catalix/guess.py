"""Algebraic guessing (Hermite-Padé) and certification of annihilators."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .arith import (CrtAccumulator, UPoly, random_prime, rational_reconstruct,
                    to_field)
from .dde import DdeSpec, build_p, series_at_point
from .mpoly import MonomialOrder, MultiPoly

TZ = ("t", "z0")
LEX_Z_T = MonomialOrder.lex("z0", "t")


class InsufficientPrecision(ValueError):
    pass


# ---------------------------------------------------------------------------
# bivariate helpers over Q (polynomials in z0 with coefficients in Q[t])


def _as_rows(R: MultiPoly, main: str, coef: str) -> dict[int, UPoly]:
    R = R.with_vars((coef, main)) if set(R.used_vars()) <= {coef, main} else None
    if R is None:
        raise ValueError(f"expected a polynomial in {coef}, {main}")
    rows: dict[int, list] = {}
    for (dc, dm), c in R.terms.items():
        row = rows.setdefault(dm, [])
        if len(row) <= dc:
            row.extend([0] * (dc + 1 - len(row)))
        row[dc] = c
    return {d: UPoly(r, R.p, coef) for d, r in rows.items()}


def _from_rows(rows: dict[int, UPoly], main: str, coef: str, p=None) -> MultiPoly:
    terms = {}
    for dm, up in rows.items():
        for dc, c in enumerate(up.coeffs):
            if c != 0:
                terms[(dc, dm)] = c
    return MultiPoly(terms, (coef, main), p)


def _content(rows: dict[int, UPoly]) -> UPoly:
    g = None
    for up in rows.values():
        if up.is_zero():
            continue
        g = up if g is None else g.gcd(up)
    return g


def _prem_rows(A: dict, B: dict) -> dict:
    da, db = max(A), max(B)
    lb = B[db]
    R = dict(A)
    for _ in range(da - db + 1):
        if not R:
            break
        dr = max(R)
        if dr < db:
            R = {d: c * lb for d, c in R.items()}
            continue
        lr = R[dr]
        new = {d: c * lb for d, c in R.items()}
        for d, c in B.items():
            key = d + dr - db
            new[key] = new.get(key, UPoly([], lb.p, lb.var)) - c * lr
        R = {d: c for d, c in new.items() if not c.is_zero()}
    return R


def _prim(rows: dict) -> dict:
    c = _content(rows)
    if c is None or c.degree == 0:
        lc = c.lc if c is not None else 1
        return {d: r.scale(1 / Fraction(lc)) if r.p is None else r.scale(pow(lc, -1, r.p))
                for d, r in rows.items()}
    return {d: r.exact_div(c) for d, r in rows.items()}


def bivariate_gcd(A: MultiPoly, B: MultiPoly, main: str = "z0", coef: str = "t") -> MultiPoly:
    """gcd in Q[coef][main] up to a unit (primitive part only, via primitive PRS)."""
    ra, rb = _as_rows(A, main, coef), _as_rows(B, main, coef)
    if not ra:
        return normalize_annihilator(B, squarefree=False) if rb else B
    if not rb:
        return normalize_annihilator(A, squarefree=False)
    ra, rb = _prim(ra), _prim(rb)
    if max(ra) < max(rb):
        ra, rb = rb, ra
    while rb:
        r = _prem_rows(ra, rb)
        ra, rb = rb, (_prim(r) if r else {})
    out = _from_rows(ra, main, coef, A.p)
    return normalize_annihilator(out, squarefree=False) if A.p is None else out


_CHECK_PRIME = 2147483647


def _already_reduced(rows: dict) -> bool:
    """Cheap modular test that rows are primitive and squarefree over Q(coef).

    Both properties can only be lost modulo p, so a positive answer is a proof
    once the leading coefficient survives the reduction.
    """
    p = _CHECK_PRIME
    top = max(rows)
    red = {d: UPoly([to_field(c, p) for c in r.coeffs], p, r.var) for d, r in rows.items()}
    if red[top].degree != rows[top].degree:
        return False
    g = None
    for r in red.values():
        if not r.is_zero():
            g = r if g is None else g.gcd(r)
    if g is None or g.degree > 0:
        return False
    rng = random.Random(top)
    for _ in range(3):
        t0 = rng.randrange(p)
        if red[top](t0) == 0:
            continue
        coeffs = [0] * (top + 1)
        for d, r in red.items():
            coeffs[d] = r(t0)
        f = UPoly(coeffs, p, "z")
        return f.gcd(f.derivative()).degree == 0
    return False


def squarefree_in(R: MultiPoly, main: str = "z0", coef: str = "t") -> MultiPoly:
    """Squarefree part of R in ``main`` over Q(coef), with the coef-content removed."""
    if R.p is None and R.degree(main) > 0 and _already_reduced(_as_rows(R, main, coef)):
        return R
    rows = _prim(_as_rows(R, main, coef))
    R = _from_rows(rows, main, coef, R.p)
    if R.degree(main) <= 0:
        return R
    g = bivariate_gcd(R, R.derive(main), main, coef)
    if g.degree(main) <= 0:
        return R
    q = _divide_rows(_as_rows(R, main, coef), _as_rows(g, main, coef))
    return _from_rows(q, main, coef, R.p)


def _divide_rows(A: dict, B: dict) -> dict:
    """Exact division in Q(coef)[main], result made primitive in Q[coef][main]."""
    db = max(B)
    lb = B[db]
    Q: dict = {}
    R = dict(A)
    while R and max(R) >= db:
        dr = max(R)
        # scale R by lb so the quotient term stays polynomial
        q = R[dr]
        R = {d: c * lb for d, c in R.items()}
        Q = {d: c * lb for d, c in Q.items()}
        shift = dr - db
        Q[shift] = Q.get(shift, UPoly([], lb.p, lb.var)) + q
        for d, c in B.items():
            key = d + shift
            R[key] = R.get(key, UPoly([], lb.p, lb.var)) - c * q
        R = {d: c for d, c in R.items() if not c.is_zero()}
    if R:
        raise ArithmeticError("inexact bivariate division")
    return _prim({d: c for d, c in Q.items() if not c.is_zero()})


def normalize_annihilator(R: MultiPoly, squarefree: bool = True) -> MultiPoly:
    """Integer-primitive, positive leading coefficient under lex(z0 > t)."""
    if R.is_zero():
        return R.with_vars(TZ) if set(R.used_vars()) <= set(TZ) else R
    R = R.with_vars(TZ)
    if squarefree and R.degree("z0") > 0:
        R = squarefree_in(R)
    return R.primitive(LEX_Z_T)


# ---------------------------------------------------------------------------
# guessing


def _series_powers_mod(series: Sequence[int], dz: int, sigma: int, p: int) -> list[list[int]]:
    s = [to_field(c, p) for c in series[:sigma]]
    pows = [[1] + [0] * (sigma - 1)]
    for _ in range(dz):
        prev = pows[-1]
        new = [0] * sigma
        for i, x in enumerate(prev):
            if x:
                for j in range(sigma - i):
                    new[i + j] += x * s[j]
        pows.append([v % p for v in new])
    return pows


def _min_relation_mod(series, dt: int, dz: int, sigma: int, p: int):
    """Kernel vector with the smallest leading monomial under lex(z0 > t).

    Columns (t^i z0^j) are scanned in increasing order; the first column
    depending on the earlier ones yields the minimal relation.
    """
    pows = _series_powers_mod(series, dz, sigma, p)
    cols = [(j, i) for j in range(dz + 1) for i in range(dt + 1)]
    basis: list = []   # (pivot row, vector, combination dict)
    for idx, (j, i) in enumerate(cols):
        vec = [0] * i + pows[j][: sigma - i]
        comb = {idx: 1}
        for prow, bvec, bcomb in basis:
            c = vec[prow]
            if c:
                vec = [(x - c * y) % p for x, y in zip(vec, bvec)]
                for key, val in bcomb.items():
                    comb[key] = (comb.get(key, 0) - c * val) % p
        piv = next((r for r, x in enumerate(vec) if x), None)
        if piv is None:
            return {cols[key]: val for key, val in comb.items() if val}
        inv = pow(vec[piv], -1, p)
        vec = [x * inv % p for x in vec]
        comb = {key: val * inv % p for key, val in comb.items()}
        basis.append((piv, vec, comb))
    return None


def guess_algebraic(series: Sequence, dt: int, dz: int, max_primes: int = 40,
                    seed: int = 0):
    """Smallest R(t, z0) with deg_t <= dt, deg_z0 <= dz annihilating the series.

    Returns a normalized MultiPoly over Q, or None when no relation exists
    within the caps (FAIL).
    """
    sigma = len(series)
    if sigma < (dt + 1) * (dz + 1) - 1:
        raise InsufficientPrecision("insufficient precision")
    rng = random.Random(seed)
    series = [Fraction(c) for c in series]
    den = 1
    for c in series:
        den = den * c.denominator // math.gcd(den, c.denominator)
    acc = CrtAccumulator()
    support = None
    primes: list[int] = []
    previous = None
    for _ in range(max_primes):
        p = random_prime(rng, avoid=primes)
        if den % p == 0:
            continue
        rel = _min_relation_mod(series, dt, dz, sigma, p)
        if rel is None:
            return None
        keys = tuple(sorted(rel))
        if support is None:
            support = keys
        elif keys != support:
            # unlucky prime: keep the smaller (more generic) relation
            if len(keys) < len(support) or max(keys) < max(support):
                acc, support, primes = CrtAccumulator(), keys, []
            else:
                continue
        primes.append(p)
        acc.add(p, [rel[key] for key in support])
        values = [rational_reconstruct(v, acc.modulus) for v in acc.combined]
        if any(v is None for v in values):
            continue
        cand = MultiPoly({(i, j): v for (j, i), v in zip(support, values)}, TZ)
        if cand == previous and _annihilates(cand, series):
            return normalize_annihilator(cand)
        previous = cand
    return None


def guess_ladder(series: Sequence, max_cap: int = 64, seed: int = 0):
    """Try caps (1,1), (1,2), (2,2), (2,4), ... until a relation appears."""
    dt, dz = 1, 1
    toggle = True
    while max(dt, dz) <= max_cap:
        if len(series) >= (dt + 1) * (dz + 1) + 1:
            R = guess_algebraic(series, dt, dz, seed=seed)
            if R is not None:
                return R, (dt, dz)
        else:
            return None, (dt, dz)
        if toggle:
            dz *= 2
        else:
            dt *= 2
        toggle = not toggle
    return None, (dt, dz)


def _annihilates(R: MultiPoly, series: Sequence) -> bool:
    return residual_valuation(R, series) is None


def residual(R: MultiPoly, series: Sequence) -> list:
    """R(t, s(t)) truncated at the series length (Horner in z0)."""
    sigma = len(series)
    rows = _as_rows(R.with_vars(TZ), "z0", "t")
    dz = max(rows) if rows else 0
    acc = [Fraction(0)] * sigma
    for j in range(dz, -1, -1):
        # acc = acc * s + row_j(t)
        new = [Fraction(0)] * sigma
        for i, x in enumerate(acc):
            if x:
                for k in range(sigma - i):
                    new[i + k] += x * series[k]
        row = rows.get(j)
        if row is not None:
            for i, c in enumerate(row.coeffs[:sigma]):
                new[i] += c
        acc = new
    return acc


def residual_valuation(R: MultiPoly, series: Sequence) -> int | None:
    """Index of the first nonzero coefficient of R(t, s(t)), None if none."""
    res = residual(R, series)
    return next((i for i, c in enumerate(res) if c != 0), None)


# ---------------------------------------------------------------------------
# certification


def bound_b(spec: DdeSpec, P: MultiPoly | None = None) -> int:
    """ceil(δ^k (δ-1)^(2k) / k!) with δ the total degree of P."""
    P = P if P is not None else build_p(spec)
    delta = P.degree()
    k = spec.k
    num = delta ** k * (delta - 1) ** (2 * k)
    f = math.factorial(k)
    return -(-num // f)


@dataclass
class Certificate:
    status: str              # certified | refuted | inconclusive
    order_checked: int
    rule_order: int
    mode: str
    bound_used: object
    valuation: int | None = None

    def to_dict(self) -> dict:
        return {"status": self.status, "order_checked": self.order_checked,
                "rule_order": self.rule_order, "mode": self.mode,
                "bound_used": self.bound_used, "residual_valuation": self.valuation}

    def __str__(self):
        s = f"{self.status} (mode {self.mode}, checked to t^{self.order_checked}, " \
            f"rule order {self.rule_order})"
        if self.valuation is not None:
            s += f", residual valuation {self.valuation}"
        return s


def rule_order(R: MultiPoly, mode: str, bound=None) -> int:
    R = R.with_vars(TZ)
    if mode == "bound":
        return bound * R.degree()
    if mode == "probe":
        dt, dz = bound
        return dt * R.degree("z0") + R.degree("t") * dz
    raise ValueError(f"unknown certification mode {mode!r}")


def certify(R: MultiPoly, spec: DdeSpec, mode: str = "probe", bound=None,
            order: int | None = None, series: Sequence | None = None) -> Certificate:
    """Check R(t, F(t,a)) = 0 mod t^(N+1) with N from the selected rule.

    ``mode="bound"`` uses N = b * deg R (b from :func:`bound_b` if ``bound``
    is None); ``mode="probe"`` uses N = d_t*deg_z0 R + deg_t R*d_z0 with
    ``bound=(d_t, d_z0)``.  An explicit ``order`` checks to that order and
    reports ``inconclusive`` if it is below the rule order.
    """
    if R.is_zero():
        raise ValueError("cannot certify the zero polynomial")
    if mode == "bound" and bound is None:
        bound = bound_b(spec)
    if mode == "probe" and bound is None:
        R2 = R.with_vars(TZ)
        bound = (R2.degree("t"), R2.degree("z0"))
    N = rule_order(R, mode, bound)
    check = N if order is None else order
    if series is None or len(series) < check + 1:
        series = series_at_point(spec, check + 1)[0]
    v = residual_valuation(R, list(series[: check + 1]))
    bound_json = list(bound) if isinstance(bound, tuple) else bound
    if v is not None:
        return Certificate("refuted", check, N, mode, bound_json, v)
    status = "certified" if check >= N else "inconclusive"
    return Certificate(status, check, N, mode, bound_json)
