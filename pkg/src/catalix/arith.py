"""Exact scalar and univariate polynomial arithmetic.

Coefficient fields are the rationals (``p is None``, coefficients stored as
:class:`fractions.Fraction` or ``int``) or a word-sized prime field (``p`` an
odd prime, coefficients are ints in ``[0, p)``).
"""

from __future__ import annotations

import math
import random
from fractions import Fraction
from typing import Iterable, Sequence

PRIME_LO = 2**27
PRIME_HI = 2**31

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for b in _MR_BASES:
        x = pow(b, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def random_prime(rng: random.Random, lo: int = PRIME_LO, hi: int = PRIME_HI,
                 avoid: Iterable[int] = ()) -> int:
    avoid = set(avoid)
    while True:
        n = rng.randrange(lo + 1, hi) | 1
        if n not in avoid and is_prime(n):
            return n


class PrimeField:
    """The field Z/pZ; elements are plain ints in [0, p)."""

    def __init__(self, p: int):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p

    def __call__(self, v) -> int:
        if isinstance(v, Fraction):
            return v.numerator * pow(v.denominator, -1, self.p) % self.p
        return int(v) % self.p

    def inv(self, a: int) -> int:
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero in prime field")
        return pow(a, -1, self.p)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))

    def __repr__(self):
        return f"GF({self.p})"


def to_field(v, p: int | None):
    """Map a rational (int or Fraction) into the field selected by ``p``."""
    if p is None:
        if isinstance(v, Fraction):
            return int(v) if v.denominator == 1 else v
        return v
    if isinstance(v, Fraction):
        return v.numerator * pow(v.denominator, -1, p) % p
    return v % p


def field_inv(a, p: int | None):
    if p is None:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return Fraction(1) / a
    return pow(a, -1, p)


# ---------------------------------------------------------------------------
# CRT and rational reconstruction


class CrtAccumulator:
    """Incremental Chinese remaindering of integer vectors.

    ``combined`` holds representatives in ``[0, modulus)``.
    """

    def __init__(self):
        self.residues: list[tuple[int, list[int]]] = []
        self.modulus = 1
        self.combined: list[int] | None = None

    def add(self, p: int, values: Sequence[int]):
        if math.gcd(p, self.modulus) != 1:
            raise ValueError("non-coprime moduli")
        values = [v % p for v in values]
        self.residues.append((p, values))
        if self.combined is None:
            self.combined = list(values)
            self.modulus = p
            return
        if len(values) != len(self.combined):
            raise ValueError("residue vectors of different lengths")
        m = self.modulus
        m_inv = pow(m, -1, p)
        self.combined = [c + m * ((v - c) * m_inv % p)
                         for c, v in zip(self.combined, values)]
        self.modulus = m * p


def crt_combine(residues: Sequence[tuple[int, int]]) -> tuple[int, int]:
    """Combine ``[(modulus, residue), ...]`` into ``(value, product)``."""
    seen = set()
    acc = CrtAccumulator()
    for m, r in residues:
        if m in seen:
            raise ValueError("non-coprime moduli")
        seen.add(m)
        acc.add(m, [r])
    if acc.combined is None:
        return 0, 1
    return acc.combined[0], acc.modulus


def rational_reconstruct(v: int, m: int) -> Fraction | None:
    """Return a/b with |a|, b <= sqrt(m/2) and a = v*b mod m, or None."""
    if m <= 1:
        raise ValueError("modulus must exceed 1")
    v %= m
    bound = math.isqrt(m // 2)
    r0, r1 = m, v
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound or math.gcd(s1, m) != 1:
        return None
    return Fraction(r1, s1)


def symmetric_mod(v: int, m: int) -> int:
    v %= m
    return v - m if v > m // 2 else v


# ---------------------------------------------------------------------------
# dense univariate polynomials

KARATSUBA_CUTOFF = 40


def _trim(c: list) -> list:
    while c and c[-1] == 0:
        c.pop()
    return c


def _school(a: Sequence, b: Sequence) -> list:
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return out


def _kara(a: Sequence, b: Sequence) -> list:
    if len(a) < KARATSUBA_CUTOFF or len(b) < KARATSUBA_CUTOFF:
        return _school(a, b)
    h = max(len(a), len(b)) // 2
    a0, a1 = a[:h], a[h:]
    b0, b1 = b[:h], b[h:]
    lo = _kara(a0, b0)
    hi = _kara(a1, b1) if a1 and b1 else []
    sa = [x + y for x, y in _zip_longest(a0, a1)]
    sb = [x + y for x, y in _zip_longest(b0, b1)]
    mid = _kara(sa, sb)
    for i, c in enumerate(lo):
        mid[i] -= c
    for i, c in enumerate(hi):
        mid[i] -= c
    out = [0] * (len(a) + len(b) - 1)
    for i, c in enumerate(lo):
        out[i] += c
    for i, c in enumerate(mid):
        if i + h < len(out):
            out[i + h] += c
    for i, c in enumerate(hi):
        out[i + 2 * h] += c
    return out


def _zip_longest(a, b):
    n = max(len(a), len(b))
    for i in range(n):
        yield (a[i] if i < len(a) else 0), (b[i] if i < len(b) else 0)


def poly_mul_coeffs(a: Sequence, b: Sequence, p: int | None = None) -> list:
    """Product of dense coefficient lists (lowest degree first)."""
    if not a or not b:
        return []
    out = _kara(a, b)
    if p is not None:
        out = [c % p for c in out]
    return _trim(out)


class UPoly:
    """Dense univariate polynomial, lowest degree coefficient first."""

    __slots__ = ("coeffs", "p", "var")

    def __init__(self, coeffs: Iterable = (), p: int | None = None, var: str = "x"):
        self.p = p
        self.var = var
        self.coeffs = _trim([to_field(c, p) for c in coeffs])

    @classmethod
    def _raw(cls, coeffs: list, p, var) -> "UPoly":
        obj = cls.__new__(cls)
        obj.coeffs = _trim(coeffs)
        obj.p = p
        obj.var = var
        return obj

    @classmethod
    def from_roots(cls, roots: Iterable, p=None, var="x") -> "UPoly":
        out = cls([1], p, var)
        for r in roots:
            out = out * cls([-r, 1], p, var)
        return out

    # -- basic properties --------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lc(self):
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, UPoly):
            return self.p == other.p and self.coeffs == other.coeffs
        if not self.coeffs:
            return other == 0
        return len(self.coeffs) == 1 and self.coeffs[0] == to_field(other, self.p)

    def __hash__(self):
        return hash((tuple(self.coeffs), self.p))

    def __repr__(self):
        return f"UPoly({self.coeffs!r}, p={self.p}, var={self.var!r})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mon = "" if i == 0 else (self.var if i == 1 else f"{self.var}^{i}")
            parts.append(_term_str(c, mon))
        return _join_terms(parts)

    def __getitem__(self, i):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    # -- arithmetic --------------------------------------------------------
    def _coerce(self, other) -> "UPoly":
        if isinstance(other, UPoly):
            if other.p != self.p:
                raise ValueError("polynomials over different fields")
            return other
        return UPoly([other], self.p, self.var)

    def _red(self, c):
        return c % self.p if self.p is not None else c

    def __add__(self, other):
        other = self._coerce(other)
        a, b = self.coeffs, other.coeffs
        out = [x + y for x, y in _zip_longest(a, b)]
        if self.p is not None:
            out = [c % self.p for c in out]
        return UPoly._raw(out, self.p, self.var)

    __radd__ = __add__

    def __neg__(self):
        return UPoly._raw([self._red(-c) for c in self.coeffs], self.p, self.var)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, UPoly):
            c = to_field(other, self.p)
            return UPoly._raw([self._red(x * c) for x in self.coeffs], self.p, self.var)
        other = self._coerce(other)
        return UPoly._raw(poly_mul_coeffs(self.coeffs, other.coeffs, self.p),
                          self.p, self.var)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = UPoly([1], self.p, self.var)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def scale(self, c) -> "UPoly":
        return self * c

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
            if self.p is not None:
                acc %= self.p
        return acc

    def derivative(self) -> "UPoly":
        return UPoly._raw([self._red(i * c) for i, c in enumerate(self.coeffs)][1:],
                          self.p, self.var)

    def monic(self) -> "UPoly":
        if not self.coeffs:
            return self
        return self * field_inv(self.lc, self.p)

    def divmod(self, other: "UPoly") -> tuple["UPoly", "UPoly"]:
        other = self._coerce(other)
        if not other.coeffs:
            raise ZeroDivisionError("polynomial division by zero")
        p = self.p
        r = list(self.coeffs)
        db = other.degree
        inv = field_inv(other.lc, p)
        if len(r) - 1 < db:
            return UPoly._raw([], p, self.var), UPoly._raw(r, p, self.var)
        q = [0] * (len(r) - db)
        b = other.coeffs
        for i in range(len(r) - 1, db - 1, -1):
            c = r[i]
            if c == 0:
                continue
            c = c * inv
            if p is not None:
                c %= p
            q[i - db] = c
            for j in range(db + 1):
                r[i - db + j] -= c * b[j]
                if p is not None:
                    r[i - db + j] %= p
        return UPoly._raw(q, p, self.var), UPoly._raw(r[:db], p, self.var)

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def exact_div(self, other) -> "UPoly":
        q, r = self.divmod(other)
        if r:
            raise ArithmeticError("inexact polynomial division")
        return q

    def gcd(self, other: "UPoly") -> "UPoly":
        a, b = self, self._coerce(other)
        while b:
            a, b = b, a % b
        return a.monic()

    def xgcd(self, other: "UPoly"):
        """Return (g, s, t) with s*self + t*other = g, g monic."""
        one = UPoly([1], self.p, self.var)
        zero = UPoly([], self.p, self.var)
        r0, r1, s0, s1, t0, t1 = self, other, one, zero, zero, one
        while r1:
            q, r = r0.divmod(r1)
            r0, r1 = r1, r
            s0, s1 = s1, s0 - q * s1
            t0, t1 = t1, t0 - q * t1
        if not r0:
            return r0, s0, t0
        inv = field_inv(r0.lc, self.p)
        return r0 * inv, s0 * inv, t0 * inv

    def squarefree_part(self) -> "UPoly":
        return upoly_squarefree_part(self)

    def content_normalized(self) -> "UPoly":
        """Integer primitive form with positive leading coefficient (rationals only)."""
        if self.p is not None:
            return self.monic()
        if not self.coeffs:
            return self
        den = 1
        for c in self.coeffs:
            den = den * Fraction(c).denominator // math.gcd(den, Fraction(c).denominator)
        ints = [int(Fraction(c) * den) for c in self.coeffs]
        g = 0
        for c in ints:
            g = math.gcd(g, c)
        if ints[-1] < 0:
            g = -g
        return UPoly([c // g for c in ints], None, self.var)


def _term_str(c, mon: str) -> str:
    c = Fraction(c)
    sign = "-" if c < 0 else "+"
    c = abs(c)
    if mon == "":
        body = str(c)
    elif c == 1:
        body = mon
    else:
        body = f"{c}*{mon}"
    return sign + body


def _join_terms(parts: list[str]) -> str:
    if not parts:
        return "0"
    first = parts[0]
    s = first[1:] if first[0] == "+" else "-" + first[1:]
    for part in parts[1:]:
        s += f" {part[0]} {part[1:]}"
    return s


# ---------------------------------------------------------------------------
# spec-level operations


def upoly_resultant(f: UPoly, g: UPoly):
    """Res(f, g) with the Sylvester-determinant sign convention."""
    if f.is_zero() and g.is_zero():
        raise ValueError("resultant of two zero polynomials")
    if f.p != g.p:
        raise ValueError("polynomials over different fields")
    if f.is_zero() or g.is_zero():
        return 0
    if f.p is None and all(Fraction(c).denominator == 1 for c in f.coeffs + g.coeffs):
        return _subresultant_int([int(c) for c in f.coeffs], [int(c) for c in g.coeffs])
    return _euclid_resultant(f, g)


def _euclid_resultant(f: UPoly, g: UPoly):
    p = f.p
    res = 1
    while True:
        m, n = f.degree, g.degree
        if n == 0:
            r = res * (g.lc ** m if p is None else pow(g.lc, m, p))
            return r % p if p is not None else to_field(r, None)
        r = f % g
        if r.is_zero():
            return 0
        l = r.degree
        sign = -1 if (m * n) % 2 else 1
        lcg = g.lc ** (m - l) if p is None else pow(g.lc, m - l, p)
        res = res * sign * lcg
        if p is not None:
            res %= p
        f, g = g, r


def _int_content(a: list[int]) -> int:
    g = 0
    for c in a:
        g = math.gcd(g, c)
    return g


def _subresultant_int(a: list[int], b: list[int]) -> int:
    # subresultant PRS over Z with content removal; Sylvester sign convention
    A, B = _trim(list(a)), _trim(list(b))
    ca, cb = _int_content(A), _int_content(B)
    A = [c // ca for c in A]
    B = [c // cb for c in B]
    dA, dB = len(A) - 1, len(B) - 1
    t = ca ** dB * cb ** dA
    s = 1
    if dA < dB:
        A, B = B, A
        dA, dB = dB, dA
        if dA * dB % 2:
            s = -1
    if dB == 0:
        return s * t * B[0] ** dA
    g = h = 1
    while True:
        dA, dB = len(A) - 1, len(B) - 1
        delta = dA - dB
        if dA % 2 and dB % 2:
            s = -s
        R = _prem(A, B)
        A = B
        if not R:
            return 0
        div = g * h ** delta
        B = [c // div for c in R]
        g = A[-1]
        h = g ** delta // h ** (delta - 1) if delta >= 1 else h
        if len(B) == 1:
            dA = len(A) - 1
            h = B[0] ** dA // h ** (dA - 1)
            return s * t * h


def _prem(a: list[int], b: list[int]) -> list[int]:
    """Pseudo-remainder lc(b)^(deg a - deg b + 1) * a mod b."""
    r = list(a)
    db = len(b) - 1
    lb = b[-1]
    e = len(a) - len(b) + 1
    while r and len(r) - 1 >= db:
        c = r[-1]
        shift = len(r) - 1 - db
        r = [x * lb for x in r]
        for j in range(db + 1):
            r[shift + j] -= c * b[j]
        r.pop()
        e -= 1
        _trim(r)
    if e > 0:
        r = [x * lb ** e for x in r]
    return r


def upoly_squarefree_part(f: UPoly) -> UPoly:
    """f / gcd(f, f'); monic over a prime field, integer-primitive over Q."""
    if f.is_zero():
        raise ValueError("squarefree part of zero")
    if f.degree == 0:
        return UPoly([1], f.p, f.var)
    g = f.gcd(f.derivative())
    out = f.exact_div(g)
    return out.monic() if f.p is not None else out.content_normalized()


def upoly_interpolate(points: Sequence[tuple], p: int | None = None, var: str = "x") -> UPoly:
    """Newton interpolation through ``[(node, value), ...]``."""
    xs = [to_field(x, p) for x, _ in points]
    if len(set(xs)) != len(xs):
        raise ValueError("repeated interpolation node")
    ys = [to_field(y, p) for _, y in points]
    n = len(xs)
    dd = list(ys)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            num = dd[i] - dd[i - 1]
            den = xs[i] - xs[i - j]
            if p is None:
                dd[i] = Fraction(num) / den
            else:
                dd[i] = num * pow(den, -1, p) % p
    out = UPoly([], p, var)
    for i in range(n - 1, -1, -1):
        out = out * UPoly([-xs[i], 1], p, var) + dd[i]
    return out


def ratfun_reconstruct(a: UPoly, m: UPoly, margin: int = 1):
    """Rational function reconstruction n/d = a mod m by maximal-quotient selection.

    Returns ``(n, d)`` with ``d`` monic, or None when no quotient of degree
    above ``margin`` shows up (not enough evaluation points yet).
    """
    p = a.p
    one = UPoly([1], p, a.var)
    zero = UPoly([], p, a.var)
    if a.is_zero():
        return zero, one
    r0, r1 = m, a % m
    t0, t1 = zero, one
    best = None
    best_q = -1
    while r1:
        q, r = r0.divmod(r1)
        if q.degree > best_q:
            best_q = q.degree
            best = (r1, t1)
        r0, r1 = r1, r
        t0, t1 = t1, t0 - q * t1
    # the initial pair (a, 1) is a candidate when a already has low degree
    if m.degree - a.degree - 1 > best_q:
        best_q = m.degree - a.degree - 1
        best = (a % m, one)
    if best is None or best_q <= margin:
        return None
    n, d = best
    if d.is_zero() or d.gcd(m).degree > 0:
        return None
    inv = field_inv(d.lc, p)
    return n * inv, d * inv
