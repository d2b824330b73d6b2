"""Gröbner bases, saturation, elimination and multiplication matrices.

Monomials are packed into Python ints: the low fields hold the exponents, the
high fields hold the rows of the order's weight matrix, so comparing packed
ints compares monomials, multiplication is addition and a divisibility test
is one subtraction against guard bits.  Buchberger's algorithm runs with the
Gebauer-Möller criteria and sugar pair selection.
"""

from __future__ import annotations

import heapq
import itertools
import random
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .arith import UPoly, field_inv, to_field
from .mpoly import MonomialOrder, MultiPoly

FIELD_BITS = 16


class _Packer:
    def __init__(self, vars: Sequence[str], order: MonomialOrder, bits: int = FIELD_BITS):
        self.vars = tuple(vars)
        n = self.n = len(self.vars)
        self.bits = bits
        self.mask = (1 << bits) - 1
        rows = order.matrix(self.vars) if n else []
        if len(rows) != n:
            raise ValueError("order matrix is not square")
        self.units = []
        for i in range(n):
            u = 1 << (bits * i)
            for r, row in enumerate(rows):
                if row[i]:
                    u += row[i] << (bits * (2 * n - 1 - r))
            self.units.append(u)
        self.guard = sum(1 << (bits * f + bits - 1) for f in range(2 * n))
        self.shifts = [bits * i for i in range(n)]

    def pack(self, e) -> int:
        m = 0
        for d, u in zip(e, self.units):
            if d:
                m += d * u
        if m & self.guard:
            raise OverflowError("monomial degree exceeds packed field width")
        return m

    def unpack(self, m: int) -> tuple:
        mask = self.mask
        return tuple((m >> s) & mask for s in self.shifts)

    def divides(self, a: int, b: int) -> bool:
        g = self.guard
        return ((b | g) - a) & g == g

    def lcm(self, a: int, b: int) -> int:
        return self.pack(max(x, y) for x, y in zip(self.unpack(a), self.unpack(b)))

    def tdeg(self, m: int) -> int:
        return sum(self.unpack(m))

    def coprime(self, a: int, b: int) -> bool:
        return all(not (x and y) for x, y in zip(self.unpack(a), self.unpack(b)))


@dataclass
class GBStats:
    pairs: int = 0
    zero_reductions: int = 0
    d_cp: int = 0
    max_reducers: int = 0


class QuotientBasis:
    """Standard monomials of a zero-dimensional ideal, ascending in the order."""

    def __init__(self, monomials: list[tuple], packed: list[int]):
        self.monomials = monomials
        self.packed = packed
        self.dim = len(monomials)

    def __repr__(self):
        return f"QuotientBasis(dim={self.dim})"


class GroebnerBasis:
    """Reduced monic Gröbner basis with its order and field."""

    def __init__(self, gens: list[MultiPoly], order: MonomialOrder, vars, p,
                 stats: GBStats | None = None, _internal=None):
        self.gens = gens
        self.order = order
        self.vars = tuple(vars)
        self.p = p
        self.stats = stats or GBStats()
        self._internal = _internal

    def __iter__(self):
        return iter(self.gens)

    def __len__(self):
        return len(self.gens)

    def __repr__(self):
        return f"GroebnerBasis({[str(g) for g in self.gens]}, {self.order})"

    @property
    def leading_monomials(self) -> list[tuple]:
        pk = self._engine().packer
        return [pk.unpack(lm) for lm, _, _ in self._internal]

    @property
    def shape(self) -> tuple:
        """Staircase signature used to vote out unlucky specializations."""
        return tuple(sorted(self.leading_monomials))

    def is_unit(self) -> bool:
        return len(self.gens) == 1 and self.gens[0].is_constant()

    def _engine(self) -> "_Engine":
        return _Engine(self.vars, self.order, self.p)

    def normal_form(self, f: MultiPoly) -> MultiPoly:
        eng = self._engine()
        d = eng.to_dict(f.with_vars(self.vars))
        return eng.to_poly(eng.reduce(d, self._internal)[0])

    def contains(self, f: MultiPoly) -> bool:
        return self.normal_form(f).is_zero()


class _Engine:
    def __init__(self, vars, order: MonomialOrder, p: int | None):
        self.vars = tuple(vars)
        self.order = order
        self.p = p
        self.packer = _Packer(self.vars, order)
        self.top_only = False
        self.selection = "sugar"

    def to_dict(self, f: MultiPoly) -> dict:
        pack = self.packer.pack
        p = self.p
        if p is None:
            return {pack(e): Fraction(c) for e, c in f.terms.items()}
        return {pack(e): c % p for e, c in f.terms.items()}

    def to_poly(self, terms) -> MultiPoly:
        unpack = self.packer.unpack
        out = {unpack(m): (to_field(c, None) if self.p is None else c) for m, c in terms}
        return MultiPoly._raw(out, self.vars, self.p)

    def monic(self, terms: list) -> tuple:
        """(lm, tail monomials, tail coefficients) of a monic polynomial."""
        lc = terms[0][1]
        p = self.p
        if p is None:
            inv = 1 / Fraction(lc)
            tail = [(m, c * inv) for m, c in terms[1:]]
        else:
            inv = pow(lc, -1, p)
            tail = [(m, c * inv % p) for m, c in terms[1:]]
        return (terms[0][0], [m for m, _ in tail], [c for _, c in tail])

    def reduce(self, d: dict, reducers: list, stats: GBStats | None = None,
               top_only: bool = False):
        """Reduction of ``d`` (consumed) by monic ``reducers``.

        Full reduction by default; ``top_only`` stops at the first irreducible
        leading term.  Returns (sorted descending term list, reduction steps).
        """
        p = self.p
        g = self.packer.guard
        heap = [-m for m in d]
        heapq.heapify(heap)
        out = []
        steps = 0
        pop, push = heapq.heappop, heapq.heappush
        while heap:
            m = -pop(heap)
            c = d.pop(m)
            if not c:
                continue
            mg = m | g
            for lm, tm, tc in reducers:
                if (mg - lm) & g == g:
                    s = m - lm
                    steps += 1
                    if not steps & 63 and _deadline is not None \
                            and time.monotonic() > _deadline:
                        raise ResourceLimit("time budget exhausted during a reduction")
                    if p is None:
                        for mm, cc in zip(tm, tc):
                            nm = mm + s
                            old = d.get(nm)
                            if old is None:
                                d[nm] = -c * cc
                                push(heap, -nm)
                            else:
                                d[nm] = old - c * cc
                    else:
                        for mm, cc in zip(tm, tc):
                            nm = mm + s
                            old = d.get(nm)
                            if old is None:
                                d[nm] = (-c * cc) % p
                                push(heap, -nm)
                            else:
                                d[nm] = (old - c * cc) % p
                    break
            else:
                if m & g:
                    raise OverflowError("monomial degree exceeds packed field width")
                out.append((m, c))
                if top_only:
                    rest = sorted(((mm, cc) for mm, cc in d.items() if cc), reverse=True)
                    out.extend(rest)
                    break
        if stats is not None and steps > stats.max_reducers:
            stats.max_reducers = steps
        return out, steps

    def spoly(self, a: tuple, b: tuple, lcm: int) -> dict:
        p = self.p
        d: dict = {}
        sa, sb = lcm - a[0], lcm - b[0]
        for mm, cc in zip(a[1], a[2]):
            d[mm + sa] = cc
        for mm, cc in zip(b[1], b[2]):
            nm = mm + sb
            v = d.get(nm, 0) - cc
            if p is not None:
                v %= p
            d[nm] = v
        return d

    def buchberger(self, polys: list[dict], stats: GBStats,
                   max_pairs: int | None = None) -> list[tuple]:
        pk = self.packer
        basis: list[tuple] = []   # monic (lm, tm, tc)
        sugar: list[int] = []
        active: list[int] = []
        pairs: list = []          # heap of (sugar, lcm, i, j)
        counter = itertools.count()

        def add(h_terms, s):
            h = self.monic(h_terms)
            basis.append(h)
            sugar.append(s)
            hi = len(basis) - 1
            lh = h[0]
            if lh == 0:
                return True
            # Gebauer-Möller update
            cands = [(gi, pk.lcm(lh, basis[gi][0])) for gi in active]
            keep = []
            for idx, (gi, l1) in enumerate(cands):
                if pk.coprime(lh, basis[gi][0]):
                    keep.append((gi, l1, True))
                    continue
                dominated = False
                for jdx, (gj, l2) in enumerate(cands):
                    if jdx != idx and pk.divides(l2, l1) and (l2 != l1 or jdx < idx):
                        dominated = True
                        break
                if not dominated:
                    keep.append((gi, l1, False))
            newpairs = []
            for gi, l1, cop in keep:
                if cop:
                    continue
                s2 = max(sugar[gi] - pk.tdeg(basis[gi][0]), s - pk.tdeg(lh)) + pk.tdeg(l1)
                newpairs.append((s2 if self.selection == "sugar" else l1, l1, next(counter), gi, hi))
            old = []
            for pr in pairs:
                _, l12, _, i, j = pr
                if pk.divides(lh, l12) and pk.lcm(basis[i][0], lh) != l12 \
                        and pk.lcm(basis[j][0], lh) != l12:
                    continue
                old.append(pr)
            pairs[:] = old + newpairs
            heapq.heapify(pairs)
            active[:] = [gi for gi in active if not pk.divides(lh, basis[gi][0])]
            active.append(hi)
            return False

        def reducers():
            return [basis[i] for i in active]

        polys = sorted((f for f in polys if f), key=lambda f: max(f))
        for f in polys:
            s = max(pk.tdeg(m) for m in f)
            r, _ = self.reduce(dict(f), reducers(), stats, self.top_only)
            if r:
                if add(r, s):
                    return [basis[-1]]
        while pairs:
            s, l, _, i, j = heapq.heappop(pairs)
            stats.pairs += 1
            if max_pairs is not None and stats.pairs > max_pairs:
                raise ResourceLimit(f"critical pair budget {max_pairs} exhausted")
            if _deadline is not None and time.monotonic() > _deadline:
                raise ResourceLimit("time budget exhausted inside a Groebner basis computation")
            stats.d_cp = max(stats.d_cp, pk.tdeg(l))
            d = self.spoly(basis[i], basis[j], l)
            r, _ = self.reduce(d, reducers(), stats, self.top_only)
            if not r:
                stats.zero_reductions += 1
                continue
            if add(r, s):
                return [basis[-1]]
        return self.interreduce([basis[i] for i in active])

    def interreduce(self, polys: list[tuple]) -> list[tuple]:
        pk = self.packer
        polys = sorted(polys, key=lambda h: h[0])
        minimal = []
        for h in polys:
            if not any(pk.divides(g[0], h[0]) for g in minimal):
                minimal.append(h)
        out = []
        for idx, h in enumerate(minimal):
            others = minimal[:idx] + minimal[idx + 1:]
            d = dict(zip(h[1], h[2]))
            tail, _ = self.reduce(d, others)
            out.append((h[0], [m for m, _ in tail], [c for _, c in tail]))
        out.sort(key=lambda h: h[0], reverse=True)
        return out


class ResourceLimit(RuntimeError):
    """Raised when a computation exceeds a configured budget."""


_deadline: float | None = None


@contextmanager
def time_limit(seconds: float | None):
    """Make every basis computation in this block raise ResourceLimit after ``seconds``."""
    global _deadline
    old = _deadline
    if seconds is not None:
        new = time.monotonic() + seconds
        _deadline = new if old is None else min(old, new)
    try:
        yield
    finally:
        _deadline = old


def _common_vars(gens: Sequence[MultiPoly], extra=()) -> tuple:
    vars: tuple = ()
    for g in gens:
        vars = vars + tuple(v for v in g.vars if v not in vars)
    return vars + tuple(v for v in extra if v not in vars)


def _field_of(gens: Sequence[MultiPoly], p=None):
    ps = {g.p for g in gens}
    if len(ps) > 1:
        raise ValueError("generators over different fields")
    return ps.pop() if ps else p


def buchberger(gens: Sequence[MultiPoly], order: MonomialOrder,
               max_pairs: int | None = None, vars=None) -> GroebnerBasis:
    """Reduced Gröbner basis of ``gens`` under ``order``."""
    gens = list(gens)
    if vars is None:
        used = set()
        for g in gens:
            used.update(g.used_vars())
        missing = used - set(order.ranking)
        if missing:
            raise ValueError(f"order does not rank variables {sorted(missing)}")
        vars = order.ranking
    vars = tuple(vars)
    p = _field_of(gens)
    eng = _Engine(vars, order, p)
    stats = GBStats()
    internal = eng.buchberger([eng.to_dict(g.with_vars(vars)) for g in gens], stats, max_pairs)
    polys = [eng.to_poly([(h[0], 1)] + list(zip(h[1], h[2]))) for h in internal]
    return GroebnerBasis(polys, order, vars, p, stats, internal)


def _fresh(vars, base="w"):
    name = base
    i = 0
    while name in vars:
        i += 1
        name = f"{base}{i}"
    return name


def saturate(gens: Sequence[MultiPoly], h: MultiPoly, order: MonomialOrder | None = None,
             max_pairs: int | None = None) -> list[MultiPoly]:
    """Generators of (gens) : h^∞ via a Rabinowitsch variable."""
    if h.is_zero():
        raise ValueError("saturation by zero")
    gens = list(gens)
    vars = _common_vars(gens + [h])
    w = _fresh(vars)
    if order is None:
        order = MonomialOrder.grevlex(vars)
    p = _field_of(gens + [h])
    rab = MultiPoly.var(w, vars + (w,), p) * h.with_vars(vars + (w,)) - 1
    full = [g.with_vars(vars + (w,)) for g in gens] + [rab]
    sub = [(order.kind, order.ranking)] if order.kind != "block" else order.blocks
    border = MonomialOrder.block(("grevlex", [w]), *sub)
    gb = buchberger(full, border, max_pairs=max_pairs)
    return [g.with_vars(vars) for g in elimination_ideal(gb, set(vars))]


def elimination_ideal(gb: GroebnerBasis, keep) -> list[MultiPoly]:
    """G ∩ K[keep] for a basis whose order eliminates the other variables."""
    keep = set(keep)
    drop = [v for v in gb.vars if v not in keep]
    if not gb.order.eliminates(drop):
        raise ValueError(f"order {gb.order} does not eliminate {drop}")
    return [g for g in gb.gens if set(g.used_vars()) <= keep]


def is_zero_dim(gb: GroebnerBasis):
    """(True, QuotientBasis) when the quotient is finite dimensional."""
    lms = gb.leading_monomials
    n = len(gb.vars)
    if any(not any(e) for e in lms):
        return True, QuotientBasis([], [])
    for i in range(n):
        if not any(e[i] and sum(e) == e[i] for e in lms):
            return False, None
    pk = gb._engine().packer
    packed_lms = [lm for lm, _, _ in gb._internal]
    units = pk.units
    seen = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for m in frontier:
            for u in units:
                mm = m + u
                if mm in seen:
                    continue
                if any(pk.divides(l, mm) for l in packed_lms):
                    continue
                seen.add(mm)
                nxt.append(mm)
        frontier = nxt
    packed = sorted(seen)
    return True, QuotientBasis([pk.unpack(m) for m in packed], packed)


def mult_matrix(gb: GroebnerBasis, qb: QuotientBasis, f: MultiPoly):
    """Matrix of multiplication by f on the quotient (columns = images)."""
    if qb is None:
        raise ValueError("ideal is not zero-dimensional")
    eng = gb._engine()
    fd = eng.to_dict(f.with_vars(gb.vars))
    index = {m: i for i, m in enumerate(qb.packed)}
    n = qb.dim
    p = gb.p
    M = [[0] * n for _ in range(n)]
    for j, b in enumerate(qb.packed):
        d = {m + b: c for m, c in fd.items()}
        r, _ = eng.reduce(d, gb._internal)
        for m, c in r:
            M[index[m]][j] = c
    if p is not None:
        return np.array(M, dtype=np.int64).reshape(n, n)
    return M


def char_poly(M, p: int | None = None, var: str = "lambda") -> UPoly:
    """det(var·I − M) by reduction to Hessenberg form."""
    if p is not None:
        return _charpoly_mod(np.array(M, dtype=np.int64) % p, p, var)
    A = [[Fraction(x) for x in row] for row in M]
    n = len(A)
    for r in A:
        if len(r) != n:
            raise ValueError("matrix is not square")
    _hessenberg_exact(A)
    return _hess_charpoly([[A[i][j] for j in range(n)] for i in range(n)], None, var)


def _hessenberg_exact(A):
    n = len(A)
    for c in range(n - 2):
        piv = next((r for r in range(c + 1, n) if A[r][c] != 0), None)
        if piv is None:
            continue
        if piv != c + 1:
            A[piv], A[c + 1] = A[c + 1], A[piv]
            for row in A:
                row[piv], row[c + 1] = row[c + 1], row[piv]
        inv = 1 / A[c + 1][c]
        for r in range(c + 2, n):
            f = A[r][c] * inv
            if f:
                for j in range(n):
                    A[r][j] -= f * A[c + 1][j]
                for i in range(n):
                    A[i][c + 1] += f * A[i][r]


def _charpoly_mod(A: np.ndarray, p: int, var: str) -> UPoly:
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("matrix is not square")
    A = A.astype(object) if p >= 2**31 else A.copy()
    for c in range(n - 2):
        nz = np.nonzero(A[c + 1:, c])[0]
        if len(nz) == 0:
            continue
        piv = c + 1 + int(nz[0])
        if piv != c + 1:
            A[[piv, c + 1], :] = A[[c + 1, piv], :]
            A[:, [piv, c + 1]] = A[:, [c + 1, piv]]
        inv = pow(int(A[c + 1, c]), -1, p)
        fs = A[c + 2:, c] * inv % p
        rows = np.nonzero(fs)[0]
        for r in rows:
            f = int(fs[r])
            rr = c + 2 + int(r)
            A[rr, :] = (A[rr, :] - f * A[c + 1, :]) % p
            A[:, c + 1] = (A[:, c + 1] + f * A[:, rr]) % p
    H = [[int(x) for x in row] for row in A]
    return _hess_charpoly(H, p, var)


def _hess_charpoly(H, p, var) -> UPoly:
    n = len(H)
    polys = [UPoly([1], p, var)]
    lam = UPoly([0, 1], p, var)
    for m in range(n):
        pm = (lam - H[m][m]) * polys[m]
        prod = 1
        for i in range(m - 1, -1, -1):
            prod = prod * H[i + 1][i]
            if p is not None:
                prod %= p
            if not prod:
                break
            c = prod * H[i][m]
            if c:
                pm = pm - polys[i] * c
        polys.append(pm)
    return polys[n]


# ---------------------------------------------------------------------------
# Hermite quadratic forms


def power_sums(coeffs: list, n: int, one=1) -> list:
    """Fraction-free Newton sums S_j = a_d^j · s_j for j < n (coeffs a_0..a_d)."""
    d = len(coeffs) - 1
    ad = coeffs[d]
    adp = [one]
    for _ in range(max(n, d) + 1):
        adp.append(adp[-1] * ad)
    S = [one * d]
    for m in range(1, n):
        acc = one * 0
        if m <= d:
            acc = coeffs[d - m] * adp[m - 1] * m
        for j in range(1, min(m - 1, d) + 1):
            acc = acc + coeffs[d - j] * adp[j - 1] * S[m - j]
        S.append(-acc)
    return S


def hermite_matrix(g: UPoly) -> list[list]:
    """Hermite matrix [s_{i+j}] of a univariate polynomial with field coefficients."""
    d = g.degree
    if d < 1:
        raise ValueError("Hermite form needs positive degree")
    b = [c * field_inv(g.lc, g.p) for c in g.coeffs]
    if g.p is None:
        b = [Fraction(c) for c in b]
    s = power_sums(b, 2 * d - 1, Fraction(1) if g.p is None else 1)
    if g.p is not None:
        s = [x % g.p for x in s]
    return [[s[i + j] for j in range(d)] for i in range(d)]


def matrix_rank(M, p: int | None = None) -> int:
    A = [[Fraction(x) if p is None else x % p for x in row] for row in M]
    rank = 0
    rows = len(A)
    cols = len(A[0]) if rows else 0
    for c in range(cols):
        piv = next((r for r in range(rank, rows) if A[r][c] != 0), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        inv = field_inv(A[rank][c], p)
        for r in range(rows):
            if r != rank and A[r][c] != 0:
                f = A[r][c] * inv
                if p is not None:
                    f %= p
                A[r] = [x - f * y if p is None else (x - f * y) % p for x, y in zip(A[r], A[rank])]
        rank += 1
    return rank


def hermite_rank(g: UPoly) -> int:
    return matrix_rank(hermite_matrix(g), g.p)


@dataclass
class HermiteMinor:
    rows: tuple
    cols: tuple
    numerator: MultiPoly
    den_power: int


def _det(entries, rows, cols, one):
    """Cofactor expansion with memoisation on column subsets."""
    memo: dict = {}

    def rec(ri, cs):
        if ri == len(rows):
            return one
        key = (ri, cs)
        if key in memo:
            return memo[key]
        acc = one * 0
        sign = 1
        for idx, c in enumerate(cs):
            e = entries(rows[ri], c)
            if e:
                sub = rec(ri + 1, cs[:idx] + cs[idx + 1:])
                term = e * sub
                acc = acc + term if sign > 0 else acc - term
            sign = -sign
        memo[key] = acc
        return acc

    return rec(0, tuple(cols))


def hermite_minors(g: MultiPoly, i: int, var: str = "u", principal: bool = False
                   ) -> list[HermiteMinor]:
    """The i×i minors of the Hermite form of ``g`` in ``var``.

    Entries are s_{r+c} = S_{r+c}/lc^{r+c}; each minor is returned as the
    numerator det[S_{r+c}] together with the power of ``lc_var(g)`` dividing
    it.  Symmetry is used: only minors with rows <= cols are listed, and
    ``principal=True`` restricts to principal minors (a symmetric matrix has
    rank >= i iff some principal i×i minor is nonzero).
    """
    cs = g.coeffs_in(var)
    d = max(cs) if cs else -1
    if i < 1 or i > d:
        raise ValueError(f"minor size {i} exceeds degree {d}")
    zero = MultiPoly.zero(g.vars, g.p)
    coeffs = [cs.get(j, zero) for j in range(d + 1)]
    one = MultiPoly.const(1, g.vars, g.p)
    S = power_sums(coeffs, 2 * d - 1, one)
    subsets = list(itertools.combinations(range(d), i))
    out = []
    for ri, R in enumerate(subsets):
        for C in ([R] if principal else subsets[ri:]):
            num = _det(lambda r, c: S[r + c], R, C, one)
            out.append(HermiteMinor(R, C, num, sum(R) + sum(C)))
    return out


def random_combination(polys: Sequence[MultiPoly], rng: random.Random) -> MultiPoly:
    p = polys[0].p
    acc = MultiPoly.zero(polys[0].vars, p)
    for f in polys:
        c = rng.randrange(1, p) if p else rng.randrange(1, 1000)
        acc = acc + f * c
    return acc
