"""Discrete differential equations of fixed-point type.

A fixed-point DDE reads ``F = f(u) + t*Q(F, D F, ..., D^k F, t, u)`` where
``D G = (G(t,u) - G(t,a))/(u - a)``.  In a problem file ``Q`` is written in
the variables ``x`` (for F), ``y1..yk`` (for the divided differences; ``D1..Dk``
are accepted aliases), ``t`` and ``u``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .arith import UPoly, poly_mul_coeffs
from .mpoly import MultiPoly, ParseError, parse_poly


class ModeError(ValueError):
    """Operation not available for the spec's mode."""


@dataclass
class DdeSpec:
    k: int
    a: Fraction
    f: MultiPoly | None = None
    Q: MultiPoly | None = None
    P: MultiPoly | None = None
    name: str = ""
    tags: list = field(default_factory=list)

    @property
    def mode(self) -> str:
        return "fixed" if self.Q is not None else "poly"

    @property
    def q_vars(self) -> tuple:
        return q_vars(self.k)

    @property
    def p_vars(self) -> tuple:
        return p_vars(self.k)


def q_vars(k: int) -> tuple:
    return ("x",) + tuple(f"y{i}" for i in range(1, k + 1)) + ("t", "u")


def p_vars(k: int) -> tuple:
    return ("x",) + tuple(f"z{i}" for i in range(k)) + ("t", "u")


def fixed_point_spec(f, Q, k: int, a=1, name: str = "") -> DdeSpec:
    """Spec from ``f`` (in u) and ``Q`` (in x, y1..yk, t, u), given as text or polynomials."""
    qv = q_vars(k)
    if isinstance(f, str):
        f = parse_poly(f, ("u",))
    if isinstance(Q, str):
        Q = parse_poly(Q, qv, symbols=_aliases(k, qv))
    if set(f.used_vars()) - {"u"}:
        raise ValueError("f may only involve u")
    extra = set(Q.used_vars()) - set(qv)
    if extra:
        raise ValueError(f"Q involves unknown variables {sorted(extra)}")
    return DdeSpec(k, Fraction(a), f.with_vars(("u",)), Q.with_vars(qv), None, name)


def _aliases(k: int, vars) -> dict:
    out = {f"D{i}": MultiPoly.var(f"y{i}", vars) for i in range(1, k + 1)}
    out["F"] = MultiPoly.var("x", vars)
    return out


# ---------------------------------------------------------------------------
# parsing

_KEY = re.compile(r"\s*([A-Za-z]+)\s*(?::|=|\s)\s*")


def parse_dde(text: str) -> DdeSpec:
    """Parse a problem file (``key: value`` lines, ``#`` comments, ``;`` separators)."""
    entries: dict[str, tuple] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        offset = 0
        for chunk in line.split(";"):
            col0 = offset + 1
            offset += len(chunk) + 1
            if not chunk.strip():
                continue
            m = _KEY.match(chunk)
            if not m:
                lead = len(chunk) - len(chunk.lstrip())
                raise ParseError("expected 'key: value'", lineno, col0 + lead)
            key = m.group(1)
            canon = {"name": "name", "order": "order", "k": "order", "point": "point",
                     "a": "point", "f": "f", "Q": "Q", "P": "P"}.get(key)
            if canon is None:
                raise ParseError(f"unknown key {key!r}", lineno, col0 + m.start(1))
            if canon in entries:
                raise ParseError(f"duplicate key {key!r}", lineno, col0 + m.start(1))
            entries[canon] = (chunk[m.end():].strip(), lineno, col0 + m.end())
    if "order" not in entries:
        raise ParseError("missing 'order'", 1, 1)
    val, ln, col = entries["order"]
    if not re.fullmatch(r"[+-]?\d+", val):
        raise ParseError("order must be a positive integer", ln, col)
    k = int(val)
    if k <= 0:
        raise ParseError("order must be a positive integer", ln, col)
    a = Fraction(1)
    if "point" in entries:
        val, ln, col = entries["point"]
        if not re.fullmatch(r"[+-]?\d+(/\d+)?", val.replace(" ", "")):
            raise ParseError("point must be a rational number", ln, col)
        a = Fraction(val.replace(" ", ""))
    name = entries.get("name", ("", 0, 0))[0]
    has_fixed = "Q" in entries or "f" in entries
    if has_fixed and "P" in entries:
        val, ln, col = entries["P"]
        raise ParseError("give either f and Q or P, not both", ln, col)
    if has_fixed:
        for key in ("f", "Q"):
            if key not in entries:
                raise ParseError(f"missing '{key}'", 1, 1)
        val, ln, col = entries["f"]
        f = parse_poly(val, ("u",), line=ln, col=col)
        qv = q_vars(k)
        val, ln, col = entries["Q"]
        Q = parse_poly(val, qv, line=ln, col=col, symbols=_aliases(k, qv))
        return DdeSpec(k, a, f, Q, None, name)
    if "P" not in entries:
        raise ParseError("missing 'f'/'Q' or 'P'", 1, 1)
    val, ln, col = entries["P"]
    P = parse_poly(val, p_vars(k), line=ln, col=col)
    if P.degree("x") <= 0:
        raise ParseError("P must involve x", ln, col)
    return DdeSpec(k, a, None, None, P, name)


def load_dde(path) -> DdeSpec:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    spec = parse_dde(text)
    if "long-running" in text.lower():
        spec.tags.append("long-running")
    return spec


def format_dde(spec: DdeSpec) -> str:
    lines = []
    if spec.name:
        lines.append(f"name: {spec.name}")
    lines += [f"order: {spec.k}", f"point: {spec.a}"]
    if spec.mode == "fixed":
        lines += [f"f: {spec.f}", f"Q: {spec.Q}"]
    else:
        lines.append(f"P: {spec.P}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# polynomial form


def _shift_u(poly: MultiPoly, shift) -> MultiPoly:
    """Substitute u -> u + shift."""
    if shift == 0:
        return poly
    u = MultiPoly.var("u", poly.vars, poly.p)
    return poly.eval({"u": u + shift})


def build_p(spec: DdeSpec) -> MultiPoly:
    """Polynomial form P(x, z0..z_{k-1}, t, u) of a fixed-point spec.

    ``z_j`` stands for the j-th u-derivative of F at u = a.  The power of
    (u - a) used to clear denominators is then made minimal.
    """
    if spec.mode == "poly":
        return spec.P
    k, a = spec.k, spec.a
    pv = p_vars(k)
    x = MultiPoly.var("x", pv)
    t = MultiPoly.var("t", pv)
    u = MultiPoly.var("u", pv)
    v = u - a
    # numerators of the divided differences: y_i = N_i / v^i
    N = []
    acc = x
    for i in range(1, k + 1):
        z = MultiPoly.var(f"z{i - 1}", pv)
        acc = acc - z * v ** (i - 1) * Fraction(1, math.factorial(i - 1))
        N.append(acc)
    Q = spec.Q.with_vars(spec.q_vars)
    yi = [Q.index(f"y{i}") for i in range(1, k + 1)]
    weight = max([sum((i + 1) * e[j] for i, j in enumerate(yi)) for e in Q.terms] + [k])
    vpows = [v ** i for i in range(weight + 1)]
    npows: dict = {}

    def npow(i, e):
        key = (i, e)
        if key not in npows:
            npows[key] = N[i] ** e
        return npows[key]

    ix, it, iu = Q.index("x"), Q.index("t"), Q.index("u")
    rhs = MultiPoly.zero(pv)
    for e, c in Q.terms.items():
        mono = MultiPoly._raw({_mono(pv, x=e[ix], t=e[it], u=e[iu]): c}, pv, None)
        w = 0
        for i, j in enumerate(yi):
            if e[j]:
                mono = mono * npow(i, e[j])
                w += (i + 1) * e[j]
        rhs = rhs + mono * vpows[weight - w]
    f = spec.f.with_vars(("u",)).with_vars(pv)
    P = vpows[weight] * (x - f) - t * rhs
    P = remove_u_content(P, a)
    return P.primitive()


def _mono(vars, **exps) -> tuple:
    return tuple(exps.get(v, 0) for v in vars)


def remove_u_content(P: MultiPoly, a) -> MultiPoly:
    """Divide P by the largest power of (u - a) dividing it."""
    Pv = _shift_u(P, a)
    iu = Pv.index("u")
    m = min(e[iu] for e in Pv.terms) if Pv.terms else 0
    if m == 0:
        return P
    out = {}
    for e, c in Pv.terms.items():
        ne = list(e)
        ne[iu] -= m
        out[tuple(ne)] = c
    return _shift_u(MultiPoly._raw(out, Pv.vars, Pv.p), -a)


# ---------------------------------------------------------------------------
# hypothesis H1


@dataclass
class H1Report:
    degree_ok: bool
    derivative_ok: bool | None
    details: dict

    @property
    def ok(self) -> bool:
        return self.degree_ok and self.derivative_ok is not False

    def message(self) -> str:
        d = self.details
        if not self.degree_ok:
            return (f"H1 violated: deg_u ∂_xP at t=0 is {d['degree']} < k = {d['k']}")
        if self.derivative_ok is False:
            return f"H1 violated: ∂_y{d['k']}Q vanishes at the initial point"
        if self.derivative_ok is None:
            return "H1 degree condition holds; derivative condition unknown (polynomial form)"
        return "H1 holds"


def check_h1(spec: DdeSpec, P: MultiPoly | None = None) -> H1Report:
    P = P if P is not None else build_p(spec)
    k, a = spec.k, spec.a
    d0 = P.derive("x").eval({"t": 0})
    deg = d0.degree("u")
    details = {"k": k, "degree": deg}
    degree_ok = deg >= k
    if spec.mode == "poly":
        details["derivative"] = "unknown"
        return H1Report(degree_ok, None, details)
    f = spec.f.to_upoly("u") if spec.f.terms else UPoly([], None, "u")
    vals = {"x": f(a), "t": 0, "u": a}
    g = f
    for i in range(1, k + 1):
        g = g.derivative()
        vals[f"y{i}"] = Fraction(g(a)) / math.factorial(i)
    dq = spec.Q.with_vars(spec.q_vars).derive(f"y{k}").eval(vals)
    value = dq.constant_value()
    details["derivative"] = value
    return H1Report(degree_ok, value != 0, details)


# ---------------------------------------------------------------------------
# series


class TruncatedSeries:
    """F mod t^sigma with coefficients in Q[u] (``coeffs[n]`` is a UPoly in u)."""

    def __init__(self, coeffs: Sequence[UPoly], sigma: int | None = None):
        self.coeffs = list(coeffs)
        self.sigma = len(self.coeffs) if sigma is None else sigma
        if len(self.coeffs) != self.sigma:
            raise ValueError("coefficient count does not match sigma")

    def __len__(self):
        return self.sigma

    def __getitem__(self, n):
        return self.coeffs[n]

    def __eq__(self, other):
        return isinstance(other, TruncatedSeries) and self.coeffs == other.coeffs

    def __repr__(self):
        return f"TruncatedSeries({[str(c) for c in self.coeffs]})"


def _taylor_shift(coeffs: Sequence, a) -> list:
    """Coefficients of g(v + a) from those of g(u)."""
    out = list(coeffs)
    n = len(out)
    if a == 0:
        return out
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            out[j] = out[j] + a * out[j + 1]
    return out


def _mul_trunc(a: list, b: list, L: int | None) -> list:
    if not a or not b:
        return []
    if L is not None:
        a = a[:L]
        b = b[:L]
    if len(a) > 40 and len(b) > 40:
        r = poly_mul_coeffs(a, b)
        return r[:L] if L is not None else r
    n = len(a) + len(b) - 1
    if L is not None:
        n = min(n, L)
    r = [0] * n
    for i, x in enumerate(a):
        if not x:
            continue
        top = min(len(b), n - i)
        for j in range(top):
            r[i + j] += x * b[j]
    return r


def _add_into(acc: list, b: list, c=1):
    if len(b) > len(acc):
        acc.extend([0] * (len(b) - len(acc)))
    for i, y in enumerate(b):
        if y:
            acc[i] += c * y


class _SeriesEngine:
    """Order-by-order expansion in the Taylor basis v = u - a.

    Coefficient n is kept modulo v^L_n with L_n = keep + k*(sigma-1-n), which
    is exactly what the divided differences of later orders can reach.
    ``keep = None`` keeps everything.
    """

    def __init__(self, spec: DdeSpec, sigma: int, keep: int | None):
        if spec.mode != "fixed":
            raise ModeError("series expansion requires fixed-point form")
        if sigma < 1:
            raise ValueError("sigma must be positive")
        self.spec = spec
        self.k = spec.k
        self.a = spec.a if spec.a.denominator != 1 else int(spec.a)
        self.sigma = sigma
        self.keep = keep
        Q = spec.Q.with_vars(spec.q_vars)
        ix = Q.index("x")
        iy = [Q.index(f"y{i}") for i in range(1, self.k + 1)]
        it, iu = Q.index("t"), Q.index("u")
        # group Q by its (x, y) monomial; each group carries sum c t^et (v+a)^eu
        groups: dict = {}
        for e, c in Q.terms.items():
            key = (e[ix],) + tuple(e[j] for j in iy)
            groups.setdefault(key, {}).setdefault(e[it], {})[e[iu]] = c
        self.groups = []
        for key, by_t in groups.items():
            tpolys = {}
            for et, us in by_t.items():
                deg = max(us)
                cu = [us.get(d, 0) for d in range(deg + 1)]
                tpolys[et] = [_c(x) for x in _taylor_shift(cu, self.a)]
            self.groups.append((key, tpolys))
        fu = spec.f.with_vars(("u",)).to_upoly("u")
        self.f = [_c(x) for x in _taylor_shift(list(fu.coeffs), self.a)]
        self.F: list[list] = []
        self.prod: dict = {}
        self._plan()

    def L(self, n: int):
        if self.keep is None:
            return None
        return max(self.keep + self.k * (self.sigma - 1 - n), 1)

    def _plan(self):
        # product nodes: exponent vector over (x, y1..yk) built incrementally
        nb = self.k + 1
        self.nodes: dict = {}
        order = []

        def need(e):
            if e in self.nodes or sum(e) <= 1:
                return
            j = next(i for i, d in enumerate(e) if d)
            prev = list(e)
            prev[j] -= 1
            prev = tuple(prev)
            need(prev)
            self.nodes[e] = (prev, j)
            order.append(e)

        for key, _ in self.groups:
            need(key)
        self.node_order = order
        self.node_vals = {e: [] for e in order}
        self.unit = {tuple(1 if i == j else 0 for i in range(nb)): j for j in range(nb)}

    def _base(self, j: int, m: int) -> list:
        # coefficient m of Delta^j F
        return self.F[m][j:]

    def _series_coeff(self, e, m):
        if sum(e) == 0:
            return [1] if m == 0 else []
        if sum(e) == 1:
            return self._base(self.unit[e], m)
        return self.node_vals[e][m]

    def run(self) -> list[list]:
        sigma = self.sigma
        self.F.append(self._trunc(list(self.f), self.L(0)))
        for n in range(1, sigma):
            m = n - 1
            Lp = self.L(n)
            for e in self.node_order:
                prev, j = self.nodes[e]
                acc: list = []
                for i in range(m + 1):
                    A = self._series_coeff(prev, i)
                    if not A:
                        continue
                    B = self._base(j, m - i)
                    if B:
                        _add_into(acc, _mul_trunc(A, B, Lp))
                self.node_vals[e].append(acc)
            new: list = []
            for key, tpolys in self.groups:
                for et, cu in tpolys.items():
                    idx = m - et
                    if idx < 0:
                        continue
                    s = self._series_coeff(key, idx)
                    if s:
                        _add_into(new, _mul_trunc(s, cu, Lp))
            self.F.append(self._trunc(new, Lp))
        return self.F

    @staticmethod
    def _trunc(c: list, L):
        c = c[:L] if L is not None else c
        while c and c[-1] == 0:
            c.pop()
        return c


def _c(x):
    x = Fraction(x)
    return int(x) if x.denominator == 1 else x


def _to_u_basis(vc: list, a) -> UPoly:
    return UPoly([_c(x) for x in _taylor_shift(vc, -a)], None, "u")


def expand_series(spec: DdeSpec, sigma: int) -> TruncatedSeries:
    """The unique solution F(t, u) mod t^sigma."""
    eng = _SeriesEngine(spec, sigma, None)
    F = eng.run()
    return TruncatedSeries([_to_u_basis(c, eng.a) for c in F], sigma)


def series_at_point(spec: DdeSpec, sigma: int, derivatives: int = 0) -> list[list]:
    """Series of the Taylor coefficients of F at u = a, mod t^sigma.

    Row j holds [t^n] of F^{(j)}(t, a)/j! for n < sigma, for j <= derivatives.
    Only the needed v-precision is computed, so this is far cheaper than
    :func:`expand_series`.
    """
    eng = _SeriesEngine(spec, sigma, derivatives + 1)
    F = eng.run()
    return [[_c(c[j]) if j < len(c) else 0 for c in F] for j in range(derivatives + 1)]


def fixed_point_iterate(spec: DdeSpec, sigma: int, iterations: int) -> TruncatedSeries:
    """Plain iteration F <- f + t Q(F, D F, ...) starting from 0 (reference method)."""
    if spec.mode != "fixed":
        raise ModeError("series expansion requires fixed-point form")
    a = spec.a
    Q = spec.Q.with_vars(spec.q_vars)
    f = spec.f.with_vars(("u",)).to_upoly("u")
    F = TruncatedSeries([UPoly([], None, "u")] * sigma)
    for _ in range(iterations):
        args = {"x": F}
        for i in range(1, spec.k + 1):
            args[f"y{i}"] = divided_difference(F, a, i)
        rhs = _eval_series(Q, args, sigma)
        F = TruncatedSeries([f] + rhs[: sigma - 1], sigma)
    return F


def _eval_series(Q: MultiPoly, args: dict, sigma: int) -> list[UPoly]:
    zero = UPoly([], None, "u")
    out = [zero] * sigma
    names = Q.vars
    for e, c in Q.terms.items():
        term = [UPoly([c], None, "u")] + [zero] * (sigma - 1)
        for v, d in zip(names, e):
            if not d:
                continue
            if v == "t":
                term = [zero] * d + term[: sigma - d]
            elif v == "u":
                term = [x * UPoly([0] * d + [1], None, "u") for x in term]
            else:
                for _ in range(d):
                    term = _series_mul(term, args[v].coeffs, sigma)
        out = [x + y for x, y in zip(out, term)]
    return out


def _series_mul(A, B, sigma):
    zero = UPoly([], None, "u")
    out = [zero] * sigma
    for i in range(sigma):
        if A[i].is_zero():
            continue
        for j in range(sigma - i):
            out[i + j] = out[i + j] + A[i] * B[j]
    return out


def divided_difference(F: TruncatedSeries, a, i: int = 1) -> TruncatedSeries:
    """D^i F with D G = (G(u) - G(a))/(u - a), coefficient-wise."""
    if i < 1:
        raise ValueError("order of the divided difference must be >= 1")
    a = Fraction(a)
    lin = UPoly([-a, 1], None, "u")
    coeffs = list(F.coeffs)
    for _ in range(i):
        new = []
        for c in coeffs:
            q, r = (c - c(a)).divmod(lin)
            if not r.is_zero():
                raise ArithmeticError("inexact divided difference")
            new.append(q)
        coeffs = new
    return TruncatedSeries(coeffs, F.sigma)


def specialize_series(F: TruncatedSeries, point) -> list:
    point = Fraction(point)
    return [_c(c(point)) if not c.is_zero() else 0 for c in F.coeffs]


def residual_of_p(P: MultiPoly, spec: DdeSpec, sigma: int) -> list[UPoly]:
    """P(F, z0, ..., t, u) mod t^sigma using the expanded series (test helper)."""
    F = expand_series(spec, sigma)
    rows = series_at_point(spec, sigma, spec.k)
    zero = UPoly([], None, "u")
    args = {"x": F}
    for j in range(spec.k):
        args[f"z{j}"] = TruncatedSeries(
            [UPoly([rows[j][n] * math.factorial(j)], None, "u") for n in range(sigma)], sigma)
    out = _eval_series(P.with_vars(p_vars(spec.k)), args, sigma)
    return [c if not c.is_zero() else zero for c in out]
