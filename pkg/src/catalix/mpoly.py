"""Sparse multivariate polynomials over Q or a prime field.

A :class:`MultiPoly` maps exponent tuples (indexed by its variable table) to
nonzero coefficients.  Variable tables are append-only: combining two
polynomials over different tables extends the first table with the missing
names of the second.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .arith import UPoly, field_inv, to_field, upoly_interpolate, upoly_resultant


class MonomialOrder:
    """Monomial order given by a variable ranking and a kind.

    ``kind`` is ``"lex"``, ``"grevlex"`` or ``"block"``; a block order holds a
    list of ``(kind, names)`` pairs, earlier blocks dominating later ones.
    Every order is realised as a nonnegative integer weight matrix, so the key
    of a monomial is additive in its exponents.
    """

    def __init__(self, kind: str, ranking: Sequence[str], blocks=None):
        if kind not in ("lex", "grevlex", "block"):
            raise ValueError(f"unknown monomial order {kind!r}")
        self.kind = kind
        self.ranking = tuple(ranking)
        self.blocks = [(k, tuple(names)) for k, names in blocks] if blocks else None
        if len(set(self.ranking)) != len(self.ranking):
            raise ValueError("repeated variable in ranking")

    @classmethod
    def lex(cls, *ranking):
        return cls("lex", _flatten(ranking))

    @classmethod
    def grevlex(cls, *ranking):
        return cls("grevlex", _flatten(ranking))

    @classmethod
    def block(cls, *blocks):
        """``block(("grevlex", ["w"]), ("lex", ["x", "y"]))``."""
        ranking = [v for _, names in blocks for v in names]
        return cls("block", ranking, blocks)

    def __repr__(self):
        if self.kind == "block":
            return f"MonomialOrder.block({self.blocks})"
        return f"MonomialOrder.{self.kind}{self.ranking}"

    def __eq__(self, other):
        return (isinstance(other, MonomialOrder) and self.kind == other.kind
                and self.ranking == other.ranking and self.blocks == other.blocks)

    def __hash__(self):
        return hash((self.kind, self.ranking, tuple(self.blocks or ())))

    @staticmethod
    def _rows(kind: str, idx: list[int], n: int) -> list[list[int]]:
        rows = []
        if kind == "lex":
            for i in idx:
                row = [0] * n
                row[i] = 1
                rows.append(row)
        elif kind == "grevlex":
            for cut in range(len(idx), 0, -1):
                row = [0] * n
                for i in idx[:cut]:
                    row[i] = 1
                rows.append(row)
        else:
            raise ValueError(kind)
        return rows

    def matrix(self, vars: Sequence[str]) -> list[list[int]]:
        """Weight matrix with columns indexed by ``vars``."""
        pos = {v: i for i, v in enumerate(vars)}
        missing = [v for v in vars if v not in self.ranking]
        if missing:
            raise ValueError(f"order does not rank variables {missing}")
        n = len(vars)
        blocks = self.blocks or [(self.kind, self.ranking)]
        rows = []
        for kind, names in blocks:
            idx = [pos[v] for v in names if v in pos]
            if idx:
                rows.extend(self._rows(kind, idx, n))
        return rows

    def key_function(self, vars: Sequence[str]):
        rows = self.matrix(vars)
        sparse = [[(j, w) for j, w in enumerate(r) if w] for r in rows]

        def key(e):
            return tuple(sum(e[j] * w for j, w in r) for r in sparse)
        return key

    def eliminates(self, drop: Iterable[str]) -> bool:
        """True if the order is an elimination order for ``drop``."""
        drop = set(drop)
        if not drop:
            return True
        if self.kind == "lex":
            k = len(drop)
            return set(self.ranking[:k]) == drop
        if self.kind == "block":
            seen: set[str] = set()
            for kind, names in self.blocks:
                if seen == drop:
                    return True
                if kind == "lex":
                    for v in names:
                        if seen == drop:
                            return True
                        seen.add(v)
                        if not seen <= drop:
                            return False
                else:
                    seen.update(names)
                    if not seen <= drop:
                        return False
            return seen == drop
        return set(self.ranking) == drop


def _flatten(ranking):
    if len(ranking) == 1 and not isinstance(ranking[0], str):
        return tuple(ranking[0])
    return tuple(ranking)


class MultiPoly:
    """Sparse polynomial ``{exponent tuple: coefficient}`` over ``vars``."""

    __slots__ = ("terms", "vars", "p")

    def __init__(self, terms: Mapping | None = None, vars: Sequence[str] = (),
                 p: int | None = None):
        self.vars = tuple(vars)
        self.p = p
        self.terms = {}
        n = len(self.vars)
        for e, c in (terms or {}).items():
            e = tuple(e)
            if len(e) != n:
                raise ValueError("exponent length does not match variable table")
            c = to_field(c, p)
            if c != 0:
                self.terms[e] = c

    @classmethod
    def _raw(cls, terms: dict, vars, p) -> "MultiPoly":
        obj = cls.__new__(cls)
        obj.terms = terms
        obj.vars = vars
        obj.p = p
        return obj

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, vars=(), p=None):
        return cls._raw({}, tuple(vars), p)

    @classmethod
    def const(cls, c, vars=(), p=None):
        vars = tuple(vars)
        c = to_field(c, p)
        return cls._raw({(0,) * len(vars): c} if c != 0 else {}, vars, p)

    @classmethod
    def var(cls, name: str, vars=None, p=None):
        vars = tuple(vars) if vars is not None else (name,)
        if name not in vars:
            vars = vars + (name,)
        e = [0] * len(vars)
        e[vars.index(name)] = 1
        return cls._raw({tuple(e): 1}, vars, p)

    @classmethod
    def gens(cls, names: Sequence[str], p=None):
        names = tuple(names)
        return [cls.var(v, names, p) for v in names]

    @classmethod
    def from_upoly(cls, f: UPoly, var: str | None = None, vars=None):
        var = var or f.var
        vars = tuple(vars) if vars is not None else (var,)
        i = vars.index(var)
        terms = {}
        for d, c in enumerate(f.coeffs):
            if c != 0:
                e = [0] * len(vars)
                e[i] = d
                terms[tuple(e)] = c
        return cls._raw(terms, vars, f.p)

    # -- variable tables ----------------------------------------------------
    def with_vars(self, vars: Sequence[str]) -> "MultiPoly":
        """Re-index onto ``vars`` (must contain every variable in use)."""
        vars = tuple(vars)
        if vars == self.vars:
            return self
        pos = {v: i for i, v in enumerate(vars)}
        used = self.used_vars()
        for v in used:
            if v not in pos:
                raise ValueError(f"variable {v} missing from target table")
        idx = [(pos[v], i) for i, v in enumerate(self.vars) if v in pos]
        n = len(vars)
        terms = {}
        for e, c in self.terms.items():
            ne = [0] * n
            for j, i in idx:
                ne[j] = e[i]
            terms[tuple(ne)] = c
        return MultiPoly._raw(terms, vars, self.p)

    def used_vars(self) -> tuple[str, ...]:
        used = [False] * len(self.vars)
        for e in self.terms:
            for i, d in enumerate(e):
                if d:
                    used[i] = True
        return tuple(v for v, u in zip(self.vars, used) if u)

    def compact(self) -> "MultiPoly":
        return self.with_vars(self.used_vars())

    def _align(self, other: "MultiPoly"):
        if not isinstance(other, MultiPoly):
            return self, MultiPoly.const(other, self.vars, self.p)
        if other.p != self.p:
            raise ValueError("polynomials over different fields")
        if other.vars == self.vars:
            return self, other
        vars = self.vars + tuple(v for v in other.vars if v not in self.vars)
        return self.with_vars(vars), other.with_vars(vars)

    # -- basic queries ------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return next(iter(self.terms.values()), 0)

    def __len__(self):
        return len(self.terms)

    def index(self, v: str) -> int:
        try:
            return self.vars.index(v)
        except ValueError:
            raise KeyError(f"unknown variable {v!r}") from None

    def degree(self, v: str | None = None) -> int:
        if not self.terms:
            return -1
        if v is None:
            return max(sum(e) for e in self.terms)
        if v not in self.vars:
            return 0
        i = self.index(v)
        return max(e[i] for e in self.terms)

    total_degree = degree

    def degrees(self) -> dict[str, int]:
        return {v: self.degree(v) for v in self.vars}

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            if other.p != self.p:
                return False
            a, b = self._align(other)
            return a.terms == b.terms
        if self.is_constant():
            return self.constant_value() == to_field(other, self.p)
        return False

    def __hash__(self):
        c = self.compact()
        return hash((frozenset(c.terms.items()), c.vars, c.p))

    # -- arithmetic ---------------------------------------------------------
    def _red(self, c):
        return c % self.p if self.p is not None else to_field(c, None)

    def __add__(self, other):
        a, b = self._align(other)
        terms = dict(a.terms)
        p = self.p
        for e, c in b.terms.items():
            v = terms.get(e, 0) + c
            if p is not None:
                v %= p
            if v == 0:
                terms.pop(e, None)
            else:
                terms[e] = v
        return MultiPoly._raw(terms, a.vars, p)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw({e: self._red(-c) for e, c in self.terms.items()},
                              self.vars, self.p)

    def __sub__(self, other):
        a, b = self._align(other)
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            c = to_field(other, self.p)
            if c == 0:
                return MultiPoly.zero(self.vars, self.p)
            return MultiPoly._raw({e: self._red(v * c) for e, v in self.terms.items()},
                                  self.vars, self.p)
        a, b = self._align(other)
        p = self.p
        out: dict = {}
        bt = list(b.terms.items())
        for ea, ca in a.terms.items():
            for eb, cb in bt:
                e = tuple(x + y for x, y in zip(ea, eb))
                out[e] = out.get(e, 0) + ca * cb
        if p is not None:
            out = {e: c % p for e, c in out.items() if c % p}
        else:
            out = {e: to_field(c, None) for e, c in out.items() if c != 0}
        return MultiPoly._raw(out, a.vars, p)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative exponent")
        out = MultiPoly.const(1, self.vars, self.p)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def __truediv__(self, other):
        """Division by a nonzero constant."""
        if isinstance(other, MultiPoly):
            if not other.is_constant() or other.is_zero():
                raise ZeroDivisionError("division by a non-constant polynomial")
            other = other.constant_value()
        if other == 0:
            raise ZeroDivisionError("division by zero")
        return self * field_inv(to_field(other, self.p) if self.p else Fraction(other), self.p)

    def mul_term(self, e: Sequence[int], c) -> "MultiPoly":
        p = self.p
        out = {}
        for ea, ca in self.terms.items():
            v = ca * c
            if p is not None:
                v %= p
            if v:
                out[tuple(x + y for x, y in zip(ea, e))] = v
        return MultiPoly._raw(out, self.vars, p)

    # -- calculus and substitution -----------------------------------------
    def derive(self, v: str) -> "MultiPoly":
        """Formal partial derivative with respect to ``v``."""
        i = self.index(v)
        out = {}
        for e, c in self.terms.items():
            d = e[i]
            if d:
                c2 = self._red(c * d)
                if c2 != 0:
                    ne = list(e)
                    ne[i] = d - 1
                    out[tuple(ne)] = c2
        return MultiPoly._raw(out, self.vars, self.p)

    def eval(self, bindings: Mapping) -> "MultiPoly":
        """Substitute variables by field values or polynomials.

        Bound variables stay in the table with exponent zero.
        """
        for v in bindings:
            self.index(v)
        if not bindings:
            return self
        poly_binds = {v: b for v, b in bindings.items() if isinstance(b, MultiPoly)}
        if poly_binds:
            return self._eval_poly(bindings)
        p = self.p
        vals = {self.index(v): to_field(b, p) for v, b in bindings.items()}
        pows: dict = {}
        out: dict = {}
        for e, c in self.terms.items():
            ne = list(e)
            for i, val in vals.items():
                d = e[i]
                if d:
                    key = (i, d)
                    pw = pows.get(key)
                    if pw is None:
                        pw = pow(val, d, p) if p is not None else val ** d
                        pows[key] = pw
                    c = c * pw
                    if p is not None:
                        c %= p
                    ne[i] = 0
            if c != 0:
                ne = tuple(ne)
                out[ne] = out.get(ne, 0) + c
        if p is not None:
            out = {e: c % p for e, c in out.items() if c % p}
        else:
            out = {e: to_field(c, None) for e, c in out.items() if c != 0}
        return MultiPoly._raw(out, self.vars, p)

    def _eval_poly(self, bindings: Mapping) -> "MultiPoly":
        base = self
        subs = {}
        for v, b in bindings.items():
            if not isinstance(b, MultiPoly):
                b = MultiPoly.const(b, self.vars, self.p)
            if b.p != self.p:
                raise TypeError(f"binding for {v} lives over a different field")
            subs[v] = b
        vars = base.vars
        for b in subs.values():
            vars = vars + tuple(x for x in b.vars if x not in vars)
        base = base.with_vars(vars)
        subs = {v: b.with_vars(vars) for v, b in subs.items()}
        idx = {base.index(v): b for v, b in subs.items()}
        cache: dict = {}
        out = MultiPoly.zero(vars, self.p)
        for e, c in base.terms.items():
            ne = list(e)
            term = MultiPoly._raw({}, vars, self.p)
            factor = None
            for i, b in idx.items():
                d = e[i]
                if d:
                    pw = cache.get((i, d))
                    if pw is None:
                        pw = b ** d
                        cache[(i, d)] = pw
                    factor = pw if factor is None else factor * pw
                    ne[i] = 0
            term.terms[tuple(ne)] = c
            out = out + (term * factor if factor is not None else term)
        return out

    def __call__(self, **bindings):
        return self.eval(bindings)

    # -- coefficient views -------------------------------------------------
    def coeffs_in(self, v: str) -> dict[int, "MultiPoly"]:
        """``{d: coefficient of v^d}``, coefficients free of ``v``."""
        i = self.index(v)
        out: dict[int, dict] = {}
        for e, c in self.terms.items():
            ne = list(e)
            d = ne[i]
            ne[i] = 0
            out.setdefault(d, {})[tuple(ne)] = c
        return {d: MultiPoly._raw(t, self.vars, self.p) for d, t in out.items()}

    def leading_coeff_in(self, v: str) -> "MultiPoly":
        if self.is_zero():
            return self
        cs = self.coeffs_in(v)
        return cs[max(cs)]

    def to_upoly(self, v: str | None = None) -> UPoly:
        used = self.used_vars()
        if v is None:
            if len(used) > 1:
                raise ValueError("polynomial is not univariate")
            v = used[0] if used else (self.vars[0] if self.vars else "x")
        elif any(u != v for u in used):
            raise ValueError(f"polynomial involves variables other than {v}")
        if v not in self.vars:
            return UPoly([self.constant_value()] if self.terms else [], self.p, v)
        i = self.index(v)
        n = self.degree(v)
        coeffs = [0] * (n + 1)
        for e, c in self.terms.items():
            coeffs[e[i]] = c
        return UPoly._raw(coeffs, self.p, v)

    def to_field(self, p: int | None) -> "MultiPoly":
        """Image over GF(p) (or a copy over Q when p is None)."""
        if p is None:
            return MultiPoly._raw(dict(self.terms), self.vars, None)
        if self.p is not None and self.p != p:
            raise ValueError("cannot change prime field")
        out = {}
        for e, c in self.terms.items():
            v = to_field(c, p)
            if v:
                out[e] = v
        return MultiPoly._raw(out, self.vars, p)

    def monic(self, order: MonomialOrder) -> "MultiPoly":
        if self.is_zero():
            return self
        _, c = self.leading_term(order)
        return self * field_inv(c, self.p)

    def leading_term(self, order: MonomialOrder):
        key = order.key_function(self.vars)
        e = max(self.terms, key=key)
        return e, self.terms[e]

    def sorted_terms(self, order: MonomialOrder | None = None):
        if order is None:
            return sorted(self.terms.items(), reverse=True)
        key = order.key_function(self.vars)
        return sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=True)

    # -- integer normalisation (over Q) --------------------------------------
    def primitive(self, order: MonomialOrder | None = None) -> "MultiPoly":
        """Integer-primitive form with positive leading coefficient."""
        if self.p is not None:
            return self.monic(order) if order else self
        if self.is_zero():
            return self
        import math
        den = 1
        for c in self.terms.values():
            d = Fraction(c).denominator
            den = den * d // math.gcd(den, d)
        ints = {e: int(Fraction(c) * den) for e, c in self.terms.items()}
        g = 0
        for c in ints.values():
            g = math.gcd(g, c)
        lead = self.sorted_terms(order)[0][0]
        if ints[lead] < 0:
            g = -g
        return MultiPoly._raw({e: c // g for e, c in ints.items()}, self.vars, None)

    # -- printing -----------------------------------------------------------
    def format(self, order: MonomialOrder | None = None) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms(order):
            mon = "*".join(v if d == 1 else f"{v}^{d}" for v, d in zip(self.vars, e) if d)
            if self.p is not None and c > self.p // 2:
                c = c - self.p
            parts.append(_term(c, mon))
        s = parts[0]
        s = s[1:] if s[0] == "+" else "-" + s[1:]
        for t in parts[1:]:
            s += f" {t[0]} {t[1:]}"
        return s

    def __str__(self):
        return self.format()

    def __repr__(self):
        f = f", p={self.p}" if self.p is not None else ""
        return f"MultiPoly({self.format()!r}, vars={self.vars}{f})"


def _term(c, mon: str) -> str:
    c = Fraction(c)
    sign = "-" if c < 0 else "+"
    c = abs(c)
    if not mon:
        return sign + str(c)
    if c == 1:
        return sign + mon
    return f"{sign}{c}*{mon}"


# ---------------------------------------------------------------------------
# module-level operations


def mpoly_derive(p: MultiPoly, v: str) -> MultiPoly:
    return p.derive(v)


def mpoly_eval(p: MultiPoly, bindings: Mapping) -> MultiPoly:
    return p.eval(bindings)


def mpoly_resultant(f: MultiPoly, g: MultiPoly, v: str) -> MultiPoly:
    """Res_v(f, g) by evaluation/interpolation down to univariate resultants."""
    f, g = f._align(g)
    if v not in f.vars:
        raise KeyError(f"unknown variable {v!r}")
    df, dg = f.degree(v), g.degree(v)
    if df <= 0 and dg <= 0:
        raise ValueError(f"both polynomials are free of {v}")
    vars = f.vars
    others = [w for w in set(f.used_vars()) | set(g.used_vars()) if w != v]
    others.sort(key=vars.index)
    out = _res_rec(f.compact_to([v] + others), g.compact_to([v] + others), v, others)
    return out.with_vars(vars) if out.terms else MultiPoly.zero(vars, f.p)


def _compact_to(self: MultiPoly, names) -> MultiPoly:
    return self.with_vars(tuple(names))


MultiPoly.compact_to = _compact_to


def _res_rec(f: MultiPoly, g: MultiPoly, v: str, others: list[str]) -> MultiPoly:
    p = f.p
    if not others:
        r = upoly_resultant(f.to_upoly(v), g.to_upoly(v))
        return MultiPoly.const(r, f.vars, p)
    w = others[-1]
    rest = others[:-1]
    df, dg = f.degree(v), g.degree(v)
    bound = df * g.degree(w) + dg * f.degree(w)
    lf, lg = f.leading_coeff_in(v), g.leading_coeff_in(v)
    samples = []
    node = 0
    while len(samples) < bound + 1:
        if p is not None and node >= p:
            raise ArithmeticError("field too small for interpolation")
        if lf.eval({w: node}).is_zero() or lg.eval({w: node}).is_zero():
            node += 1
            continue
        fs, gs = f.eval({w: node}), g.eval({w: node})
        samples.append((node, _res_rec(fs, gs, v, rest)))
        node += 1
    monos = set()
    for _, r in samples:
        monos.update(r.terms)
    wi = f.index(w)
    out: dict = {}
    for m in monos:
        up = upoly_interpolate([(x, r.terms.get(m, 0)) for x, r in samples], p, w)
        for d, c in enumerate(up.coeffs):
            if c != 0:
                e = list(m)
                e[wi] = d
                out[tuple(e)] = c
    return MultiPoly._raw(out, f.vars, p)


# ---------------------------------------------------------------------------
# parsing


class ParseError(ValueError):
    def __init__(self, msg: str, line: int = 1, col: int = 1):
        super().__init__(f"line {line}, column {col}: {msg}")
        self.line = line
        self.col = col
        self.msg = msg


_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d+)?)|([A-Za-z_][A-Za-z0-9_]*)|(\*\*|[-+*/^()]))")


def _tokenize(text: str, line: int, col0: int):
    pos = 0
    toks = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            stripped = len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[pos + stripped]!r}", line,
                             col0 + pos + stripped)
        col = col0 + m.start(m.lastindex)
        if m.group(1):
            toks.append(("num", m.group(1), col))
        elif m.group(2):
            toks.append(("id", m.group(2), col))
        else:
            op = "^" if m.group(3) == "**" else m.group(3)
            toks.append(("op", op, col))
        pos = m.end()
    toks.append(("end", "", col0 + len(text)))
    return toks


class _Parser:
    def __init__(self, text, vars, p, line, col0, symbols):
        self.toks = _tokenize(text, line, col0)
        self.i = 0
        self.vars = tuple(vars)
        self.p = p
        self.line = line
        self.symbols = symbols

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, self.line, tok[2])

    def parse(self):
        if self.peek()[0] == "end":
            self.error("empty expression")
        out = self.expr()
        if self.peek()[0] != "end":
            self.error(f"unexpected token {self.peek()[1]!r}")
        return out

    def expr(self):
        sign = 1
        if self.peek() == ("op", "-", self.peek()[2]):
            self.take()
            sign = -1
        elif self.peek() == ("op", "+", self.peek()[2]):
            self.take()
        out = self.term()
        if sign < 0:
            out = -out
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()
            if self.peek()[0] == "end":
                self.error(f"dangling operator {op[1]!r}", op)
            rhs = self.term()
            out = out + rhs if op[1] == "+" else out - rhs
        return out

    def term(self):
        out = self.power()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()
            if self.peek()[0] == "end":
                self.error(f"dangling operator {op[1]!r}", op)
            rhs = self.power()
            if op[1] == "*":
                out = out * rhs
            else:
                if not rhs.is_constant() or rhs.is_zero():
                    self.error("division is only allowed by nonzero constants", op)
                out = out / rhs.constant_value()
        return out

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^", self.peek()[2]):
            op = self.take()
            tok = self.peek()
            neg = False
            if tok[0] == "op" and tok[1] == "-":
                neg = True
            if tok[0] != "num" or "." in tok[1]:
                self.error("exponent must be a nonnegative integer literal",
                           tok if not neg else tok)
            self.take()
            base = base ** int(tok[1])
        return base

    def atom(self):
        tok = self.take()
        kind, val, col = tok
        if kind == "num":
            c = Fraction(val)
            return MultiPoly.const(c, self.vars, self.p)
        if kind == "id":
            if self.symbols is not None and val in self.symbols:
                sub = self.symbols[val]
                return sub.with_vars(self.vars) if isinstance(sub, MultiPoly) else \
                    MultiPoly.const(sub, self.vars, self.p)
            if val not in self.vars:
                raise ParseError(f"unknown symbol {val!r}", self.line, col)
            return MultiPoly.var(val, self.vars, self.p)
        if kind == "op" and val == "(":
            out = self.expr()
            if self.peek()[1] != ")":
                self.error("expected ')'")
            self.take()
            return out
        if kind == "op" and val == "-":
            return -self.power()
        if kind == "end":
            raise ParseError("unexpected end of expression", self.line, col)
        raise ParseError(f"unexpected token {val!r}", self.line, col)


def parse_poly(text: str, vars: Sequence[str] | None = None, p: int | None = None,
               line: int = 1, col: int = 1, symbols: Mapping | None = None) -> MultiPoly:
    """Parse an expression over ``vars`` (inferred from identifiers if None).

    Grammar: rational literals, identifiers, ``+ - * / ^`` (``**`` accepted),
    parentheses; ``/`` only by nonzero constants; ``^`` by nonnegative
    integer literals.
    """
    if vars is None:
        names = []
        for kind, val, _ in _tokenize(text, line, col):
            if kind == "id" and val not in names and not (symbols and val in symbols):
                names.append(val)
        vars = names
    return _Parser(text, vars, p, line, col, symbols).parse()
