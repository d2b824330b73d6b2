"""End-to-end annihilator computation for fixed-point DDEs.

Four methods turn a :class:`DdeSpec` into a nonzero R(t, z0) with
R(t, F(t, a)) = 0:

* ``direct``: duplicated system saturated by ``diag``, characteristic
  polynomial of multiplication by the output variable;
* ``elim``: fibre-cardinality conditions read off elimination bases;
* ``geom``: characteristic polynomial of m_{z1} over K(z0), then the
  discriminant-like system ``chi = d chi/d z1 = 0``;
* ``hgp``: modular degree probe, Hermite-Padé guess, certification.

The algebraic methods work over GF(p) with t (or z0) specialised at
0, 1, 2, ...; univariate outputs are interpolated, CRT-lifted and
rationally reconstructed.
"""

from __future__ import annotations

import math
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .arith import (CrtAccumulator, UPoly, random_prime, rational_reconstruct,
                    ratfun_reconstruct, to_field, upoly_interpolate)
from .dde import (DdeSpec, ModeError, build_p, check_h1, p_vars,
                  series_at_point)
from .groebner import (ResourceLimit, time_limit, buchberger, char_poly, elimination_ideal,
                       hermite_minors, is_zero_dim, mult_matrix, random_combination,
                       saturate)
from .guess import (TZ, Certificate, InsufficientPrecision, _as_rows, _prem_rows,
                    certify, guess_algebraic, guess_ladder, normalize_annihilator)
from .mpoly import MonomialOrder, MultiPoly

METHODS = ("direct", "hgp", "elim", "geom")
PRIME_BITS_ENV = "CATALIX_PRIME_BITS"


class Diagnostic(RuntimeError):
    """A run aborted because a hypothesis of the chosen method fails."""


def default_prime_bits() -> tuple[int, int]:
    raw = os.environ.get(PRIME_BITS_ENV, "")
    if raw:
        lo, _, hi = raw.partition(":")
        return int(lo), int(hi or lo)
    return 27, 31


@dataclass
class SolveOptions:
    method: str = "hgp"
    ev_var: str = "t"
    max_primes: int = 12
    max_points: int = 2048
    prime_bits: tuple = field(default_factory=default_prime_bits)
    certify: bool | None = None       # None: on for hgp, off otherwise
    seed: int = 0
    jobs: int = 1
    max_pairs: int | None = None
    time_budget: float | None = None
    inequalities: bool = True
    select_factor: bool = True
    override_h1: bool = False
    probe_backend: str = "elim"
    sigma_ceiling: int = 4096

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; choose from {', '.join(METHODS)}")
        if self.ev_var not in ("t", "z0"):
            raise ValueError("ev_var must be 't' or 'z0'")


@dataclass
class DuplicatedSystem:
    polys: list
    diag: MultiPoly
    vars: tuple


@dataclass
class ModularProbe:
    p: int
    theta: int
    d_t: int
    d_z0: int
    raw_d_t: int
    raw_d_z0: int
    backend: str

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class AnnihilatorResult:
    R: MultiPoly
    deg_t: int
    deg_z0: int
    certificate: Certificate | None
    provenance: dict

    def to_dict(self) -> dict:
        return {"R": self.R.format(MonomialOrder.lex("z0", "t")),
                "deg_t": self.deg_t, "deg_z0": self.deg_z0,
                "certificate": self.certificate.to_dict() if self.certificate else None,
                "provenance": self.provenance}


class _Clock:
    def __init__(self, budget: float | None):
        self.start = time.monotonic()
        self.budget = budget

    def check(self):
        if self.budget is not None and time.monotonic() - self.start > self.budget:
            raise ResourceLimit(f"time budget of {self.budget:g}s exhausted")

    def elapsed(self) -> float:
        return time.monotonic() - self.start


# ---------------------------------------------------------------------------
# small helpers


def _other(var: str) -> str:
    return "z0" if var == "t" else "t"


def _specialize(P: MultiPoly, p: int, bindings: dict) -> MultiPoly:
    Pp = P.to_field(p).eval(bindings)
    return Pp.with_vars(tuple(v for v in Pp.vars if v not in bindings))


def _eliminate_to(gens: list, out: str, max_pairs=None) -> UPoly | None:
    """Generator of (gens) ∩ K[out]; None when that ideal is zero."""
    vars: tuple = ()
    for g in gens:
        vars += tuple(v for v in g.used_vars() if v not in vars)
    others = [v for v in vars if v != out]
    p = gens[0].p
    if not others:
        order = MonomialOrder.grevlex(out)
        gb = buchberger([g.with_vars((out,)) for g in gens], order, max_pairs=max_pairs,
                        vars=(out,))
    else:
        order = MonomialOrder.block(("grevlex", others), ("grevlex", [out]))
        gb = buchberger(gens, order, max_pairs=max_pairs, vars=tuple(others) + (out,))
    if gb.is_unit():
        return UPoly([1], p, out)
    uni = elimination_ideal(gb, {out})
    if not uni:
        return None
    return uni[0].to_upoly(out)


def _dcp(*gbs) -> int:
    return max(g.stats.d_cp for g in gbs)


def _is_trivial(spec: DdeSpec) -> bool:
    return spec.mode == "fixed" and spec.Q.is_zero()


def _trivial_annihilator(spec: DdeSpec) -> MultiPoly:
    fa = spec.f.to_upoly("u")(spec.a) if spec.f.terms else 0
    z0 = MultiPoly.var("z0", TZ)
    return normalize_annihilator(z0 - Fraction(fa))


def _check_h1(spec: DdeSpec, P: MultiPoly, opts: SolveOptions):
    rep = check_h1(spec, P)
    if not rep.ok and not opts.override_h1:
        raise Diagnostic(rep.message())
    return rep


# ---------------------------------------------------------------------------
# point backends: each returns a monic squarefree UPoly in the output
# variable for one (prime, specialised value) pair


@dataclass
class PointResult:
    poly: UPoly
    shape: tuple
    d_cp: int = 0
    d_chi: int | None = None
    d_ideal: int | None = None


def _params(k: int, out: str) -> list[str]:
    return [f"z{i}" for i in range(k - 1, 0, -1)] + [out]


def point_elim(P: MultiPoly, k: int, a, p: int, fixed: str, value: int,
               inequalities: bool = True, seed: int = 0, max_pairs=None) -> PointResult:
    out = _other(fixed)
    Pp = _specialize(P, p, {fixed: value})
    params = _params(k, out)
    vars = ("x", "u") + tuple(params)
    Pp = Pp.with_vars(vars)
    u = MultiPoly.var("u", vars, p)
    gens = [Pp, Pp.derive("x"), Pp.derive("u")]
    J = saturate(gens, u - a, order=MonomialOrder.grevlex(vars), max_pairs=max_pairs)
    # x-degree compared first: same elimination and extension properties as lex
    gb1 = buchberger(J, MonomialOrder.block(("lex", ["x"]), ("grevlex", ["u"] + params)),
                     max_pairs=max_pairs)
    if gb1.is_unit():
        raise Diagnostic("the system P = ∂xP = ∂uP = 0, u ≠ a has no solution: "
                         "H3 or squarefreeness violated")
    lx = [g.leading_coeff_in("x") for g in gb1 if g.degree("x") > 0]
    E = [g for g in gb1 if g.degree("x") == 0]
    if not E:
        raise Diagnostic("projection forgetting x is dense: H3 or squarefreeness violated")
    gb2 = buchberger(E, MonomialOrder.block(("lex", ["u"]), ("grevlex", params)),
                     max_pairs=max_pairs)
    Gx = list(gb2)
    low = [g for g in Gx if g.degree("u") <= k - 1]
    high = sorted((g for g in Gx if g.degree("u") >= k),
                  key=lambda g: (g.degree("u"), len(g)))
    if not high:
        raise Diagnostic(f"no element of u-degree >= {k} after projection: fibres have fewer "
                         f"than {k} points (H3 or squarefreeness violated)")
    eqs = list(Gx)
    for g in low:
        eqs.extend(c for d, c in g.coeffs_in("u").items() if d > 0 or g.degree("u") > 0)
    eqs = [e for e in eqs if not e.is_zero()]
    rng = random.Random(seed)
    cond_x = None
    if inequalities and lx and not any(l.is_constant() for l in lx):
        cond_x = random_combination(lx, rng)
    tried = []
    for idx, g in enumerate(high):
        h = MultiPoly.const(1, vars, p)
        if inequalities:
            if cond_x is not None:
                h = h * cond_x
            h = h * g.leading_coeff_in("u")
            if k >= 2:
                minors = [m.numerator for m in hermite_minors(g, k, "u", principal=True)
                          if not m.numerator.is_zero()]
                if not minors:
                    tried.append("minors vanish")
                    continue
                h = h * random_combination(minors, rng)
        system = eqs if h.is_constant() else saturate(eqs, h, max_pairs=max_pairs)
        r = _eliminate_to(system, out, max_pairs)
        if r is None:
            tried.append("<0>")
            continue
        if r.degree <= 0:
            tried.append("<1>")
            continue
        r = r.squarefree_part().monic()
        return PointResult(r, (idx, len(Gx), tuple(sorted(gb2.shape))), _dcp(gb1, gb2))
    raise Diagnostic(f"all conjunctions yield <1> or <0> ({', '.join(tried)}): "
                     "H3 or squarefreeness violated")


def build_duplicated(spec_or_P, k: int | None = None, a=None) -> DuplicatedSystem:
    """The 3k polynomials P, ∂xP, ∂uP at (x_i, u_i) and diag."""
    if isinstance(spec_or_P, DdeSpec):
        P, k, a = build_p(spec_or_P), spec_or_P.k, spec_or_P.a
    else:
        P = spec_or_P
    vars: tuple = ()
    for i in range(1, k + 1):
        vars += (f"x{i}", f"u{i}")
    vars += tuple(f"z{j}" for j in range(k)) + ("t",)
    base = [P, P.derive("x"), P.derive("u")]
    polys = []
    for i in range(1, k + 1):
        sub = {"x": MultiPoly.var(f"x{i}", vars), "u": MultiPoly.var(f"u{i}", vars)}
        polys.extend(b.eval(sub).with_vars(vars) for b in base)
    us = [MultiPoly.var(f"u{i}", vars) for i in range(1, k + 1)]
    diag = MultiPoly.const(1, vars)
    for i in range(k):
        for j in range(i + 1, k):
            diag = diag * (us[i] - us[j])
        diag = diag * (us[i] - a)
    return DuplicatedSystem(polys, diag, vars)


def _diag_radical(k: int, a, vars, p) -> MultiPoly:
    us = [MultiPoly.var(f"u{i}", vars, p) for i in range(1, k + 1)]
    h = MultiPoly.const(1, vars, p)
    for i in range(k):
        for j in range(i + 1, k):
            h = h * (us[i] - us[j])
        h = h * (us[i] - a)
    return h


def _specialized_inf(P: MultiPoly, k: int, a, p: int, fixed: str, value: int, max_pairs=None):
    """Grevlex basis of the specialised duplicated ideal saturated by diag.

    The single-copy ideal <P, ∂xP, ∂uP> : (u - a)^∞ is computed once and
    then instantiated k times; the final saturation by the radical of diag
    gives the same zero set as saturating the raw duplicated system.
    """
    Pp = _specialize(P, p, {fixed: value})
    single = ("x", "u") + tuple(v for v in Pp.vars if v not in ("x", "u"))
    Pp = Pp.with_vars(single)
    u = MultiPoly.var("u", single, p)
    J = saturate([Pp, Pp.derive("x"), Pp.derive("u")], u - a,
                 order=MonomialOrder.grevlex(single), max_pairs=max_pairs)
    vars: tuple = ()
    for i in range(1, k + 1):
        vars += (f"x{i}", f"u{i}")
    vars += single[2:]
    polys = []
    for i in range(1, k + 1):
        sub = {"x": MultiPoly.var(f"x{i}", vars, p), "u": MultiPoly.var(f"u{i}", vars, p)}
        polys.extend(g.eval(sub).with_vars(vars) for g in J)
    h = _diag_radical(k, a, vars, p)
    I = saturate(polys, h, order=MonomialOrder.grevlex(vars), max_pairs=max_pairs)
    return buchberger(I, MonomialOrder.grevlex(vars), max_pairs=max_pairs), vars


def point_direct(P: MultiPoly, k: int, a, p: int, fixed: str, value: int,
                 seed: int = 0, max_pairs=None) -> PointResult:
    out = _other(fixed)
    gb, vars = _specialized_inf(P, k, a, p, fixed, value, max_pairs)
    if gb.is_unit():
        raise Diagnostic("saturated duplicated system is empty: H1 or H2 violated")
    zd, qb = is_zero_dim(gb)
    if not zd:
        raise Diagnostic("not zero-dimensional after saturation (H2 violated)")
    M = mult_matrix(gb, qb, MultiPoly.var(out, vars, p))
    cp = char_poly(M, p, out)
    r = cp.squarefree_part().monic()
    return PointResult(r, (qb.dim, tuple(gb.shape)), gb.stats.d_cp, None, qb.dim)


def _ideal_at_z0(J: list, p: int, theta: int) -> list:
    vars = ("x", "u", "z1")
    return [g.eval({"z0": theta}).with_vars(vars) for g in J]


def _charpoly_z1(J: list, p: int, theta: int):
    gens = _ideal_at_z0(J, p, theta)
    gb = buchberger(gens, MonomialOrder.grevlex("x", "u", "z1"))
    zd, qb = is_zero_dim(gb)
    if not zd or gb.is_unit():
        return None, gb
    M = mult_matrix(gb, qb, MultiPoly.var("z1", gb.vars, p))
    return char_poly(M, p, "z1"), gb


def _interp_ratfuns(samples: dict, p: int, var: str, need_check: int = 2):
    """Rational functions through ``{node: [c_0, ..., c_{D-1}]}``, or None."""
    nodes = sorted(samples)
    if len(nodes) < 2 + need_check:
        return None
    fit, check = nodes[:-need_check], nodes[-need_check:]
    m = UPoly([1], p, var)
    for x in fit:
        m = m * UPoly([-x, 1], p, var)
    D = len(samples[nodes[0]])
    out = []
    for i in range(D):
        a = upoly_interpolate([(x, samples[x][i]) for x in fit], p, var)
        nd = ratfun_reconstruct(a, m)
        if nd is None:
            return None
        n, d = nd
        for x in check:
            dv = d(x)
            if dv == 0 or n(x) * pow(dv, -1, p) % p != samples[x][i] % p:
                return None
        out.append((n, d))
    return out


def point_geom(P: MultiPoly, k: int, a, p: int, fixed: str, value: int,
               seed: int = 0, max_pairs=None, max_samples: int = 512) -> PointResult:
    if k != 2:
        raise Diagnostic("the geometric method is implemented for k = 2 only")
    if fixed != "t":
        raise Diagnostic("the geometric method samples z0 itself; use ev_var t")
    Pp = _specialize(P, p, {"t": value})
    vars = ("x", "u", "z1", "z0")
    Pp = Pp.with_vars(vars)
    u = MultiPoly.var("u", vars, p)
    J = saturate([Pp, Pp.derive("x"), Pp.derive("u")], u - a,
                 order=MonomialOrder.grevlex(vars), max_pairs=max_pairs)
    r, chi, D, d_cp = geom_from_ideal(list(J), p, max_pairs, max_samples)
    return PointResult(r, (D, chi.degree()), d_cp, chi.degree())


def geom_from_ideal(J: list, p: int, max_pairs=None, max_samples: int = 512):
    """Output polynomial in z0 from an ideal J of F_p[x, u, z1, z0] (k = 2).

    Returns ``(r, chi, D, d_cp)`` where chi(z1; z0) is the characteristic
    polynomial of m_z1 over F_p(z0), cleared of denominators.
    """
    # J ∩ K[z1, z0] is not formed: once chi is primitive in z1 its variety contains
    # V(chi), so adding it would not change the radical of the final elimination.
    # sample z0 = theta, char poly of m_z1 on the zero-dimensional fibre
    samples: dict = {}
    degs: dict = {}
    theta = 0
    n_target = 8
    recon = None
    d_cp = 0
    while theta < max_samples:
        while len(samples) < n_target and theta < max_samples:
            theta += 1
            cp, gb = _charpoly_z1(list(J), p, theta)
            d_cp = max(d_cp, gb.stats.d_cp)
            if cp is None:
                continue
            degs.setdefault(cp.degree, []).append(theta)
            samples[theta] = cp
        if not degs:
            break
        D = max(degs, key=lambda d: (len(degs[d]), d))
        good = {x: samples[x].coeffs[:D] for x in degs[D]}
        recon = _interp_ratfuns(good, p, "z0")
        if recon is not None:
            break
        n_target *= 2
    if recon is None:
        raise Diagnostic("(S) dimension hypothesis violated: no stable characteristic "
                         "polynomial of m_z1 over K(z0)")
    den = UPoly([1], p, "z0")
    for _, d in recon:
        den = den * d.exact_div(den.gcd(d))
    coeffs = [n * den.exact_div(d) for n, d in recon] + [den]
    content = den
    for c in coeffs:
        content = content.gcd(c)
    coeffs = [c.exact_div(content) for c in coeffs]
    den = coeffs[-1]
    z1 = MultiPoly.var("z1", ("z1", "z0"), p)
    chi = MultiPoly.zero(("z1", "z0"), p)
    for i, c in enumerate(coeffs):
        chi = chi + MultiPoly.from_upoly(c, "z0", ("z1", "z0")) * z1 ** i
    system = [chi, chi.derive("z1")]
    denom = MultiPoly.from_upoly(den, "z0", ("z1", "z0"))
    if not denom.is_constant():
        system = saturate(system, denom, max_pairs=max_pairs)
    r = _eliminate_to(system, "z0", max_pairs)
    if r is None or r.degree <= 0:
        raise Diagnostic("elimination after adding chi gave no univariate output: "
                         "(Z) or H3 violated")
    r = r.squarefree_part().monic()
    return r, chi, D, d_cp


_BACKENDS: dict[str, Callable] = {"elim": point_elim, "direct": point_direct, "geom": point_geom}


def _run_point(args):
    name, P, k, a, p, fixed, value, extra = args
    try:
        return value, _BACKENDS[name](P, k, a, p, fixed, value, **extra)
    except Diagnostic as exc:
        return value, exc


# ---------------------------------------------------------------------------
# orchestration


def _map(tasks: list, jobs: int) -> list:
    if jobs <= 1 or len(tasks) <= 1:
        return [_run_point(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(_run_point, tasks))


def _lex_monic(R: MultiPoly, p: int) -> MultiPoly:
    lc = R.leading_term(MonomialOrder.lex("z0", "t"))[1]
    return R * pow(lc, -1, p)


def modular_image(P: MultiPoly, k: int, a, backend: str, p: int, fixed: str,
                  opts: SolveOptions, clock: _Clock, report: dict) -> MultiPoly:
    """R_p(t, z0) over GF(p), monic at its lex(z0 > t) leading monomial."""
    out = _other(fixed)
    extra = {"seed": opts.seed, "max_pairs": opts.max_pairs}
    if backend == "elim":
        extra["inequalities"] = opts.inequalities
    results: dict[int, PointResult] = {}
    failures: list = []
    next_point = 0
    target = 8
    while True:
        clock.check()
        batch = list(range(next_point, next_point + target - len(results)))
        next_point += len(batch)
        tasks = [(backend, P, k, a, p, fixed, v, extra) for v in batch]
        for v, res in _map(tasks, opts.jobs):
            if isinstance(res, Exception):
                failures.append((v, str(res)))
            else:
                results[v] = res
            clock.check()
        if not results:
            if next_point >= 6:
                raise Diagnostic(failures[-1][1])
            continue
        votes: dict = {}
        for v, res in results.items():
            votes.setdefault((res.shape, res.poly.degree), []).append(v)
        key = max(votes, key=lambda s: (len(votes[s]), s[1]))
        good = sorted(votes[key])
        D = key[1]
        samples = {v: results[v].poly.coeffs[:D] for v in good}
        recon = _interp_ratfuns(samples, p, fixed)
        if recon is not None:
            break
        if next_point >= opts.max_points:
            raise Diagnostic(f"unlucky-point quorum failure after {next_point} points; "
                             "increase the point budget")
        target = 2 * len(results) + 2
    den = UPoly([1], p, fixed)
    for _, d in recon:
        den = den * d.exact_div(den.gcd(d))
    terms = {}
    iv = TZ.index(fixed)
    for i, c in enumerate([n * den.exact_div(d) for n, d in recon] + [den]):
        for j, cc in enumerate(c.coeffs):
            if cc:
                e = [0, 0]
                e[iv] = j
                e[1 - iv] = i
                terms[tuple(e)] = cc
    R = MultiPoly(terms, TZ, p)
    rs = list(results.values())
    report["points"] = max(report.get("points", 0), next_point)
    report["d_cp"] = max(report.get("d_cp", 0), max(r.d_cp for r in rs))
    chis = [r.d_chi for r in rs if r.d_chi is not None]
    if chis:
        report["d_chi"] = max(chis)
    ideals = [r.d_ideal for r in rs if r.d_ideal is not None]
    if ideals:
        report["d_ideal"] = max(ideals)
    report["shape"] = str(key[0])[:200]
    report.setdefault("discarded_points", 0)
    report["discarded_points"] += len(results) - len(good) + len(failures)
    return _lex_monic(R, p)


def _lift(acc: CrtAccumulator, keys: list) -> MultiPoly | None:
    vals = [rational_reconstruct(v, acc.modulus) for v in acc.combined]
    if any(v is None for v in vals):
        return None
    return MultiPoly(dict(zip(keys, vals)), TZ)


def multimodular(P: MultiPoly, k: int, a, backend: str, opts: SolveOptions,
                 clock: _Clock, report: dict) -> MultiPoly:
    rng = random.Random(opts.seed)
    lo, hi = opts.prime_bits
    fixed = opts.ev_var
    primes: list[int] = []
    acc = CrtAccumulator()
    keys = None
    previous = None
    for _ in range(opts.max_primes):
        p = random_prime(rng, 2 ** lo, 2 ** hi, avoid=primes)
        Rp = modular_image(P, k, a, backend, p, fixed, opts, clock, report)
        ks = sorted(Rp.terms)
        if keys is None:
            keys = ks
        elif ks != keys:
            # a support change marks an unlucky prime; keep the larger support
            if len(ks) > len(keys):
                acc, keys, primes, previous = CrtAccumulator(), ks, [], None
            else:
                continue
        primes.append(p)
        acc.add(p, [Rp.terms[e] for e in keys])
        cand = _lift(acc, keys)
        if cand is not None and cand == previous:
            report["primes"] = primes
            return cand
        previous = cand
    raise ResourceLimit(f"rational reconstruction unstable after {opts.max_primes} primes")


def _divides(R: MultiPoly, S: MultiPoly) -> bool:
    """S | R in Q[t][z0] for primitive S."""
    rs, ss = _as_rows(R, "z0", "t"), _as_rows(S, "z0", "t")
    return not _prem_rows(rs, ss)


def select_factor(R: MultiPoly, spec: DdeSpec, seed: int = 0):
    """The factor of R that annihilates the series, found by guessing within R's degrees.

    Returns the guessed polynomial when it divides R, otherwise None.
    """
    dt, dz = R.degree("t"), R.degree("z0")
    if dz <= 1:
        return None
    sigma = max(2 * dt * dz + 2, (dt + 1) * (dz + 1) + 1)
    series = series_at_point(spec, sigma)[0]
    for cap_z in range(1, dz):
        try:
            S = guess_algebraic(series, dt, cap_z, seed=seed)
        except InsufficientPrecision:
            return None
        if S is not None:
            return S if _divides(R, S) else None
    return None


def _finish(R: MultiPoly, spec: DdeSpec, method: str, opts: SolveOptions, clock: _Clock,
            report: dict, cert: Certificate | None = None, do_certify: bool = False,
            probe=None) -> AnnihilatorResult:
    R = normalize_annihilator(R)
    report["raw_degrees"] = [R.degree("t"), R.degree("z0")]
    if opts.select_factor and spec.mode == "fixed" and method != "hgp":
        S = select_factor(R, spec, opts.seed)
        if S is not None and S != R:
            report["factor_selected"] = True
            probe = probe or (R.degree("t"), R.degree("z0"))
            R = S
    if do_certify and cert is None and spec.mode == "fixed":
        bound = probe or (R.degree("t"), R.degree("z0"))
        cert = certify(R, spec, "probe", tuple(bound))
    report["method"] = method
    report["ev_var"] = opts.ev_var
    report["wall_time"] = round(clock.elapsed(), 3)
    report.setdefault("primes", [])
    return AnnihilatorResult(R, R.degree("t"), R.degree("z0"), cert, report)


def _prepare(spec: DdeSpec, opts: SolveOptions, method: str):
    P = build_p(spec)
    rep = _check_h1(spec, P, opts)
    report = {"h1": rep.message()}
    return P, report


def _algebraic(spec: DdeSpec, opts: SolveOptions, method: str) -> AnnihilatorResult:
    clock = _Clock(opts.time_budget)
    if _is_trivial(spec):
        return _trivial_result(spec, method, opts, clock)
    P, report = _prepare(spec, opts, method)
    backend = method
    if method == "geom" and spec.k == 1:
        report["notice"] = "k = 1: geometric method degenerates, using elim"
        backend = "elim"
    if backend == "elim":
        _check_squarefree(P, spec.k)
    R = multimodular(P, spec.k, spec.a, backend, opts, clock, report)
    return _finish(R, spec, method, opts, clock, report, do_certify=bool(opts.certify))


def _trivial_result(spec: DdeSpec, method: str, opts: SolveOptions, clock: _Clock):
    R = _trivial_annihilator(spec)
    cert = certify(R, spec, "probe", (0, 1), order=1)
    report = {"notice": "Q = 0: F = f(u) and R = z0 - f(a)", "primes": [], "points": 0}
    return _finish(R, spec, method, opts, clock, report, cert=cert)


def _check_squarefree(P: MultiPoly, k: int, seed: int = 1):
    """Monte Carlo squarefreeness test of P in x and in u."""
    rng = random.Random(seed)
    p = 1000003
    for v in ("x", "u"):
        if P.degree(v) <= 0:
            continue
        bind = {w: rng.randrange(1, p) for w in P.vars if w != v}
        f = P.to_field(p).eval(bind).with_vars((v,)).to_upoly(v)
        if f.degree > 0 and f.gcd(f.derivative()).degree > 0:
            raise Diagnostic(f"P is not squarefree (repeated factor in {v})")


def solve_direct(spec: DdeSpec, opts: SolveOptions | None = None) -> AnnihilatorResult:
    opts = opts or SolveOptions(method="direct")
    return _algebraic(spec, opts, "direct")


def solve_elim(spec: DdeSpec, opts: SolveOptions | None = None) -> AnnihilatorResult:
    opts = opts or SolveOptions(method="elim")
    return _algebraic(spec, opts, "elim")


def solve_geom(spec: DdeSpec, opts: SolveOptions | None = None) -> AnnihilatorResult:
    opts = opts or SolveOptions(method="geom")
    return _algebraic(spec, opts, "geom")


# ---------------------------------------------------------------------------
# probes and hybrid guess-and-prove


def _series_mod(series, p):
    return [to_field(Fraction(c), p) for c in series]


def run_modular_probe(spec: DdeSpec, backend: str = "elim", p: int | None = None,
                      theta: int | None = None, seed: int = 0,
                      opts: SolveOptions | None = None) -> ModularProbe:
    """Degrees of R_p(t, θ) and R_p(θ, z0) from two single-point runs.

    For fixed-point specs the factor of R_p annihilating F(t, a) mod p is
    then isolated by a modular guess within those degrees, so the reported
    (d_t, d_z0) are those of that factor.
    """
    rng = random.Random(seed)
    opts = opts or SolveOptions(method="hgp", seed=seed)
    lo, hi = opts.prime_bits
    p = p or random_prime(rng, 2 ** lo, 2 ** hi)
    theta = theta or rng.randrange(1, p)
    if _is_trivial(spec):
        return ModularProbe(p, theta, 0, 1, 0, 1, backend)
    P = build_p(spec)
    _check_h1(spec, P, opts)
    k, a = spec.k, spec.a
    extra = {"seed": seed, "max_pairs": opts.max_pairs}
    if backend == "elim":
        extra["inequalities"] = opts.inequalities
    fn = _BACKENDS[backend]
    rz = fn(P, k, a, p, "t", theta, **extra).poly
    if backend == "geom":
        rt_deg = None
    else:
        rt_deg = fn(P, k, a, p, "z0", theta, **extra).poly.degree
    raw_t = rt_deg if rt_deg is not None else -1
    raw_z = rz.degree
    d_t, d_z = raw_t, raw_z
    if spec.mode == "fixed" and raw_t >= 0 and raw_z > 1:
        sel = _modular_selection(spec, raw_t, raw_z, p)
        if sel is not None:
            d_t, d_z = sel
    return ModularProbe(p, theta, d_t, d_z, raw_t, raw_z, backend)


def _modular_selection(spec: DdeSpec, dt: int, dz: int, p: int):
    """Degrees of the smallest relation mod p within caps (dt, dz)."""
    from .guess import _min_relation_mod
    sigma = max(2 * dt * dz + 2, (dt + 1) * (dz + 1) + 1)
    series = series_at_point(spec, sigma)[0]
    if any(Fraction(c).denominator % p == 0 for c in series):
        return None
    rel = _min_relation_mod(_series_mod(series, p), dt, dz, sigma, p)
    if rel is None:
        return None
    return max(i for (_, i) in rel), max(j for (j, _) in rel)


def solve_hgp(spec: DdeSpec, opts: SolveOptions | None = None) -> AnnihilatorResult:
    opts = opts or SolveOptions(method="hgp")
    if spec.mode != "fixed":
        raise ModeError("guess-and-prove needs the fixed-point form (f, Q)")
    clock = _Clock(opts.time_budget)
    if _is_trivial(spec):
        return _trivial_result(spec, "hgp", opts, clock)
    P = build_p(spec)
    rep = check_h1(spec, P)
    report: dict = {"h1": rep.message()}
    if not rep.ok:
        return _hgp_heuristic(spec, opts, clock, report)
    probe = run_modular_probe(spec, opts.probe_backend, seed=opts.seed, opts=opts)
    report["probe"] = probe.to_dict()
    report["primes"] = [probe.p]
    dt, dz = probe.d_t, probe.d_z0
    sigma = max(2 * dt * dz + 1, (dt + 1) * (dz + 1))
    while sigma <= opts.sigma_ceiling:
        clock.check()
        series = series_at_point(spec, sigma)[0]
        R = guess_algebraic(series, dt, dz, seed=opts.seed)
        if R is not None:
            cert = certify(R, spec, "probe", (dt, dz), series=series)
            if cert.status == "certified":
                report["sigma"] = sigma
                return _finish(R, spec, "hgp", opts, clock, report, cert=cert)
        sigma *= 2
    raise Diagnostic(f"guess ceiling reached: no certified annihilator up to sigma = "
                     f"{sigma // 2}")


def _hgp_heuristic(spec, opts, clock, report) -> AnnihilatorResult:
    """Probes unavailable: grow sigma and caps until a guess is stable."""
    report["notice"] = "H1 fails: degree probes skipped, heuristic doubling only"
    sigma = 16
    while sigma <= opts.sigma_ceiling:
        clock.check()
        series = series_at_point(spec, sigma)[0]
        R, caps = guess_ladder(series, seed=opts.seed)
        if R is not None:
            longer = series_at_point(spec, 2 * sigma)[0]
            v = certify(R, spec, "probe", caps, order=2 * sigma - 1, series=longer)
            if v.status != "refuted":
                report["sigma"] = sigma
                cert = Certificate("inconclusive-heuristic", v.order_checked, v.rule_order,
                                   "heuristic", list(caps))
                return _finish(R, spec, "hgp", opts, clock, report, cert=cert)
        sigma *= 2
    raise Diagnostic(f"guess ceiling reached at sigma = {sigma // 2}")


def solve(spec: DdeSpec, opts: SolveOptions) -> AnnihilatorResult:
    run = {"direct": solve_direct, "hgp": solve_hgp, "elim": solve_elim,
           "geom": solve_geom}[opts.method]
    with time_limit(opts.time_budget):
        return run(spec, opts)


# ---------------------------------------------------------------------------
# H4 (necessary condition only)


def _jacobian_det(polys: list, vars: list) -> MultiPoly:
    from .groebner import _det
    J = [[g.derive(v) for v in vars] for g in polys]
    one = MultiPoly.const(1, polys[0].vars, polys[0].p)
    n = len(vars)
    return _det(lambda r, c: J[r][c], tuple(range(n)), tuple(range(n)), one)


def check_h4(spec, N: int = 1, seed: int = 0) -> bool:
    """Jacobian of the duplicated system not identically zero on its saturated variety.

    A necessary-condition check only: the Puiseux point is not available.
    ``N`` specialisations of t are tried; any nonzero normal form passes.
    """
    rng = random.Random(seed)
    if isinstance(spec, DuplicatedSystem):
        dup, k = spec, sum(1 for v in spec.vars if v.startswith("u"))
        a = None
    else:
        dup, k, a = build_duplicated(spec), spec.k, spec.a
    jv = [v for v in dup.vars if v != "t"]
    det = _jacobian_det(dup.polys, jv)
    if det.is_zero():
        return False
    for _ in range(N):
        p = random_prime(rng)
        tau = rng.randrange(1, p)
        polys = [_specialize(g, p, {"t": tau}) for g in dup.polys]
        vars = tuple(v for v in dup.vars if v != "t")
        polys = [g.with_vars(vars) for g in polys]
        h = _specialize(dup.diag, p, {"t": tau}).with_vars(vars)
        I = saturate(polys, h, order=MonomialOrder.grevlex(vars))
        gb = buchberger(I, MonomialOrder.grevlex(vars))
        if gb.is_unit():
            continue
        d = _specialize(det, p, {"t": tau}).with_vars(vars)
        if not gb.contains(d):
            return True
    return False
