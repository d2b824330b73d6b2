"""Command-line driver: ``catalix {expand,solve,probe,check} FILE ...``.

Exit codes: 0 success, 1 check not certified, 2 parse error, 3 mode error,
4 hypothesis diagnostic, 5 resource ceiling.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .dde import ModeError, expand_series, load_dde, parse_dde, series_at_point
from .groebner import ResourceLimit
from .guess import TZ, bound_b, certify
from .mpoly import MonomialOrder, ParseError, parse_poly
from .solvers import (METHODS, PRIME_BITS_ENV, Diagnostic, SolveOptions,
                      default_prime_bits, run_modular_probe, solve)

EXIT_OK, EXIT_NOT_CERTIFIED, EXIT_PARSE, EXIT_MODE, EXIT_DIAG, EXIT_RESOURCE = 0, 1, 2, 3, 4, 5
LEX = MonomialOrder.lex("z0", "t")


def corpus_files() -> list[str]:
    return sorted(p.name for p in resources.files("catalix").joinpath("data").iterdir()
                  if p.name.endswith(".dde"))


def read_spec(name: str):
    """Load a DDE file; bare corpus names such as ``3const.dde`` also work."""
    path = Path(name)
    if not path.exists():
        data = resources.files("catalix").joinpath("data")
        cand = data.joinpath(name if name.endswith(".dde") else name + ".dde")
        if cand.is_file():
            spec = parse_dde(cand.read_text(encoding="utf-8"))
            if "long-running" in cand.read_text(encoding="utf-8").lower():
                spec.tags.append("long-running")
            return spec
        raise FileNotFoundError(name)
    return load_dde(path)


def _bits(text: str) -> tuple[int, int]:
    lo, _, hi = text.partition(":")
    return int(lo), int(hi or lo)


def _fmt(c) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


# ---------------------------------------------------------------------------
# commands


def cmd_expand(args) -> int:
    spec = read_spec(args.file)
    if spec.mode != "fixed":
        raise ModeError("expansion needs the fixed-point form (f, Q)")
    if args.full or args.at is not None:
        F = expand_series(spec, args.sigma)
        if args.full:
            for n, c in enumerate(F.coeffs):
                print(f"t^{n}: {c}")
            return EXIT_OK
        at = Fraction(args.at)
        print(", ".join(_fmt(c(at)) for c in F.coeffs))
        return EXIT_OK
    print(", ".join(_fmt(c) for c in series_at_point(spec, args.sigma)[0]))
    return EXIT_OK


def _options(args, method: str) -> SolveOptions:
    return SolveOptions(method=method, ev_var=args.ev_var, max_primes=args.primes,
                        max_points=args.points, prime_bits=args.prime_bits,
                        certify=True if args.certify else None, seed=args.seed,
                        jobs=args.jobs, max_pairs=args.max_pairs,
                        time_budget=args.time_budget,
                        inequalities=not args.no_inequalities,
                        select_factor=not args.raw, override_h1=args.override_h1)


def _report(spec, command: str, options: dict, result: dict | None, error: str | None = None):
    return {"spec": spec.name, "command": command, "options": options,
            "result": result, "error": error}


def human_table(res) -> str:
    prov = res.provenance
    cols = ["S", "#𝒫", "Z", "#pts", "d_cp", "d_χ", "T", "d_t", "d_z0"]
    vals = [prov.get("method", ""), str(len(prov.get("primes", []))), prov.get("ev_var", ""),
            str(prov.get("points", "-")), str(prov.get("d_cp", "-")),
            str(prov.get("d_chi", "×")), f"{prov.get('wall_time', 0):.2f}s",
            str(res.deg_t), str(res.deg_z0)]
    w = [max(len(c), len(v)) for c, v in zip(cols, vals)]
    line = lambda xs: "| " + " | ".join(x.ljust(n) for x, n in zip(xs, w)) + " |"
    out = [line(cols), line(["-" * n for n in w]), line(vals), "",
           f"R = {res.R.format(LEX)}"]
    if res.certificate:
        out.append(f"certificate: {res.certificate}")
    return "\n".join(out)


def cmd_solve(args) -> int:
    spec = read_spec(args.file)
    opts = _options(args, args.method)
    res = solve(spec, opts)
    if args.human:
        print(human_table(res))
    else:
        options = {"method": opts.method, "ev_var": opts.ev_var, "seed": opts.seed,
                   "certify": bool(args.certify), "primes": opts.max_primes}
        print(json.dumps(_report(spec, "solve", options, res.to_dict()), indent=2,
                         default=str))
    return EXIT_OK


def cmd_probe(args) -> int:
    spec = read_spec(args.file)
    opts = SolveOptions(method="hgp", prime_bits=args.prime_bits, seed=args.seed,
                        max_pairs=args.max_pairs, override_h1=args.override_h1)
    probes = []
    for i in range(args.count):
        probes.append(run_modular_probe(spec, args.method, seed=args.seed + i, opts=opts))
    if args.json:
        print(json.dumps([p.to_dict() for p in probes], indent=2))
    else:
        for pr in probes:
            print(f"p = {pr.p}, theta = {pr.theta}, d_t = {pr.d_t}, d_z0 = {pr.d_z0}"
                  + (f" (backend output {pr.raw_d_t}, {pr.raw_d_z0})"
                     if (pr.raw_d_t, pr.raw_d_z0) != (pr.d_t, pr.d_z0) else ""))
    return EXIT_OK


def cmd_check(args) -> int:
    spec = read_spec(args.file)
    if spec.mode != "fixed":
        raise ModeError("certification needs the fixed-point form (f, Q)")
    text = Path(args.poly).read_text(encoding="utf-8")
    R = parse_poly(text.strip(), TZ)
    if R.is_zero():
        raise ParseError("the zero polynomial cannot be certified", 1, 1)
    mode = args.mode
    bound = None
    if mode == "probe" and args.bound:
        bound = tuple(args.bound)
    elif mode == "probe":
        # probe degrees come from the equation, never from R itself
        try:
            pr = run_modular_probe(spec, "elim", seed=args.seed)
            bound = (pr.d_t, pr.d_z0)
        except Diagnostic as exc:
            print(f"notice: probe unavailable ({exc}); using the degree bound rule",
                  file=sys.stderr)
            mode = "bound"
    if mode == "bound":
        bound = args.b if args.b is not None else bound_b(spec)
    cert = certify(R, spec, mode, bound, order=args.order)
    if args.json:
        print(json.dumps(cert.to_dict()))
    else:
        print(cert)
    return EXIT_OK if cert.status == "certified" else EXIT_NOT_CERTIFIED


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="catalix", description=__doc__.splitlines()[0])
    ap.add_argument("--list", action="store_true", help="list the bundled DDE files")
    sub = ap.add_subparsers(dest="command")

    e = sub.add_parser("expand", help="coefficients of F(t, a)")
    e.add_argument("file")
    e.add_argument("--sigma", type=int, default=10)
    e.add_argument("--at", help="evaluate F(t, u) at this u instead of the spec point")
    e.add_argument("--full", action="store_true", help="print F(t, u) coefficient-wise")
    e.set_defaults(func=cmd_expand)

    s = sub.add_parser("solve", help="compute an annihilating polynomial R(t, z0)")
    s.add_argument("file")
    s.add_argument("--method", choices=METHODS, default="hgp")
    s.add_argument("--ev-var", choices=("t", "z0"), default="t")
    s.add_argument("--primes", type=int, default=12, help="maximum number of primes")
    s.add_argument("--points", type=int, default=2048, help="maximum evaluation points")
    s.add_argument("--prime-bits", type=_bits, default=default_prime_bits(),
                   help=f"LO:HI, primes in [2^LO, 2^HI) (default from ${PRIME_BITS_ENV})")
    s.add_argument("--certify", action="store_true")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--max-pairs", type=int, help="critical pair budget per basis")
    s.add_argument("--time-budget", type=float, help="seconds before giving up (exit 5)")
    s.add_argument("--no-inequalities", action="store_true",
                   help="elim: keep only the equations of the fibre conditions")
    s.add_argument("--raw", action="store_true",
                   help="skip isolating the factor that annihilates the series")
    s.add_argument("--override-h1", action="store_true")
    s.add_argument("--human", action="store_true", help="table instead of JSON")
    s.set_defaults(func=cmd_solve)

    p = sub.add_parser("probe", help="modular degree probe d_t, d_z0")
    p.add_argument("file")
    p.add_argument("--method", choices=("direct", "elim", "geom"), default="elim")
    p.add_argument("--prime-bits", type=_bits, default=default_prime_bits())
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=1, help="number of independent probes")
    p.add_argument("--max-pairs", type=int)
    p.add_argument("--override-h1", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_probe)

    c = sub.add_parser("check", help="certify R(t, F(t, a)) = 0")
    c.add_argument("file")
    c.add_argument("--poly", required=True, help="file with R in t, z0")
    c.add_argument("--order", type=int, help="check to this order instead of the rule order")
    c.add_argument("--mode", choices=("probe", "bound"), default="probe")
    c.add_argument("--bound", type=int, nargs=2, metavar=("D_T", "D_Z0"),
                   help="probe degrees (default: run a modular probe)")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--b", type=int, help="degree bound for --mode bound (default computed)")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_check)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.list:
        print("\n".join(corpus_files()))
        return EXIT_OK
    if not args.command:
        ap.print_help()
        return EXIT_PARSE
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except FileNotFoundError as exc:
        print(f"no such file: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ModeError as exc:
        print(f"mode error: {exc}", file=sys.stderr)
        return EXIT_MODE
    except Diagnostic as exc:
        print(f"diagnostic: {exc}", file=sys.stderr)
        return EXIT_DIAG
    except ResourceLimit as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
