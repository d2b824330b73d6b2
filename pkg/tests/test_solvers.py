import itertools

import pytest

from catalix.cli import read_spec
from catalix.dde import parse_dde
from catalix.guess import TZ, certify
from catalix.mpoly import MultiPoly, parse_poly
from catalix.solvers import (Diagnostic, DuplicatedSystem, SolveOptions, build_duplicated,
                             check_h4, geom_from_ideal, run_modular_probe, solve)

CUBIC = parse_poly("81*t^2*z0^3 - 81*t^2*z0^2 + 18*t*z0^2 + 27*t^2*z0 - 66*t*z0 + z0"
                   " - 3*t^2 + 47*t - 1", TZ)
TUTTE = parse_poly("27*t^2*z0^2 - 18*t*z0 + z0 + 16*t - 1", TZ)


def test_duplicated_k1_is_the_plain_system():
    dup = build_duplicated(read_spec("tutte"))
    assert len(dup.polys) == 3
    assert dup.diag == MultiPoly.var("u1", dup.vars) - 1


def test_duplicated_k2_shape_and_symmetry():
    dup = build_duplicated(read_spec("3const"))
    assert len(dup.polys) == 6
    assert dup.vars == ("x1", "u1", "x2", "u2", "z0", "z1", "t")
    u1, u2 = (MultiPoly.var(v, dup.vars) for v in ("u1", "u2"))
    assert dup.diag == (u1 - u2) * (u1 - 1) * (u2 - 1)
    swap = {"x1": MultiPoly.var("x2", dup.vars), "u1": u2,
            "x2": MultiPoly.var("x1", dup.vars), "u2": u1}
    swapped = {g.eval(swap).with_vars(dup.vars) for g in dup.polys}
    assert swapped == set(dup.polys)


def test_h4():
    assert check_h4(read_spec("3const"))
    assert check_h4(read_spec("tutte"))
    dup = build_duplicated(read_spec("tutte"))
    repeated = DuplicatedSystem([dup.polys[0], dup.polys[1], dup.polys[0]], dup.diag, dup.vars)
    assert not check_h4(repeated)


def test_geom_on_toy_ideal():
    p = 1000003
    x, u, z1, z0 = MultiPoly.gens(["x", "u", "z1", "z0"], p)
    r, chi, D, _ = geom_from_ideal([x - z1, u - z1, z1**2 - z0], p)
    assert D == 2
    assert chi == MultiPoly.gens(["z1", "z0"], p)[0] ** 2 - MultiPoly.gens(["z1", "z0"], p)[1]
    assert r.coeffs == [0, 1]


def test_geom_rejects_positive_dimensional_fibres():
    p = 1000003
    x, u, z1, z0 = MultiPoly.gens(["x", "u", "z1", "z0"], p)
    with pytest.raises(Diagnostic):
        geom_from_ideal([x - z1], p, max_samples=16)


def test_degenerate_p_gives_diagnostic():
    spec = parse_dde("order: 1\npoint: 1\nP: x - 1\n")
    with pytest.raises(Diagnostic):
        solve(spec, SolveOptions(method="elim"))


def test_h1_failure_is_a_diagnostic():
    with pytest.raises(Diagnostic, match="H1 violated"):
        solve(read_spec("catalan"), SolveOptions(method="direct"))


@pytest.mark.parametrize("method", ["elim", "direct", "hgp", "geom"])
def test_tutte_all_methods(method):
    res = solve(read_spec("tutte"), SolveOptions(method=method, certify=True))
    assert res.R == TUTTE
    assert res.certificate.status == "certified"
    if method == "geom":
        assert "elim" in res.provenance["notice"]


def test_q0_shortcut():
    res = solve(read_spec("q0"), SolveOptions(method="hgp"))
    assert res.R == parse_poly("z0 - 1", TZ)
    assert res.certificate.status == "certified" and res.certificate.order_checked == 1


def test_catalan_heuristic_path():
    res = solve(read_spec("catalan"), SolveOptions(method="hgp"))
    assert res.R == parse_poly("t*z0^2 - z0 + 1", TZ)
    assert res.certificate.status == "inconclusive-heuristic"


def test_probe_q0_and_3const():
    q0 = run_modular_probe(read_spec("q0"))
    assert (q0.d_t, q0.d_z0) == (0, 1)
    a = run_modular_probe(read_spec("3const"), seed=1)
    b = run_modular_probe(read_spec("3const"), seed=2)
    assert a.p != b.p
    assert (a.d_t, a.d_z0) == (b.d_t, b.d_z0) == (2, 3)


def test_3const_hgp():
    res = solve(read_spec("3const"), SolveOptions(method="hgp"))
    assert res.R == CUBIC
    assert res.certificate.status == "certified"
    assert res.provenance["sigma"] <= 48


def test_determinism():
    spec = read_spec("tutte")
    runs = []
    for _ in range(2):
        d = solve(spec, SolveOptions(method="elim", seed=7)).to_dict()
        d["provenance"].pop("wall_time")
        runs.append(d)
    assert runs[0] == runs[1]


def test_round_trip_solve_then_check():
    spec = read_spec("tutte")
    res = solve(spec, SolveOptions(method="direct"))
    assert certify(res.R, spec, "probe", (2, 2)).status == "certified"


@pytest.mark.parametrize("f,Q", [
    ("2 + 3*u", "1 + 2*x - y1 + 3*y2 + u"),
    ("1 - u", "3 + x + 2*y1 - y2 + 2*u"),
])
def test_linear_k2_methods_agree(f, Q):
    from catalix.dde import fixed_point_spec
    spec = fixed_point_spec(f, Q, 2, 1, "lin")
    outs = [solve(spec, SolveOptions(method=m)).R for m in ("elim", "direct", "geom", "hgp")]
    for a, b in itertools.combinations(outs, 2):
        assert a == b
