import json

import pytest

from catalix.cli import main

CUBIC = "81*t^2*z0^3 - 81*t^2*z0^2 + 18*t*z0^2 + 27*t^2*z0 - 66*t*z0 + z0 - 3*t^2 + 47*t - 1"


def run(capsys, *argv):
    rc = main(list(argv))
    out, err = capsys.readouterr()
    return rc, out, err


@pytest.fixture
def cubic_file(tmp_path):
    f = tmp_path / "cubic.txt"
    f.write_text(CUBIC + "\n")
    return str(f)


@pytest.mark.parametrize("name,sigma,expected", [
    ("3const.dde", 5, "1, 1, 6, 54, 594"),
    ("q0.dde", 4, "1, 0, 0, 0"),
    ("catalan.dde", 6, "1, 1, 2, 5, 14, 42"),
])
def test_expand(capsys, name, sigma, expected):
    rc, out, _ = run(capsys, "expand", name, "--sigma", str(sigma))
    assert rc == 0 and out.strip() == expected


def test_expand_full_and_at(capsys):
    rc, out, _ = run(capsys, "expand", "tutte", "--sigma", "3", "--full")
    assert rc == 0 and out.splitlines()[1] == "t^1: u^2 + u"
    rc, out, _ = run(capsys, "expand", "tutte", "--sigma", "3", "--at", "1")
    assert out.strip() == "1, 2, 9"


def test_list(capsys):
    rc, out, _ = run(capsys, "--list")
    assert "3const.dde" in out.split()


def test_solve_tutte_elim_matches_direct(capsys):
    reports = []
    for m in ("elim", "direct"):
        rc, out, _ = run(capsys, "solve", "tutte.dde", "--method", m)
        assert rc == 0
        reports.append(json.loads(out))
    assert reports[0]["result"]["R"] == reports[1]["result"]["R"]
    assert reports[0]["result"]["R"] == "27*t^2*z0^2 - 18*t*z0 + z0 + 16*t - 1"


def test_solve_human_table(capsys):
    rc, out, _ = run(capsys, "solve", "tutte.dde", "--method", "elim", "--human", "--certify")
    assert rc == 0
    header = out.splitlines()[0]
    for col in ("S", "#𝒫", "Z", "#pts", "d_cp", "d_χ", "T", "d_t", "d_z0"):
        assert f" {col} " in header
    assert "certified" in out


def test_solve_catalan_direct_diagnostic(capsys):
    rc, _, err = run(capsys, "solve", "catalan.dde", "--method", "direct")
    assert rc == 4
    assert "H1 violated: deg_u ∂_xP at t=0 is 0 < k" in err


def test_unknown_method_is_rejected(capsys):
    with pytest.raises(SystemExit) as info:
        main(["solve", "tutte.dde", "--method", "newton"])
    assert info.value.code == 2


def test_probe(capsys):
    rc, out, _ = run(capsys, "probe", "q0.dde")
    assert rc == 0 and "d_t = 0, d_z0 = 1" in out


def test_check(capsys, cubic_file, tmp_path):
    rc, out, _ = run(capsys, "check", "3const.dde", "--poly", cubic_file, "--order", "20")
    assert rc == 0 and out.startswith("certified")
    rc, out, _ = run(capsys, "check", "3const.dde", "--poly", cubic_file, "--order", "11",
                     "--bound", "2", "3")
    assert rc == 1 and out.startswith("inconclusive")
    z = tmp_path / "z.txt"
    z.write_text("z0 - 1\n")
    rc, out, _ = run(capsys, "check", "catalan.dde", "--poly", str(z), "--json")
    cert = json.loads(out)
    assert rc == 1 and cert["status"] == "refuted" and cert["residual_valuation"] == 1


def test_exit_codes(capsys, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("z0 - \n")
    rc, _, err = run(capsys, "check", "3const.dde", "--poly", str(bad), "--bound", "2", "3")
    assert rc == 2 and "column" in err
    rc, _, _ = run(capsys, "expand", str(tmp_path / "missing.dde"))
    assert rc == 2
    poly = tmp_path / "poly.dde"
    poly.write_text("order: 1\npoint: 1\nP: (u-1)*(x - 1) - t*u*(u-1)*x^2\n")
    rc, _, err = run(capsys, "expand", str(poly))
    assert rc == 3
    rc, _, err = run(capsys, "solve", "4const.dde", "--method", "elim", "--time-budget", "1")
    assert rc == 5
