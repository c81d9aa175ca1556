import json
import subprocess
import sys
from fractions import Fraction

import pytest

from conftest import DATA
from hhk import cli
from hhk.bar import hochschild_direct
from hhk.cli import InhomogeneousRelation, main, parse_algebra, parse_algebras, parse_ring, parse_space
from hhk.poly import ParseError, parse_polynomial


def run(args, capsys):
    code = main(args)
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    lines = text.strip().splitlines()
    return lines[0].split("\t"), [tuple(int(x) for x in ln.split("\t")) for ln in lines[1:]]


# -- parsing ---------------------------------------------------------------------

def test_weighted_relation_accepted():
    spec = parse_algebra("algebra cusp\ngen x weight=3\ngen y weight=2\nrel x^2 + y^3\nend\n")
    assert spec.names == ("x", "y") and spec.weights == (3, 2)
    assert spec.algebra().dim(6) == 1


def test_inhomogeneous_relation_reported():
    with pytest.raises(InhomogeneousRelation) as exc:
        parse_algebra("algebra bad\ngen x weight=1\ngen y weight=1\nrel x^2 + y\nend\n")
    assert "relation 1" in str(exc.value) and "[1, 2]" in str(exc.value)


def test_parse_error_positions():
    with pytest.raises(ParseError) as exc:
        parse_algebra("algebra a\ngen x weight=1\nrel x^2 + z\nend\n")
    assert exc.value.line == 3 and exc.value.col == 11
    with pytest.raises(ParseError) as exc:
        parse_algebra("algebra a\ngen x weight=one\nend\n")
    assert exc.value.line == 2
    with pytest.raises(ParseError):
        parse_algebra("algebra a over F2\nend\n")
    with pytest.raises(ParseError):
        parse_algebra("algebra a\ngen x weight=1\n")
    with pytest.raises(ParseError):
        parse_algebra("# nothing here\n")


def test_comments_blank_lines_and_multiple_blocks():
    specs = parse_algebras("# two algebras\nalgebra a\ngen x weight=1\nend\n\nalgebra b\ngen y weight=2\nrel y^3\nend\n")
    assert list(specs) == ["a", "b"]
    assert specs["b"].relations == [{(3,): 1}]


def test_module_block():
    spec = parse_algebra("algebra r\ngen x weight=1\nmodgen m weight=0\nmodrel x*m\nend\n")
    a = spec.algebra()
    M = spec.module(a)
    assert [M.dim(w) for w in range(4)] == [1, 0, 0, 0]
    with pytest.raises(ParseError):
        parse_algebra("algebra r\ngen x weight=1\nmodgen m weight=0\nmodrel x\nend\n")


def test_polynomial_syntax():
    names = ["x", "y"]
    assert parse_polynomial("xy", names) == parse_polynomial("x*y", names)
    assert parse_polynomial("2xy^2 - 1/2 x", names) == {(1, 2): Fraction(2), (1, 0): Fraction(-1, 2)}
    assert parse_polynomial("(x + y)^2", names) == {(2, 0): 1, (1, 1): 2, (0, 2): 1}
    with pytest.raises(ParseError):
        parse_polynomial("x^-1", names)
    assert parse_polynomial("x^-1", names, allow_negative=True) == {(-1, 0): 1}
    with pytest.raises(ParseError):
        parse_polynomial("x $ y", names)


def test_parse_ring():
    assert parse_ring("Q[x,y]") == (["x", "y"], [1, 1])
    assert parse_ring("Q[x:3, y:2]") == (["x", "y"], [3, 2])
    with pytest.raises(ParseError):
        parse_ring("Z[x]")


def test_space_file():
    sp = parse_space((DATA / "p1.space").read_text())
    assert [c.names for c in sp.charts] == [("t",), ("s",)]
    ov = sp.overlaps[(0, 1)]
    assert ov.subs == {"s": {(-1,): 1}}
    assert ov.frames == {"s": {"t": {(2,): -1}}}
    with pytest.raises(ParseError):
        parse_space("algebra U\ngen t weight=1\nend\nspace X\nchart V\nend\n")
    with pytest.raises(ParseError):
        parse_space("algebra U\ngen t weight=1\nend\nspace X\nchart U\nchart U\noverlap 1 0 : t = t\nend\n")


# -- commands ----------------------------------------------------------------------

def test_direct_command_rows_sorted_and_reproducible(capsys):
    code, out, _ = run(["direct", "--algebra", str(DATA / "dual.alg"), "--n-max", "3", "--weight-max", "6"], capsys)
    assert code == 0
    header, body = rows(out)
    assert header == ["n", "weight", "dim"]
    assert body == sorted(body)
    assert {n for n, _, _ in body} == {0, 1, 2, 3}
    a = parse_algebra((DATA / "dual.alg").read_text()).algebra()
    for n, w, d in body:
        assert hochschild_direct(a, None, n, weight_max=w, weight_min=w) == {w: d}


def test_hkr_expanded_columns(capsys):
    code, out, _ = run(["hkr", "--algebra", str(DATA / "dual.alg"), "--n-max", "3", "--format", "expanded"], capsys)
    assert code == 0
    header, body = rows(out)
    assert header == ["n", "weight", "dim", "i", "j", "i_minus_j"]
    for n, w, d, i, j, raw in body:
        assert n == i + j and raw == i - j


def test_crosscheck_command_and_manifest(tmp_path, capsys):
    out_path = tmp_path / "cross.tsv"
    code, _, err = run(["crosscheck", "--algebra", str(DATA / "dual.alg"), "--output", str(out_path)], capsys)
    assert code == 0 and "direct vs hkr: ok" in err
    manifest = json.loads((tmp_path / "cross.tsv.manifest.json").read_text())
    assert manifest["command"] == "crosscheck" and manifest["exit_code"] == 0
    assert manifest["bounds"]["n_max"] == 4 and manifest["bounds"]["weight_max"] == 6
    assert len(next(iter(manifest["inputs"].values()))) == 64
    header, body = rows(out_path.read_text())
    assert [list(r) for r in body] == manifest["table"]


def test_crosscheck_mismatch_exit_code(monkeypatch, capsys):
    real = cli.hkr_table

    def skewed(*args, **kwargs):
        t = real(*args, **kwargs)
        t.entries[(0, 0, 0)] += 1
        return t

    monkeypatch.setattr(cli, "hkr_table", skewed)
    code, _, err = run(["crosscheck", "--algebra", str(DATA / "dual.alg"), "--n-max", "2", "--weight-max", "2"], capsys)
    assert code == 2 and "mismatching" in err


def test_koszul_command(capsys):
    code, out, _ = run(["koszul", "--ring", "Q[x,y]", "--seq", "xy,x", "--weight-max", "4"], capsys)
    assert code == 0
    assert out.splitlines()[0] == "koszul\tNOT REGULAR, witness weight 2"
    code, out, _ = run(["koszul", "--ring", "Q[x,y]", "--seq", "x,y", "--weight-max", "4"], capsys)
    assert code == 0 and "regular up to weight 4" in out


def test_global_command(capsys):
    code, out, err = run(["global", "--space", str(DATA / "p1.space"), "--weight-max", "3"], capsys)
    assert code == 0 and "simplicial vs decomposition: ok" in err
    header, body = rows(out)
    assert header == ["n", "weight", "dim", "i", "j"]
    assert sum(d for n, w, d, i, j in body if j == 1 and i == 0) == 3


def test_bar_homotopy_command(capsys):
    code, out, _ = run(["bar-homotopy", "--algebra", str(DATA / "cusp.alg"), "--n-max", "2", "--weight-max", "4"], capsys)
    assert code == 0 and out.startswith("pass")


def test_input_errors_exit_one(tmp_path, capsys):
    code, _, err = run(["direct", "--algebra", str(DATA / "bad.alg")], capsys)
    assert code == 1 and err.startswith("error[cli.InhomogeneousRelation]")
    code, _, err = run(["direct", "--algebra", str(tmp_path / "missing.alg")], capsys)
    assert code == 1
    code, _, err = run(["koszul", "--ring", "Q[x]", "--seq", "x + x^2"], capsys)
    assert code == 1 and "InhomogeneousElement" in err


def test_bound_exhaustion_exit_three(capsys):
    code, _, err = run(["hkr", "--algebra", str(DATA / "dual.alg"), "--hdeg-min", "-2"], capsys)
    assert code == 3 and "BoundTooSmall" in err


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "hhk.cli", "direct", "--algebra", str(DATA / "cusp.alg"),
                           "--n-max", "1", "--weight-max", "2"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("n\tweight\tdim\n")
