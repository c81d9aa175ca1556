"""Acceptance criteria AC1-AC9.

Each test records one PASS/FAIL line, printed in the pytest terminal summary.
Run standalone with ``python tests/test_acceptance.py`` for the same lines
without pytest.
"""
import subprocess
import sys
import time
from itertools import product

import pytest

from conftest import DATA, algebra, corpus, polyvector_dims
from hhk.bar import bar_differentials, contracting_homotopy_check, hochschild_direct_table
from hhk.cech import Chart, Overlap, Space, cech_cohomology, global_hh_smooth, polyvector_module, \
    SimplicialAlgebra, simplicial_hochschild
from hhk.cli import parse_space
from hhk.dgalg import check_square_zero, slice_complex, weight_basis
from hhk.koszul import is_regular_up_to, koszul_complex, koszul_homology, polynomial_ring, zero_divisor_check
from hhk.poly import parse_polynomial
from hhk.resolvent import hkr_table, kaehler, normal_cone_check, resolvent_independence, tate_resolvent


def dg_corpus():
    """Free DG algebras: polynomial rings, Koszul complexes, exterior algebras, Tate resolvents."""
    out = {}
    for names in (["x"], ["x", "y"], ["x", "y", "z"]):
        R = polynomial_ring(names)
        out[f"Q[{','.join(names)}]"] = R
        out[f"Omega Q[{','.join(names)}]"] = kaehler(R).algebra
    koszul_cases = [
        (["x"], None, ["x^2"]),
        (["x", "y"], None, ["x^2 + y^2"]),
        (["x", "y"], [3, 2], ["x^2 - y^3"]),
        (["x", "y", "z"], None, ["x", "y", "z"]),
        (["x", "y"], None, ["x*y", "x"]),
    ]
    for names, wts, seq in koszul_cases:
        R = polynomial_ring(names, wts)
        out[f"K({','.join(seq)})"] = koszul_complex(R, seq).algebra
    algs = corpus()
    algs["x2,xy,y2"] = algebra([("x", 1), ("y", 1)], ["x^2", "x*y", "y^2"])
    for label, a in algs.items():
        res = tate_resolvent(a, -6, 8)
        out[f"Tate {label}"] = res.algebra
        out[f"Omega Tate {label}"] = kaehler(res).algebra
    return out


def ac1():
    start = time.perf_counter()
    algs = dg_corpus()
    checked = 0
    for label, alg in algs.items():
        if check_square_zero(alg) is not None:
            return False, f"{label}: d^2 != 0 on a generator"
        for w in range(0, 9):
            basis = [m for m in weight_basis(alg, w) if alg.mono_hdeg(m) >= -6]
            for m in basis:
                if alg.d(alg.d({m: 1})):
                    return False, f"{label}: d^2 != 0 on a weight {w} monomial"
            checked += len(basis)
            degrees = [alg.mono_degree(m) for m in basis]
            if degrees and len(basis) < 2000:
                # raises CompositeNotZero on failure
                slice_complex(alg, w, min(degrees) - 1, max(degrees) + 1)
    bar_slices = 0
    for label, a in corpus().items():
        for w in range(0, 5):
            lower = bar_differentials(a, None, 1, w)
            for n in range(2, 5):
                upper = bar_differentials(a, None, n, w)
                assert upper.b_target == lower.basis and upper.bar_target == lower.bar_basis
                if not (lower.b_matrix @ upper.b_matrix).is_zero():
                    return False, f"{label}: b^2 != 0 at bar degree {n}, weight {w}"
                if not (lower.b_prime_matrix @ upper.b_prime_matrix).is_zero():
                    return False, f"{label}: b'^2 != 0 at bar degree {n}, weight {w}"
                lower = upper
                bar_slices += 1
    elapsed = time.perf_counter() - start
    ok = len(algs) >= 10 and elapsed < 120
    return ok, f"{len(algs)} DG algebras, {checked} basis monomials, {bar_slices} bar slices, {elapsed:.1f}s"


def sequences():
    """(ring names, weights, sequence) cases, regular and not."""
    xyz = ["x", "y", "z"]
    fixed = [
        (["x", "y"], None, ["x", "y"]),
        (["x", "y"], None, ["x*y", "x"]),
        (["x", "y"], None, ["x", "x*y"]),
        (["x", "y"], None, ["x^2", "y^3"]),
        (["x", "y"], None, ["x + y", "x - y"]),
        (["x", "y"], None, ["x^2", "x*y"]),
        (["x", "y"], None, ["x*y", "x^2 + y^2"]),
        (["x", "y"], None, ["x^2 - y^2", "x*y"]),
        (["x", "y"], [3, 2], ["x^2 - y^3", "x*y"]),
        (["x", "y"], [3, 2], ["y", "x^2 - y^3"]),
        (xyz, None, ["x", "y", "z"]),
        (xyz, None, ["x*y", "y*z", "z*x"]),
        (xyz, None, ["x^2", "y^2", "z^2"]),
        (xyz, None, ["x*y", "z"]),
        (xyz, None, ["x*z", "y*z"]),
        (xyz, None, ["x + y + z", "x*y + y*z + z*x", "x*y*z"]),
        (xyz, None, ["x - y", "y - z", "z - x"]),
        (xyz, None, ["x^2 - y*z", "y^2 - x*z"]),
        (xyz, None, ["x", "x*y", "z"]),
        (xyz, None, ["x^3", "y^2 + z^2", "x*y"]),
    ]
    # products of linear forms with small coefficients
    forms = ["x", "y", "z", "x + y", "y - z", "x + z"]
    for a, b in list(product(range(len(forms)), repeat=2))[::7]:
        fixed.append((xyz, None, [forms[a], f"({forms[b]})*({forms[a]} + z)"]))
    return fixed


def ac2():
    cases = sequences()
    n_regular = 0
    for names, wts, seq in cases:
        R = polynomial_ring(names, wts)
        v1 = is_regular_up_to(R, seq, 6)
        v2 = zero_divisor_check(R, seq, 6)
        if v1.regular != v2.regular:
            return False, f"{seq}: koszul says {v1}, zero-divisor test says {v2}"
        if v1.regular:
            n_regular += 1
            K = koszul_complex(R, seq)
            for i in (1, 2, 3):
                for w in range(0, 7):
                    if koszul_homology(K, -i, w):
                        return False, f"{seq}: H^-{i} nonzero at weight {w}"
    ok = len(cases) >= 20 and 0 < n_regular < len(cases)
    return ok, f"{len(cases)} sequences ({n_regular} regular)"


AC3_ALGEBRAS = ["Q[x]", "Q[x,y]", "Q[x,y,z]", "dual", "x2+y2", "xy"]


def ac3():
    start = time.perf_counter()
    algs = corpus()
    for label in AC3_ALGEBRAS:
        a = algs[label]
        direct = hochschild_direct_table(a, None, 4, 6)
        hkr = hkr_table(tate_resolvent(a, -6, 8), None, 4, 6).table()
        for key in sorted(set(direct) | set(hkr)):
            if direct.get(key, 0) != hkr.get(key, 0):
                return False, f"{label}: (n, w) = {key}: direct {direct.get(key, 0)}, hkr {hkr.get(key, 0)}"
    elapsed = time.perf_counter() - start
    return elapsed < 600, f"{len(AC3_ALGEBRAS)} algebras, n <= 4, weight <= 6, {elapsed:.1f}s"


def ac4():
    cases = 0
    for m in (1, 2, 3):
        names = ["x", "y", "z"][:m]
        a = algebra([(nm, 1) for nm in names])
        table = hochschild_direct_table(a, None, min(m + 1, 4), 6)
        for (n, w), d in table.items():
            expected = polyvector_dims([1] * m, n, w) if n <= m else 0
            if d != expected:
                return False, f"Q[{','.join(names)}]: HH^{n} weight {w} is {d}, expected {expected}"
            cases += 1
    weighted = algebra([("x", 2), ("y", 3)])
    for (n, w), d in hochschild_direct_table(weighted, None, 3, 6).items():
        expected = polyvector_dims([2, 3], n, w) if n <= 2 else 0
        if d != expected:
            return False, f"Q[x:2,y:3]: HH^{n} weight {w} is {d}, expected {expected}"
        cases += 1
    return True, f"{cases} (n, weight) entries"


def ac5():
    algs = corpus()
    labels = ["Q[x,y]", "dual", "cusp"]
    checked = 0
    for label in labels:
        rep = contracting_homotopy_check(algs[label], 3, 5)
        if not rep.ok:
            return False, f"{label}: counterexample {rep.counterexample}"
        checked += rep.checked
    return True, f"{len(labels)} algebras, {checked} basis tensors"


def ac6():
    algs = corpus()
    labels = ["dual", "xy", "cusp"]
    for label in labels:
        ok, problems = resolvent_independence(algs[label], -6, 8, 4, 6)
        if not ok:
            return False, f"{label}: {problems[0]}"
    return True, f"{len(labels)} singular algebras, padded and reordered resolvents"


def ac7():
    labels = []
    for names in (["x"], ["x", "y"], ["x", "y", "z"]):
        rep = normal_cone_check(polynomial_ring(names), 6)
        if not rep.ok:
            return False, f"Q[{','.join(names)}]: {rep.failures[0]}"
        labels.append(f"Q[{','.join(names)}] ({rep.slices_checked} slices)")
    return True, ", ".join(labels)


def _aggregate(F, weight_max):
    out = {}
    for w in range(-weight_max, weight_max + 1):
        for i, d in cech_cohomology(F, w).items():
            out[i] = out.get(i, 0) + d
    return out


def ac8():
    start = time.perf_counter()
    P1 = SimplicialAlgebra(parse_space((DATA / "p1.space").read_text()))
    O = _aggregate(polyvector_module(P1, 0), 6)
    T = _aggregate(polyvector_module(P1, 1), 6)
    got = (O.get(0, 0), O.get(1, 0), T.get(0, 0), T.get(1, 0))
    if got != (1, 0, 3, 0):
        return False, f"P1: (H0 O, H1 O, H0 T, H1 T) = {got}"
    g = global_hh_smooth(P1, None, 6, -6)
    s = simplicial_hochschild(P1, 4, 6, -6)
    agg = {}
    for (i, j, w), d in g.items():
        agg[(i + j, w)] = agg.get((i + j, w), 0) + d
    for key in set(agg) | set(s):
        if agg.get(key, 0) != s.get(key, 0):
            return False, f"P1: simplicial {s.get(key, 0)} vs decomposition {agg.get(key, 0)} at {key}"
    one = Space("A1", [Chart("U", ("t",), (1,))])
    two = Space("A1", [Chart("U", ("t",), (1,)), Chart("V", ("t",), (1,), frozenset({"t"}))],
                {(0, 1): Overlap(0, 1, {"t": parse_polynomial("t", ["t"])}, {"t": {"t": {(0,): 1}}})})
    a1 = global_hh_smooth(one, None, 6, -6)
    a2 = global_hh_smooth(two, None, 6, -6)
    for key in set(a1) | set(a2):
        if a1.get(key, 0) != a2.get(key, 0):
            return False, f"A1: one chart {a1.get(key, 0)} vs two charts {a2.get(key, 0)} at {key}"
    elapsed = time.perf_counter() - start
    return elapsed < 60, f"P1 {got}, A1 covers agree, {elapsed:.1f}s"


def ac9(tmp_dir):
    outs = []
    for threads in (1, 4):
        path = tmp_dir / f"crosscheck-{threads}.tsv"
        proc = subprocess.run([sys.executable, "-m", "hhk.cli", "crosscheck", "--algebra", str(DATA / "cusp.alg"),
                               "--threads", str(threads), "--output", str(path)], capture_output=True, text=True)
        if proc.returncode != 0:
            return False, f"--threads {threads}: exit {proc.returncode}: {proc.stderr.strip()}"
        outs.append(path.read_bytes())
    return outs[0] == outs[1] and len(outs[0]) > 0, f"{len(outs[0])} bytes, threads 1 vs 4"


CRITERIA = {"AC1": ac1, "AC2": ac2, "AC3": ac3, "AC4": ac4, "AC5": ac5, "AC6": ac6, "AC7": ac7, "AC8": ac8}


@pytest.mark.parametrize("label", list(CRITERIA))
def test_criterion(label, record):
    ok, detail = CRITERIA[label]()
    record(label, ok, detail)
    assert ok, detail


def test_ac9_determinism(tmp_path, record):
    ok, detail = ac9(tmp_path)
    record("AC9", ok, detail)
    assert ok, detail


if __name__ == "__main__":
    import tempfile
    from pathlib import Path

    failed = 0
    for label, fn in list(CRITERIA.items()) + [("AC9", lambda: ac9(Path(tempfile.mkdtemp())))]:
        try:
            ok, detail = fn()
        except Exception as exc:  # report and continue
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        failed += not ok
        print(f"{label}: {'PASS' if ok else 'FAIL'}  {detail}")
    sys.exit(1 if failed else 0)
