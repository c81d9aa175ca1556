import pytest

from conftest import algebra, corpus, truncated_polynomial_hh
from hhk.bar import hochschild_direct_table
from hhk.dgalg import FreeDGAlgebra, Generator, check_square_zero
from hhk.koszul import polynomial_ring
from hhk.resolvent import (
    BoundTooSmall,
    hkr_table,
    kaehler,
    normal_cone_check,
    pad_resolvent,
    resolvent_independence,
    right_partial,
    tate_resolvent,
)


@pytest.mark.parametrize("label", ["dual", "xy", "cusp", "x2+y2"])
def test_tate_resolvent_resolves(label):
    a = corpus()[label]
    res = tate_resolvent(a, -4, 8)
    for w in range(0, 9):
        assert res.homology_dims(0, w) == a.dim(w)
        for h in range(-4, 0):
            assert res.homology_dims(h, w) == 0


def test_complete_intersection_needs_only_hdeg_minus_one():
    res = tate_resolvent(corpus()["dual"], -5, 8)
    assert sorted(res.generators_by_hdeg()) == [-1, 0]
    assert res.certified_bounds == (-5, 8)


def test_non_complete_intersection_keeps_growing():
    a = algebra([("x", 1), ("y", 1)], ["x^2", "x*y", "y^2"])
    by = tate_resolvent(a, -3, 5).generators_by_hdeg()
    assert len(by[-1]) == 3 and len(by[-2]) > 0 and len(by[-3]) > 0


def test_right_partial_of_product():
    A = FreeDGAlgebra([Generator("x"), Generator("e", -1, 1), Generator("f", -1, 1)], {"e": "x", "f": "x"})
    ef = A.mul(A.gen("e"), A.gen("f"))
    # right derivative: e f = -(f e), so d/de from the right picks up a sign
    assert right_partial(A, ef, A.index["f"]) == A.gen("e")
    assert right_partial(A, ef, A.index["e"]) == A.scale(-1, A.gen("f"))


@pytest.mark.parametrize("label", ["dual", "xy", "cusp"])
def test_kaehler_differential_squares_to_zero(label):
    K = kaehler(tate_resolvent(corpus()[label], -4, 8))
    assert check_square_zero(K.algebra) is None


@pytest.mark.parametrize("order", [2, 3])
def test_hkr_matches_periodic_oracle(order):
    a = algebra([("x", 1)], [f"x^{order}"])
    t = hkr_table(tate_resolvent(a, -4, 8), None, 4, 4).table()
    for (n, w), d in t.items():
        assert d == truncated_polynomial_hh(order, n, w)


def test_hkr_matches_direct_on_non_complete_intersection():
    a = algebra([("x", 1), ("y", 1)], ["x^2", "x*y", "y^2"])
    direct = hochschild_direct_table(a, None, 2, 2)
    hkr = hkr_table(tate_resolvent(a, -3, 6), None, 2, 2).table()
    for key in set(direct) | set(hkr):
        assert direct.get(key, 0) == hkr.get(key, 0), key


def test_hkr_decomposition_entries_of_dual_numbers():
    t = hkr_table(tate_resolvent(corpus()["dual"], -4, 8), None, 3, 2)
    nonzero = {k: d for k, d in t.entries.items() if d}
    # (j, i, w): HH^2 at weight -2 sits in exterior degree 1, internal degree 1
    assert nonzero[(1, 1, -2)] == 1
    assert nonzero[(0, 0, 0)] == 1 and nonzero[(1, 0, 0)] == 1
    assert t.row(3) == {w: d for (n, w), d in t.table().items() if n == 3}


def test_hkr_bound_too_small():
    res = tate_resolvent(corpus()["dual"], -2, 8)
    with pytest.raises(BoundTooSmall):
        hkr_table(res, None, 4, 4)


def test_max_generators_exhaustion():
    a = algebra([("x", 1), ("y", 1)], ["x^2", "x*y", "y^2"])
    with pytest.raises(BoundTooSmall):
        tate_resolvent(a, -6, 8, max_generators=10)


def test_padding_does_not_change_hkr():
    res = tate_resolvent(corpus()["cusp"], -4, 8)
    padded = pad_resolvent(res)
    assert padded.algebra.ngens == res.algebra.ngens + 2
    assert hkr_table(res, None, 3, 6).table() == hkr_table(padded, None, 3, 6).table()


def test_resolvent_independence_two_relations():
    a = algebra([("x", 1), ("y", 1)], ["x^2", "y^2"])
    ok, problems = resolvent_independence(a, -4, 6, 3, 3)
    assert ok, problems


@pytest.mark.parametrize("names", [["x"], ["x", "y"]])
def test_normal_cone_on_polynomial_rings(names):
    rep = normal_cone_check(polynomial_ring(names), 4)
    assert rep.ok, rep.failures
    assert rep.slices_checked > 0


def test_normal_cone_on_dg_algebras():
    for diff in ("x^2", "x*y"):
        A = FreeDGAlgebra([Generator("x"), Generator("y"), Generator("e", -1, 2)], {"e": diff})
        rep = normal_cone_check(A, 4)
        assert rep.ok, rep.failures
    assert normal_cone_check(tate_resolvent(corpus()["dual"], -3, 4), 4).ok


def test_normal_cone_rejects_unmodified_differential():
    A = FreeDGAlgebra([Generator("x"), Generator("e", -1, 2)], {"e": "x^2"})
    rep = normal_cone_check(A, 4, use_full=True)
    assert not rep.ok and rep.failures
