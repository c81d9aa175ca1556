"""Shared corpus, brute-force oracles and the acceptance report hook."""
from fractions import Fraction
from itertools import combinations, permutations, product
from math import comb
from pathlib import Path

import pytest

from hhk.koszul import Presentation, QuotientAlgebra

DATA = Path(__file__).parent / "data"

ACCEPTANCE = {}


def algebra(gens, relations=(), name="a"):
    return QuotientAlgebra(Presentation.parse(gens, relations, name))


def corpus():
    """The named test algebras used throughout the suite."""
    return {
        "Q[x]": algebra([("x", 1)]),
        "Q[x,y]": algebra([("x", 1), ("y", 1)]),
        "Q[x,y,z]": algebra([("x", 1), ("y", 1), ("z", 1)]),
        "dual": algebra([("x", 1)], ["x^2"]),
        "x2+y2": algebra([("x", 1), ("y", 1)], ["x^2 + y^2"]),
        "xy": algebra([("x", 1), ("y", 1)], ["x*y"]),
        "cusp": algebra([("x", 3), ("y", 2)], ["x^2 - y^3"]),
    }


# -- oracles -------------------------------------------------------------------

def det(m):
    """Leibniz-formula determinant; only for tiny matrices."""
    n = len(m)
    total = Fraction(0)
    for perm in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = Fraction(-1 if inv % 2 else 1)
        for i in range(n):
            term *= m[i][perm[i]]
            if not term:
                break
        total += term
    return total


def rank_by_minors(m):
    """Largest k with a nonzero k x k minor."""
    rows = len(m)
    cols = len(m[0]) if rows else 0
    for k in range(min(rows, cols), 0, -1):
        for rs in combinations(range(rows), k):
            for cs in combinations(range(cols), k):
                if det([[m[r][c] for c in cs] for r in rs]):
                    return k
    return 0


def monomial_count(weights, w):
    """Number of monomials of weight w in variables of the given positive weights."""
    if w < 0:
        return 0
    return sum(1 for e in product(*(range(w // x + 1) for x in weights))
               if sum(a * x for a, x in zip(e, weights)) == w)


def polyvector_dims(weights, n, w):
    """dim of n-vector fields of weight w on affine space: sum over n-subsets of d/dx's."""
    return sum(monomial_count(weights, w + sum(weights[i] for i in s))
               for s in combinations(range(len(weights)), n))


def truncated_polynomial_hh(order, n, w):
    """HH^n(Q[x]/(x^order)) at weight w from the 2-periodic resolution, x of weight 1."""
    if n == 0:
        return int(0 <= w < order)
    k, odd = divmod(n, 2)
    if odd:
        # ker(order * x^(order-1)) = (x), generator weight -(k*order + 1)
        shift = k * order + 1
        return int(1 <= w + shift < order)
    # A / (x^(order-1)), generator weight -k*order
    shift = k * order
    return int(0 <= w + shift < order - 1)


def binomial(n, k):
    return comb(n, k)


# -- acceptance report -----------------------------------------------------------

@pytest.fixture
def record():
    def _record(label, ok, detail=""):
        ACCEPTANCE[label] = (ok, detail)
    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(ACCEPTANCE, key=lambda s: int(s[2:])):
        ok, detail = ACCEPTANCE[label]
        terminalreporter.write_line(f"{label}: {'PASS' if ok else 'FAIL'}  {detail}")
