from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import rank_by_minors
from hhk.exactlin import (
    CompositeNotZero,
    ExactMatrix,
    RowReducer,
    cohomology_dim,
    cohomology_representatives,
    kernel_basis,
    rank,
)

entries = st.fractions(min_value=-3, max_value=3, max_denominator=3) | st.just(Fraction(0))


@st.composite
def matrices(draw, max_rows=5, max_cols=5):
    r = draw(st.integers(0, max_rows))
    c = draw(st.integers(0, max_cols))
    return [[draw(entries) for _ in range(c)] for _ in range(r)]


@given(matrices())
@settings(max_examples=150, deadline=None)
def test_rank_matches_minor_oracle(dense):
    m = ExactMatrix.from_dense(dense, ncols=len(dense[0]) if dense else 0)
    assert rank(m) == rank_by_minors(dense)


@given(matrices())
@settings(max_examples=100, deadline=None)
def test_rank_of_transpose(dense):
    m = ExactMatrix.from_dense(dense, ncols=len(dense[0]) if dense else 0)
    assert rank(m) == rank(m.transpose())


@given(matrices())
@settings(max_examples=100, deadline=None)
def test_kernel_basis_is_kernel_and_rank_nullity(dense):
    m = ExactMatrix.from_dense(dense, ncols=len(dense[0]) if dense else 0)
    ker = kernel_basis(m)
    for v in ker:
        assert all(x == 0 for x in m.apply(v))
    assert len(ker) + rank(m) == m.ncols
    assert rank(ExactMatrix.from_dense(ker, ncols=m.ncols)) == len(ker)


@given(st.lists(st.lists(entries, min_size=4, max_size=4), max_size=6))
@settings(max_examples=100, deadline=None)
def test_row_reducer_tracks_rank(rows):
    red = RowReducer(4)
    grew = [red.add({i: x for i, x in enumerate(r) if x}) for r in rows]
    assert red.rank == sum(grew) == (rank_by_minors(rows) if rows else 0)
    for r in rows:
        assert red.contains({i: x for i, x in enumerate(r) if x})


def test_row_reducer_pivots_are_largest_columns():
    red = RowReducer(3)
    red.add({0: 1, 2: 1})
    assert red.free_columns() == [0, 1]
    red.add({0: 1, 1: 1})
    assert red.free_columns() == [0]


def test_block_diagonal_rank_sums_blocks():
    # 80 rows trigger the block decomposition path
    blocks = []
    for k in range(20):
        blocks.append(([[1, k], [2, 2 * k]], 1))
        blocks.append(([[1, 0], [0, k + 1]], 2))
    entries_, r0, c0, expected = {}, 0, 0, 0
    for dense, rk in blocks:
        for i, row in enumerate(dense):
            for j, v in enumerate(row):
                if v:
                    entries_[(r0 + i, c0 + j)] = v
        r0, c0, expected = r0 + 2, c0 + 2, expected + rk
    m = ExactMatrix(r0, c0, entries_)
    assert rank(m) == expected == 60


def test_large_sparse_rank_nullity():
    import random

    rng = random.Random(7)
    dense = [[Fraction(rng.choice([0, 0, 0, 1, -1, 2]), rng.choice([1, 2])) for _ in range(40)] for _ in range(70)]
    # duplicate rows and combinations cannot raise the rank
    dense += [[a + b for a, b in zip(dense[0], dense[1])], dense[5]]
    m = ExactMatrix.from_dense(dense)
    ker = kernel_basis(m)
    assert rank(m) + len(ker) == 40
    for v in ker:
        assert all(x == 0 for x in m.apply(v))


def test_cohomology_of_koszul_pair():
    # Q --(1,1)--> Q^2 --(1,-1)--> Q is exact
    d_in = ExactMatrix.from_dense([[1], [1]])
    d_out = ExactMatrix.from_dense([[1, -1]])
    assert cohomology_dim(d_in, d_out) == 0
    assert cohomology_dim(ExactMatrix.zero(2, 0), d_out) == 1
    reps = cohomology_representatives(ExactMatrix.zero(2, 0), d_out)
    assert len(reps) == 1 and d_out.apply(reps[0]) == [0]


def test_composite_not_zero_is_reported():
    with pytest.raises(CompositeNotZero):
        cohomology_dim(ExactMatrix.identity(2), ExactMatrix.identity(2))
    with pytest.raises(ValueError):
        cohomology_dim(ExactMatrix.identity(2), ExactMatrix.identity(3))


def test_exact_entries_stay_rational():
    m = ExactMatrix.from_dense([[Fraction(1, 3), 1], [1, 3]])
    assert rank(m) == 1
    assert kernel_basis(m) == [[Fraction(1), Fraction(-1, 3)]]
    assert all(isinstance(x, (int, Fraction)) for row in m.to_dense() for x in row)
