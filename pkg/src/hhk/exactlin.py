"""Exact sparse linear algebra over the rationals.

Every dimension reported by the engine is computed here.  Matrices are stored
row-wise as ``{col: Fraction}`` dictionaries and are never mutated after
construction; elimination always works on copies.
"""
from __future__ import annotations

import heapq
from fractions import Fraction
from math import gcd
from typing import Dict, Iterable, List, Sequence, Tuple

__all__ = [
    "CompositeNotZero",
    "ExactMatrix",
    "rank",
    "kernel_basis",
    "cohomology_dim",
    "cohomology_representatives",
    "RowReducer",
]


class CompositeNotZero(ArithmeticError):
    """Raised when two maps that should compose to zero do not."""


def _frac(x):
    """Exact scalar; integral values are stored as ``int`` for speed."""
    if isinstance(x, int):
        return x
    x = x if isinstance(x, Fraction) else Fraction(x)
    return x.numerator if x.denominator == 1 else x


class ExactMatrix:
    """Immutable sparse matrix with Fraction entries."""

    __slots__ = ("nrows", "ncols", "_rows")

    def __init__(self, nrows: int, ncols: int, entries=None):
        if nrows < 0 or ncols < 0:
            raise ValueError("negative matrix shape")
        rows: List[Dict[int, Fraction]] = [dict() for _ in range(nrows)]
        if entries:
            items = entries.items() if isinstance(entries, dict) else entries
            for (r, c), v in items:
                if not (0 <= r < nrows and 0 <= c < ncols):
                    raise IndexError(f"entry ({r}, {c}) outside {nrows}x{ncols}")
                v = _frac(v)
                if v:
                    row = rows[r]
                    s = row.get(c, 0) + v
                    if s:
                        row[c] = s
                    else:
                        row.pop(c, None)
        self.nrows = nrows
        self.ncols = ncols
        self._rows = rows

    @classmethod
    def _from_rows(cls, nrows: int, ncols: int, rows: List[Dict[int, Fraction]]):
        m = cls.__new__(cls)
        m.nrows, m.ncols, m._rows = nrows, ncols, rows
        return m

    @classmethod
    def from_dense(cls, data: Sequence[Sequence], ncols: int | None = None):
        nrows = len(data)
        if ncols is None:
            ncols = len(data[0]) if nrows else 0
        rows = []
        for r in data:
            if len(r) != ncols:
                raise ValueError("ragged dense matrix")
            rows.append({c: _frac(v) for c, v in enumerate(r) if v})
        return cls._from_rows(nrows, ncols, rows)

    @classmethod
    def zero(cls, nrows: int, ncols: int):
        return cls(nrows, ncols)

    @classmethod
    def identity(cls, n: int):
        return cls._from_rows(n, n, [{i: Fraction(1)} for i in range(n)])

    @property
    def shape(self) -> Tuple[int, int]:
        return self.nrows, self.ncols

    def row(self, i: int) -> Dict[int, Fraction]:
        return dict(self._rows[i])

    def entries(self) -> Iterable[Tuple[Tuple[int, int], Fraction]]:
        for r, row in enumerate(self._rows):
            for c in sorted(row):
                yield (r, c), row[c]

    def __getitem__(self, rc):
        r, c = rc
        return self._rows[r].get(c, Fraction(0))

    def nnz(self) -> int:
        return sum(len(r) for r in self._rows)

    def is_zero(self) -> bool:
        return not any(self._rows)

    def to_dense(self) -> List[List[Fraction]]:
        out = [[Fraction(0)] * self.ncols for _ in range(self.nrows)]
        for r, row in enumerate(self._rows):
            for c, v in row.items():
                out[r][c] = v
        return out

    def transpose(self) -> "ExactMatrix":
        rows: List[Dict[int, Fraction]] = [dict() for _ in range(self.ncols)]
        for r, row in enumerate(self._rows):
            for c, v in row.items():
                rows[c][r] = v
        return ExactMatrix._from_rows(self.ncols, self.nrows, rows)

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        orows = other._rows
        out = []
        for row in self._rows:
            acc: Dict[int, Fraction] = {}
            for k, v in row.items():
                for c, w in orows[k].items():
                    s = acc.get(c, 0) + v * w
                    if s:
                        acc[c] = s
                    else:
                        del acc[c]
            out.append(acc)
        return ExactMatrix._from_rows(self.nrows, other.ncols, out)

    def apply(self, vec: Sequence) -> List[Fraction]:
        """Return ``self @ vec`` for a dense vector."""
        if len(vec) != self.ncols:
            raise ValueError("vector length mismatch")
        return [sum((v * vec[c] for c, v in row.items()), Fraction(0)) for row in self._rows]

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self):
        return hash((self.shape, tuple(tuple(sorted(r.items())) for r in self._rows)))

    def __repr__(self):
        return f"ExactMatrix({self.nrows}x{self.ncols}, nnz={self.nnz()})"


class RowReducer:
    """Incremental reduced row echelon form.

    Rows are reduced against the current pivots as they are added, so the
    span can be grown one vector at a time (used for quotient normal forms
    and for extracting homology representatives).  Pivot columns are chosen
    as the *largest* surviving column index of each row, which makes the
    surviving non-pivot columns the lexicographically smallest ones.
    """

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.pivots: Dict[int, Dict[int, Fraction]] = {}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, vec: Dict[int, Fraction]) -> Dict[int, Fraction]:
        v = {c: _frac(x) for c, x in vec.items() if x}
        piv = self.pivots
        # pivot rows are fully reduced, so subtracting one never refills another pivot column
        for c in [c for c in v if c in piv]:
            coef = v[c]
            for cc, w in piv[c].items():
                s = v.get(cc, 0) - coef * w
                if s:
                    v[cc] = s
                else:
                    v.pop(cc, None)
        return v

    def add(self, vec: Dict[int, Fraction]) -> bool:
        """Add a vector to the span; return True if it increased the rank."""
        v = self.reduce(vec)
        if not v:
            return False
        p = max(v)
        inv = Fraction(1) / v[p]
        v = {c: x * inv for c, x in v.items()}
        # keep the echelon form fully reduced
        for q, row in self.pivots.items():
            coef = row.get(p)
            if coef:
                for cc, w in v.items():
                    s = row.get(cc, 0) - coef * w
                    if s:
                        row[cc] = s
                    else:
                        row.pop(cc, None)
        self.pivots[p] = v
        return True

    def contains(self, vec: Dict[int, Fraction]) -> bool:
        return not self.reduce(vec)

    def free_columns(self) -> List[int]:
        return [c for c in range(self.ncols) if c not in self.pivots]


def _integral(row: Dict[int, Fraction]) -> Dict[int, int]:
    """Scale a row to coprime integers."""
    den = 1
    for v in row.values():
        d = v.denominator
        den = den * d // gcd(den, d)
    out = {c: int(v * den) for c, v in row.items()}
    g = 0
    for v in out.values():
        g = gcd(g, v)
    return {c: v // g for c, v in out.items()} if g > 1 else out


def _eliminate(rows: List[Dict[int, Fraction]]) -> List[Tuple[int, Dict[int, int]]]:
    """Fraction-free Gaussian elimination on a copy of ``rows``; returns (pivot, row) pairs.

    Rows are kept as primitive integer vectors.  Pivot selection favours
    short rows and sparse columns to limit fill-in.
    """
    work = [_integral(r) for r in rows if r]
    col_rows: Dict[int, set] = {}
    for i, r in enumerate(work):
        for c in r:
            col_rows.setdefault(c, set()).add(i)
    heap = [(len(r), i) for i, r in enumerate(work)]
    heapq.heapify(heap)
    done = set()
    out = []
    while heap:
        size, i = heapq.heappop(heap)
        if i in done:
            continue
        row = work[i]
        if size != len(row):
            heapq.heappush(heap, (len(row), i))
            continue
        done.add(i)
        if not row:
            continue
        p = min(row, key=lambda c: (len(col_rows.get(c, ())), c))
        pv = row[p]
        for c in row:
            col_rows[c].discard(i)
        for k in list(col_rows.get(p, ())):
            other = work[k]
            q = other[p]
            g = gcd(pv, q)
            fo, fr = pv // g, q // g
            new = {}
            for c, v in other.items():
                new[c] = v * fo
            for c, v in row.items():
                x = new.get(c, 0) - fr * v
                if x:
                    new[c] = x
                else:
                    new.pop(c, None)
            cont = 0
            for v in new.values():
                cont = gcd(cont, v)
                if cont == 1:
                    break
            if cont > 1:
                new = {c: v // cont for c, v in new.items()}
            for c in other:
                if c not in new:
                    col_rows[c].discard(k)
            for c in new:
                if c not in other:
                    col_rows.setdefault(c, set()).add(k)
            work[k] = new
            heapq.heappush(heap, (len(new), k))
        out.append((p, row))
    return out


def _blocks(rows: List[Dict[int, Fraction]]) -> List[List[Dict[int, Fraction]]]:
    """Split rows into groups sharing no columns (connected components)."""
    parent: Dict[int, int] = {}

    def find(c):
        root = c
        while parent.get(root, root) != root:
            root = parent[root]
        while parent.get(c, c) != root:
            parent[c], c = root, parent[c]
        return root

    for row in rows:
        cols = iter(row)
        first = find(next(cols))
        for c in cols:
            r = find(c)
            if r != first:
                parent[r] = first
    groups: Dict[int, List[Dict[int, Fraction]]] = {}
    for row in rows:
        groups.setdefault(find(next(iter(row))), []).append(row)
    return list(groups.values())


def rank(m: ExactMatrix) -> int:
    """Rank over Q; block-diagonal structure is detected and exploited."""
    if m.nrows == 0 or m.ncols == 0:
        return 0
    rows = m._rows if m.nrows <= m.ncols else m.transpose()._rows
    rows = [r for r in rows if r]
    if len(rows) < 64:
        return len(_eliminate(rows))
    return sum(len(_eliminate(b)) for b in _blocks(rows))


def kernel_basis(m: ExactMatrix) -> List[List[Fraction]]:
    """Basis of the right null space of ``m`` as dense vectors.

    The basis is the standard one read off the reduced echelon form, with
    one vector per free column in increasing column order.
    """
    red = RowReducer(m.ncols)
    for row in m._rows:
        if row:
            red.add(row)
    basis = []
    for f in red.free_columns():
        v = [Fraction(0)] * m.ncols
        v[f] = Fraction(1)
        for p, row in red.pivots.items():
            coef = row.get(f)
            if coef:
                v[p] = -coef
        basis.append(v)
    return basis


def _check_composite(d_in: ExactMatrix, d_out: ExactMatrix) -> None:
    if d_in.nrows != d_out.ncols:
        raise ValueError(f"incompatible maps {d_in.shape} then {d_out.shape}")
    if not (d_out @ d_in).is_zero():
        raise CompositeNotZero(f"d_out . d_in != 0 for shapes {d_in.shape}, {d_out.shape}")


def cohomology_dim(d_in: ExactMatrix, d_out: ExactMatrix, check: bool = True) -> int:
    """dim ker(d_out) - rank(d_in) for a pair ``V_in -> V -> V_out``."""
    if check:
        _check_composite(d_in, d_out)
    elif d_in.nrows != d_out.ncols:
        raise ValueError(f"incompatible maps {d_in.shape} then {d_out.shape}")
    return d_out.ncols - rank(d_out) - rank(d_in)


def cohomology_representatives(d_in: ExactMatrix, d_out: ExactMatrix) -> List[List[Fraction]]:
    """Cycles whose classes form a basis of ker(d_out) / im(d_in).

    The cycles are drawn from :func:`kernel_basis` in order, keeping each one
    that is independent of the image and of the cycles kept before it.
    """
    _check_composite(d_in, d_out)
    red = RowReducer(d_out.ncols)
    for col in d_in.transpose()._rows:
        if col:
            red.add(col)
    reps = []
    for v in kernel_basis(d_out):
        if red.add({i: x for i, x in enumerate(v) if x}):
            reps.append(v)
    return reps
