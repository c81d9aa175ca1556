"""Covers by Laurent charts, their nerves and Cech cohomology of polyvector fields.

A chart is a polynomial ring over Q whose generators carry nonzero integer
weights, some of them possibly inverted.  The ring attached to a simplex
``alpha`` of the nerve is the chart of its smallest index, localized at every
generator that an overlap substitution inverts.  Only rings with
finite-dimensional weight pieces are accepted: either no inverted generator
and all weights of one sign, or a single generator which is inverted.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Dict, FrozenSet, List, Optional, Sequence, Tuple

from .dgalg import ComplexSlice
from .exactlin import ExactMatrix, cohomology_dim
from .poly import Poly, poly_add, poly_mul, poly_pow, poly_scale

__all__ = [
    "InconsistentTable",
    "MissingTransition",
    "InfiniteSlice",
    "Chart",
    "Overlap",
    "Space",
    "Nerve",
    "SimplicialAlgebra",
    "SimplicialModule",
    "nerve",
    "polyvector_module",
    "cech_complex",
    "cech_cohomology",
    "global_hh_smooth",
    "simplicial_hochschild",
    "derived_frames",
]


class InconsistentTable(ValueError):
    """Intersection data or transition maps contradict each other."""


class MissingTransition(ValueError):
    """An overlap lacks the substitution or tangent-frame data a computation needs."""


class InfiniteSlice(ValueError):
    """A chart ring would have infinite-dimensional weight pieces."""


Simplex = Tuple[int, ...]


# -- nerves -----------------------------------------------------------------

@dataclass
class Nerve:
    size: int
    simplices: List[Simplex]

    def of_dim(self, p: int) -> List[Simplex]:
        return [s for s in self.simplices if len(s) == p + 1]

    @property
    def dim(self) -> int:
        return max(len(s) for s in self.simplices) - 1

    def faces(self, s: Simplex) -> List[Tuple[int, Simplex]]:
        """``(k, face)`` with the ``k``-th vertex removed."""
        return [(k, s[:k] + s[k + 1:]) for k in range(len(s))] if len(s) > 1 else []


def nerve(cover_size: int, intersection_table) -> Nerve:
    """Nerve of a cover from a symmetric boolean matrix or from a list of intersecting index sets.

    A matrix only describes pairs.  Higher simplices must be listed
    explicitly; every nonempty subset of a listed set must intersect too.
    """
    declared = set()
    if isinstance(intersection_table, (list, tuple)) and intersection_table and isinstance(
            intersection_table[0], (list, tuple)) and len(intersection_table) == cover_size and all(
            isinstance(x, bool) for row in intersection_table for x in row):
        table = intersection_table
        for i in range(cover_size):
            if len(table[i]) != cover_size:
                raise InconsistentTable("intersection matrix is not square")
            if not table[i][i]:
                raise InconsistentTable(f"chart {i} does not meet itself")
            for j in range(cover_size):
                if table[i][j] != table[j][i]:
                    raise InconsistentTable(f"intersection matrix not symmetric at ({i}, {j})")
                if i < j and table[i][j]:
                    declared.add((i, j))
    else:
        for s in intersection_table:
            s = tuple(sorted(set(s)))
            if any(not 0 <= i < cover_size for i in s):
                raise InconsistentTable(f"simplex {s} mentions a chart outside 0..{cover_size - 1}")
            if len(s) > 1:
                declared.add(s)
    for s in declared:
        for r in range(2, len(s)):
            for sub in combinations(s, r):
                if sub not in declared:
                    raise InconsistentTable(f"{s} intersects but its subset {sub} does not")
    simplices = [(i,) for i in range(cover_size)] + sorted(declared, key=lambda s: (len(s), s))
    return Nerve(cover_size, simplices)


# -- charts and spaces -------------------------------------------------------

@dataclass(frozen=True)
class Chart:
    name: str
    names: Tuple[str, ...]
    weights: Tuple[int, ...]
    inverted: FrozenSet[str] = frozenset()

    def __post_init__(self):
        if any(w == 0 for w in self.weights):
            raise InfiniteSlice(f"chart {self.name}: generator weights must be nonzero")


@dataclass
class Overlap:
    """Chart ``j`` generators written in chart ``i`` coordinates (``i < j``).

    ``frames`` optionally expresses each coordinate field of chart ``j`` in
    the coordinate fields of chart ``i``: ``frames[s] = {t: coefficient}``.
    """

    i: int
    j: int
    subs: Dict[str, Poly]
    frames: Optional[Dict[str, Dict[str, Poly]]] = None


@dataclass
class Space:
    name: str
    charts: List[Chart]
    overlaps: Dict[Tuple[int, int], Overlap] = field(default_factory=dict)
    triples: List[Simplex] = field(default_factory=list)

    def nerve(self) -> Nerve:
        return nerve(len(self.charts), list(self.overlaps) + list(self.triples))


def _ring_weight(m, weights) -> int:
    return sum(e * w for e, w in zip(m, weights))


@dataclass
class _Ring:
    """Chart ring localized at ``inverted`` generators."""

    names: Tuple[str, ...]
    weights: Tuple[int, ...]
    inverted: FrozenSet[int]

    def __post_init__(self):
        n = len(self.names)
        if self.inverted:
            if n != 1:
                raise InfiniteSlice(
                    f"ring Q[{', '.join(self.names)}] with inverted generators has infinite weight pieces")
        elif n and len({w > 0 for w in self.weights}) > 1:
            raise InfiniteSlice(f"ring Q[{', '.join(self.names)}] mixes weight signs")
        self._cache: Dict[int, List[Tuple[int, ...]]] = {}

    def monomials(self, w: int) -> List[Tuple[int, ...]]:
        hit = self._cache.get(w)
        if hit is not None:
            return hit
        n = len(self.names)
        out: List[Tuple[int, ...]] = []
        if n == 0:
            out = [()] if w == 0 else []
        elif self.inverted:
            wt = self.weights[0]
            if w % wt == 0:
                out = [(w // wt,)]
        else:
            sgn = 1 if self.weights[0] > 0 else -1
            target = sgn * w
            ws = [sgn * x for x in self.weights]
            if target >= 0:
                cur = [0] * n

                def rec(k, rem):
                    if k == n:
                        if rem == 0:
                            out.append(tuple(cur))
                        return
                    for e in range(rem // ws[k], -1, -1):
                        cur[k] = e
                        rec(k + 1, rem - e * ws[k])
                    cur[k] = 0

                rec(0, target)
        self._cache[w] = out
        return out

    def check(self, p: Poly, what: str) -> None:
        for m in p:
            for k, e in enumerate(m):
                if e < 0 and k not in self.inverted:
                    raise InconsistentTable(f"{what}: {self.names[k]} appears with a negative power")


def _substitute(p: Poly, images: Sequence[Poly], n: int) -> Poly:
    out: Poly = {}
    for m, c in p.items():
        term = {(0,) * n: Fraction(c)}
        for k, e in enumerate(m):
            if e:
                if e < 0 and len(images[k]) != 1:
                    raise InconsistentTable("a negative power of a non-monomial cannot be substituted")
                term = poly_mul(term, poly_pow(images[k], e, n))
        out = poly_add(out, term)
    return out


def _partial(p: Poly, k: int) -> Poly:
    out: Poly = {}
    for m, c in p.items():
        if m[k]:
            mm = list(m)
            mm[k] -= 1
            out = poly_add(out, {tuple(mm): c * m[k]})
    return out


def _det(mat: List[List[Poly]], n: int) -> Poly:
    size = len(mat)
    if size == 0:
        return {(0,) * n: Fraction(1)}
    out: Poly = {}
    for c in range(size):
        if not mat[0][c]:
            continue
        minor = [row[:c] + row[c + 1:] for row in mat[1:]]
        term = poly_mul(mat[0][c], _det(minor, n))
        out = poly_add(out, term if c % 2 == 0 else poly_scale(-1, term))
    return out


class SimplicialAlgebra:
    """Rings of the nerve's simplices with restriction maps, built from a :class:`Space`."""

    def __init__(self, space: Space):
        self.space = space
        self.nerve = space.nerve()
        for (i, j), ov in space.overlaps.items():
            if not i < j:
                raise InconsistentTable(f"overlap {i} {j}: list the lower chart first")
            missing = set(space.charts[j].names) - set(ov.subs)
            if missing:
                raise MissingTransition(f"overlap {i} {j}: no substitution for {sorted(missing)}")
        self.rings: Dict[Simplex, _Ring] = {}
        for s in self.nerve.simplices:
            self.rings[s] = self._ring(s)
        for (i, j), ov in space.overlaps.items():
            ring = self.rings[(i, j)]
            ci, cj = space.charts[i], space.charts[j]
            for k, nm in enumerate(cj.names):
                img = ov.subs[nm]
                ring.check(img, f"overlap {i} {j}, image of {nm}")
                ws = {_ring_weight(m, ci.weights) for m in img}
                if ws != {cj.weights[k]}:
                    raise InconsistentTable(
                        f"overlap {i} {j}: image of {nm} has weights {sorted(ws)}, expected {cj.weights[k]}")
            self._check_invertible(i, j)
        self._check_cocycle()

    def _ring(self, s: Simplex) -> _Ring:
        anchor = self.space.charts[s[0]]
        inv = {anchor.names.index(nm) for nm in anchor.inverted}
        for j in s[1:]:
            ov = self.space.overlaps.get((s[0], j))
            if ov is None:
                raise InconsistentTable(f"simplex {s} needs overlap data for charts {s[0]} {j}")
            for p in ov.subs.values():
                for m in p:
                    inv.update(k for k, e in enumerate(m) if e < 0)
            # units of chart j stay units on the overlap
            for nm in self.space.charts[j].inverted:
                img = ov.subs.get(nm, {})
                if len(img) != 1:
                    raise InconsistentTable(f"overlap {s[0]} {j}: inverted generator {nm} must map to a monomial")
                inv.update(k for k, e in enumerate(next(iter(img))) if e)
        return _Ring(anchor.names, anchor.weights, frozenset(inv))

    def jacobian(self, i: int, j: int) -> List[List[Poly]]:
        """``J[k][l] = d s_k / d t_l`` for chart ``j`` coordinates ``s`` in chart ``i`` coordinates ``t``."""
        ov = self.space.overlaps[(i, j)]
        ci, cj = self.space.charts[i], self.space.charts[j]
        return [[_partial(ov.subs[s], l) for l in range(len(ci.names))] for s in cj.names]

    def _check_invertible(self, i: int, j: int) -> None:
        ci, cj = self.space.charts[i], self.space.charts[j]
        if len(ci.names) != len(cj.names):
            raise InconsistentTable(f"charts {i} and {j} have different dimensions")
        det = _det(self.jacobian(i, j), len(ci.names))
        ring = self.rings[(i, j)]
        if len(det) != 1 or any(e and k not in ring.inverted for k, e in enumerate(next(iter(det)))):
            raise InconsistentTable(f"overlap {i} {j}: the substitution is not invertible on the overlap")

    def restrict(self, face: Simplex, s: Simplex) -> Callable[[Poly], Poly]:
        """Ring map from the ring of ``face`` to the ring of ``s``."""
        a, b = face[0], s[0]
        n = len(self.space.charts[b].names)
        if a == b:
            return lambda p: dict(p)
        ov = self.space.overlaps[(b, a)]
        images = [ov.subs[nm] for nm in self.space.charts[a].names]
        return lambda p: _substitute(p, images, n)

    def _check_cocycle(self) -> None:
        for s in self.nerve.simplices:
            if len(s) < 3:
                continue
            for j, k in combinations(s[1:], 2):
                i = s[0]
                direct = self.space.overlaps[(i, k)].subs
                via = self.space.overlaps[(j, k)].subs
                images = [self.space.overlaps[(i, j)].subs[nm] for nm in self.space.charts[j].names]
                n = len(self.space.charts[i].names)
                for nm in self.space.charts[k].names:
                    if _substitute(via[nm], images, n) != direct[nm]:
                        raise InconsistentTable(f"transitions {i}->{j}->{k} and {i}->{k} disagree on {nm}")


# -- polyvector modules ------------------------------------------------------

def derived_frames(X: SimplicialAlgebra, i: int, j: int) -> Dict[str, Dict[str, Poly]]:
    """Coordinate fields of chart ``j`` in those of chart ``i``, from the inverse Jacobian."""
    ci, cj = X.space.charts[i], X.space.charts[j]
    n = len(ci.names)
    J = X.jacobian(i, j)
    det = _det(J, n)
    (dm, dc), = det.items()
    inv_det = {tuple(-e for e in dm): 1 / Fraction(dc)}
    frames = {}
    for k, s in enumerate(cj.names):
        # column k of J^{-1} = adj(J)[:, k] / det
        col = {}
        for l, t in enumerate(ci.names):
            minor = [row[:l] + row[l + 1:] for r, row in enumerate(J) if r != k]
            cof = _det(minor, n)
            if (k + l) % 2:
                cof = poly_scale(-1, cof)
            val = poly_mul(cof, inv_det)
            if val:
                col[t] = val
        frames[s] = col
    return frames


class SimplicialModule:
    """Free modules over the simplex rings with basis labels, weights and restriction maps.

    ``basis[s]`` lists ``(label, weight)``; ``restrict_basis(face, s, label)``
    returns ``{label': coefficient in ring of s}``.
    """

    def __init__(self, X: SimplicialAlgebra, basis: Dict[Simplex, List[Tuple[tuple, int]]],
                 restrict_basis: Callable[[Simplex, Simplex, tuple], Dict[tuple, Poly]], name: str = "F"):
        self.X = X
        self.basis = basis
        self._restrict_basis = restrict_basis
        self.name = name
        self._slices: Dict[Tuple[Simplex, int], List[Tuple[tuple, Tuple[int, ...]]]] = {}

    def slice_basis(self, s: Simplex, w: int) -> List[Tuple[tuple, Tuple[int, ...]]]:
        key = (s, w)
        hit = self._slices.get(key)
        if hit is None:
            ring = self.X.rings[s]
            hit = [(lab, m) for lab, lw in self.basis[s] for m in ring.monomials(w - lw)]
            self._slices[key] = hit
        return hit

    def restrict(self, face: Simplex, s: Simplex, lab: tuple, m: Tuple[int, ...]) -> Dict[tuple, Fraction]:
        """Image of ``m * lab`` from ``face`` in the module of ``s``, as ``{(label, monomial): coeff}``."""
        ring_map = self.X.restrict(face, s)
        coef = ring_map({m: Fraction(1)})
        out: Dict[tuple, Fraction] = {}
        for lab2, c2 in self._restrict_basis(face, s, lab).items():
            prod = poly_mul(coef, c2)
            self.X.rings[s].check(prod, f"restriction {face} -> {s}")
            for mm, cc in prod.items():
                key = (lab2, mm)
                v = out.get(key, 0) + cc
                if v:
                    out[key] = v
                else:
                    out.pop(key, None)
        return out

    def check_functorial(self, w: int) -> None:
        """Restricting in two steps equals restricting at once, on every slice basis element."""
        N = self.X.nerve
        present = set(N.simplices)
        for s in N.simplices:
            for r in range(1, len(s) - 1):
                for face in combinations(s, r):
                    for mid in (t for t in present if len(t) > r and set(face) < set(t) < set(s)):
                        for lab, m in self.slice_basis(face, w):
                            once = self.restrict(face, s, lab, m)
                            twice: Dict[tuple, Fraction] = {}
                            for (lab2, m2), c in self.restrict(face, mid, lab, m).items():
                                for key, cc in self.restrict(mid, s, lab2, m2).items():
                                    twice[key] = twice.get(key, 0) + c * cc
                            twice = {k: v for k, v in twice.items() if v}
                            if once != twice:
                                raise InconsistentTable(f"restrictions {face} -> {mid} -> {s} do not compose")


def polyvector_module(X: SimplicialAlgebra, j: int, frames: str = "supplied") -> SimplicialModule:
    """``wedge^j T`` with coordinate-field bases; ``frames`` is ``'supplied'`` or ``'derived'``."""
    space = X.space
    basis = {}
    for s in X.nerve.simplices:
        c = space.charts[s[0]]
        basis[s] = [(K, -sum(c.weights[k] for k in K)) for K in combinations(range(len(c.names)), j)]
    frame_cache: Dict[Tuple[int, int], List[List[Poly]]] = {}

    def frame_matrix(i: int, jj: int) -> List[List[Poly]]:
        """``F[l][k]``: coefficient of the ``l``-th field of chart ``i`` in the ``k``-th field of chart ``jj``."""
        key = (i, jj)
        if key not in frame_cache:
            ov = space.overlaps[key]
            if frames == "derived":
                fr = derived_frames(X, i, jj)
            else:
                if ov.frames is None:
                    raise MissingTransition(f"overlap {i} {jj}: no tangent-frame transition supplied")
                fr = ov.frames
            ci, cj = space.charts[i], space.charts[jj]
            missing = [s for s in cj.names if s not in fr]
            if missing:
                raise MissingTransition(f"overlap {i} {jj}: no tangent-frame transition for {missing}")
            ring = X.rings[(i, jj)]
            for k, snm in enumerate(cj.names):
                for tnm, coef in fr[snm].items():
                    ring.check(coef, f"frame of d/d{snm}")
                    l = ci.names.index(tnm)
                    ws = {_ring_weight(m, ci.weights) - ci.weights[l] for m in coef}
                    if ws != {-cj.weights[k]}:
                        raise InconsistentTable(f"overlap {i} {jj}: frame of d/d{snm} is not weight-homogeneous "
                                                f"of weight {-cj.weights[k]}")
            frame_cache[key] = [[fr[snm].get(tnm, {}) for snm in cj.names] for tnm in ci.names]
        return frame_cache[key]

    def restrict_basis(face: Simplex, s: Simplex, K: tuple) -> Dict[tuple, Poly]:
        a, b = face[0], s[0]
        n = len(space.charts[b].names)
        if a == b:
            return {K: {(0,) * n: Fraction(1)}}
        F = frame_matrix(b, a)
        out = {}
        for L in combinations(range(n), len(K)):
            d = _det([[F[l][k] for k in K] for l in L], n)
            if d:
                out[L] = d
        return out

    return SimplicialModule(X, basis, restrict_basis, name=f"wedge^{j} T")


# -- Cech complexes ----------------------------------------------------------

def cech_complex(F: SimplicialModule, weight: int) -> ComplexSlice:
    """Alternating-sum Cech complex of ``F`` in one weight; ``p`` runs over nerve dimensions."""
    N = F.X.nerve
    top = N.dim
    sl = ComplexSlice(weight=weight, lo=0, hi=top)
    index = {}
    for p in range(top + 1):
        basis = [(s,) + b for s in N.of_dim(p) for b in F.slice_basis(s, weight)]
        sl.bases[p] = basis
        index[p] = {b: k for k, b in enumerate(basis)}
    for p in range(top):
        entries: Dict[Tuple[int, int], Fraction] = {}
        for s in N.of_dim(p + 1):
            for k, face in N.faces(s):
                sign = -1 if k % 2 else 1
                for lab, m in F.slice_basis(face, weight):
                    col = index[p][(face, lab, m)]
                    for (lab2, m2), c in F.restrict(face, s, lab, m).items():
                        row = index[p + 1].get((s, lab2, m2))
                        if row is None:
                            raise InconsistentTable(f"restriction {face} -> {s} leaves weight {weight}")
                        entries[(row, col)] = entries.get((row, col), 0) + sign * c
        sl.matrices[p] = ExactMatrix(len(sl.bases[p + 1]), len(sl.bases[p]), entries)
    sl.check_square_zero()
    return sl


def cech_cohomology(F: SimplicialModule, weight: int) -> Dict[int, int]:
    sl = cech_complex(F, weight)
    return {p: sl.cohomology(p) for p in range(sl.lo, sl.hi + 1)}


def _window(weight_min: Optional[int], weight_max: int) -> range:
    lo = -weight_max if weight_min is None else weight_min
    return range(lo, weight_max + 1)


def global_hh_smooth(X, j_max: Optional[int] = None, weight_max: int = 6,
                     weight_min: Optional[int] = None) -> Dict[Tuple[int, int, int], int]:
    """``dim H^i(X, wedge^j T)`` per weight from the supplied tangent-frame transitions.

    Returns ``{(i, j, w): dim}``; the class contributes to ``HH^{i+j}``.
    """
    X = X if isinstance(X, SimplicialAlgebra) else SimplicialAlgebra(X)
    dim = len(X.space.charts[0].names)
    j_max = dim if j_max is None else min(j_max, dim)
    out = {}
    for j in range(j_max + 1):
        F = polyvector_module(X, j, "supplied")
        for w in _window(weight_min, weight_max):
            for i, d in cech_cohomology(F, w).items():
                out[(i, j, w)] = d
    return out


def simplicial_hochschild(X, n_max: int = 4, weight_max: int = 6,
                          weight_min: Optional[int] = None) -> Dict[Tuple[int, int], int]:
    """``dim HH^n`` per weight from the total Hom-Cech complex of the chart-wise HKR complexes.

    Charts are smooth, so each chart complex ``Hom(wedge^j Omega, O)`` is
    ``wedge^j T`` with zero differential; the tangent transitions are derived
    from the Jacobians of the chart substitutions.  The total complex in
    degree ``n`` is the sum of the Cech degree ``p`` pieces of ``wedge^j T``
    over ``p + j = n``.
    """
    X = X if isinstance(X, SimplicialAlgebra) else SimplicialAlgebra(X)
    dim = len(X.space.charts[0].names)
    mods = {j: polyvector_module(X, j, "derived") for j in range(dim + 1)}
    out = {}
    for w in _window(weight_min, weight_max):
        slices = {j: cech_complex(F, w) for j, F in mods.items()}
        bases: Dict[int, List[Tuple[int, int, int]]] = {}
        for j, sl in slices.items():
            for p in range(sl.lo, sl.hi + 1):
                bases.setdefault(p + j, []).extend((j, p, k) for k in range(sl.dim(p)))
        top = max(bases) if bases else 0

        def total(nn: int) -> ExactMatrix:
            src, tgt = bases.get(nn, []), bases.get(nn + 1, [])
            tidx = {b: k for k, b in enumerate(tgt)}
            entries = {}
            for col, (j, p, k) in enumerate(src):
                sl = slices[j]
                if p >= sl.hi:
                    continue
                mat = sl.matrix(p)
                for r in range(mat.nrows):
                    v = mat[r, k]
                    if v:
                        entries[(tidx[(j, p + 1, r)], col)] = v
            return ExactMatrix(len(tgt), len(src), entries)

        for nn in range(0, n_max + 1):
            if nn > top:
                out[(nn, w)] = 0
                continue
            d_out = total(nn)
            d_in = total(nn - 1) if nn >= 1 else ExactMatrix.zero(d_out.ncols, 0)
            out[(nn, w)] = cohomology_dim(d_in, d_out)
    return out
