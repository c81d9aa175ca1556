"""Quotient presentations, graded modules, Koszul complexes and regularity tests."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .dgalg import Element, FreeDGAlgebra, Generator, slice_complex, weight_basis
from .exactlin import ExactMatrix, RowReducer
from .poly import Poly, format_poly, monomial_weight, parse_polynomial

__all__ = [
    "InhomogeneousElement",
    "Presentation",
    "GradedModule",
    "QuotientAlgebra",
    "HandySequence",
    "KoszulComplex",
    "Verdict",
    "polynomial_ring",
    "koszul_complex",
    "is_regular_up_to",
    "zero_divisor_check",
    "quotient_slice",
]


class InhomogeneousElement(ValueError):
    """An element that should be weight-homogeneous is not."""


def _monomials_of_weight(weights: Sequence[int], w: int) -> List[Tuple[int, ...]]:
    n = len(weights)
    out: List[Tuple[int, ...]] = []
    cur = [0] * n

    def rec(i, rem):
        if i == n:
            if rem == 0:
                out.append(tuple(cur))
            return
        for e in range(rem // weights[i], -1, -1):
            cur[i] = e
            rec(i + 1, rem - e * weights[i])
        cur[i] = 0

    if w >= 0:
        rec(0, w)
    return out


@dataclass(frozen=True)
class Presentation:
    """``Q[names] / (relations)`` with positive generator weights."""

    names: Tuple[str, ...]
    weights: Tuple[int, ...]
    relations: Tuple[Poly, ...] = ()
    name: str = "a"

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        object.__setattr__(self, "relations", tuple(dict(r) for r in self.relations))
        if len(self.names) != len(self.weights):
            raise ValueError("one weight per generator")
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate generator names {self.names}")
        if any(w < 1 for w in self.weights):
            raise ValueError("generator weights must be positive")
        for k, r in enumerate(self.relations):
            if not r:
                raise InhomogeneousElement(f"relation {k + 1} is zero")
            ws = sorted({monomial_weight(m, self.weights) for m in r})
            if len(ws) != 1:
                raise InhomogeneousElement(
                    f"relation {k + 1} ({format_poly(r, self.names)}) is not weight-homogeneous: term weights {ws}")

    @classmethod
    def parse(cls, gens: Sequence[Tuple[str, int]], relations: Sequence[str] = (), name: str = "a"):
        names = tuple(g for g, _ in gens)
        return cls(names, tuple(w for _, w in gens), tuple(parse_polynomial(r, names) for r in relations), name)

    @property
    def nvars(self) -> int:
        return len(self.names)

    def relation_weight(self, k: int) -> int:
        return monomial_weight(next(iter(self.relations[k])), self.weights)

    def permuted(self, order: Sequence[int]) -> "Presentation":
        """Same algebra with the relations listed in another order."""
        return Presentation(self.names, self.weights, tuple(self.relations[i] for i in order), self.name)

    def polynomial_algebra(self) -> FreeDGAlgebra:
        return FreeDGAlgebra([Generator(n, 0, w) for n, w in zip(self.names, self.weights)])

    def to_element(self, alg: FreeDGAlgebra, p: Poly) -> Element:
        """Embed a polynomial in the first ``nvars`` generators of ``alg``."""
        pad = (0,) * (alg.ngens - self.nvars)
        return {tuple(m) + pad: c for m, c in p.items()}

    def format(self, p: Poly) -> str:
        return format_poly(p, self.names)


ModVec = Dict[Tuple[int, Tuple[int, ...]], Fraction]


class GradedModule:
    """Finitely presented weight-graded module over ``a = Q[x]/I``.

    The module is a quotient of the free module on generators of the given
    weights by the given relations and by ``I`` times every generator.
    Elements of the free module are dictionaries ``{(gen, exps): coeff}``.
    Each weight piece gets a monomial basis (the non-pivot columns of an
    echelon form of the relation span) and a normal-form map onto it.
    """

    def __init__(self, pres: Presentation, gen_weights: Sequence[int] = (0,),
                 relations: Sequence[ModVec] = (), name: str = "M"):
        self.pres = pres
        self.gen_weights = tuple(int(w) for w in gen_weights)
        self.relations: List[Tuple[ModVec, int]] = []
        self.name = name
        for r in relations:
            ws = {monomial_weight(m, pres.weights) + self.gen_weights[k] for (k, m) in r}
            if len(ws) != 1:
                raise InhomogeneousElement(f"module relation {r} is not weight-homogeneous")
            self.relations.append((dict(r), ws.pop()))
        for f, rel in enumerate(pres.relations):
            for k, gw in enumerate(self.gen_weights):
                self.relations.append(({(k, m): c for m, c in rel.items()}, pres.relation_weight(f) + gw))
        self._slices: Dict[int, tuple] = {}
        self._mul_cache: Dict[Tuple[Tuple[int, ...], int], ExactMatrix] = {}
        self._monos: Dict[int, List[Tuple[int, ...]]] = {}

    @property
    def min_weight(self) -> int:
        return min(self.gen_weights) if self.gen_weights else 0

    def ring_monomials(self, w: int) -> List[Tuple[int, ...]]:
        hit = self._monos.get(w)
        if hit is None:
            hit = sorted(_monomials_of_weight(self.pres.weights, w))
            self._monos[w] = hit
        return hit

    def _slice(self, w: int):
        hit = self._slices.get(w)
        if hit is not None:
            return hit
        cols = []
        for k, gw in enumerate(self.gen_weights):
            cols.extend((k, m) for m in self.ring_monomials(w - gw))
        cols.sort()
        index = {c: i for i, c in enumerate(cols)}
        red = RowReducer(len(cols))
        for rel, rw in self.relations:
            for mono in self.ring_monomials(w - rw):
                vec = {}
                for (k, m), c in rel.items():
                    key = (k, tuple(a + b for a, b in zip(m, mono)))
                    vec[index[key]] = vec.get(index[key], 0) + c
                red.add(vec)
        free = red.free_columns()
        basis = [cols[i] for i in free]
        bindex = {i: j for j, i in enumerate(free)}
        hit = (cols, index, red, basis, bindex)
        self._slices[w] = hit
        return hit

    def basis(self, w: int) -> List[Tuple[int, Tuple[int, ...]]]:
        return self._slice(w)[3]

    def dim(self, w: int) -> int:
        return len(self.basis(w))

    def coords(self, vec: ModVec, w: int) -> Dict[int, Fraction]:
        """Normal form of a free-module vector of weight ``w`` in the basis of ``M_w``."""
        cols, index, red, _, bindex = self._slice(w)
        raw = {}
        for key, c in vec.items():
            i = index[key]
            raw[i] = raw.get(i, 0) + c
        return {bindex[i]: c for i, c in red.reduce(raw).items()}

    def mul_matrix(self, exps: Tuple[int, ...], w: int) -> ExactMatrix:
        """Matrix of multiplication by the monomial ``x^exps`` from ``M_w`` to ``M_{w + |exps|}``."""
        key = (tuple(exps), w)
        hit = self._mul_cache.get(key)
        if hit is not None:
            return hit
        w2 = w + monomial_weight(exps, self.pres.weights)
        src = self.basis(w)
        entries = {}
        for j, (k, m) in enumerate(src):
            for i, c in self.coords({(k, tuple(a + b for a, b in zip(m, exps))): Fraction(1)}, w2).items():
                entries[(i, j)] = c
        out = ExactMatrix(self.dim(w2), len(src), entries)
        self._mul_cache[key] = out
        return out

    def poly_matrix(self, p: Poly, w: int) -> ExactMatrix:
        """Multiplication by a weight-homogeneous polynomial."""
        if not p:
            raise ValueError("use a zero matrix for the zero polynomial")
        ws = {monomial_weight(m, self.pres.weights) for m in p}
        if len(ws) != 1:
            raise InhomogeneousElement("multiplier is not weight-homogeneous")
        w2 = w + ws.pop()
        entries: Dict[Tuple[int, int], Fraction] = {}
        for m, c in p.items():
            for (i, j), v in self.mul_matrix(m, w).entries():
                entries[(i, j)] = entries.get((i, j), 0) + c * v
        return ExactMatrix(self.dim(w2), self.dim(w), entries)


class QuotientAlgebra(GradedModule):
    """The algebra ``a = Q[x]/I`` as a cyclic module over itself, with multiplication."""

    def __init__(self, pres: Presentation):
        super().__init__(pres, gen_weights=(0,), relations=(), name=pres.name)
        self._prod: Dict[Tuple[Tuple[int, ...], Tuple[int, ...]], Dict[int, Fraction]] = {}

    def monomials(self, w: int) -> List[Tuple[int, ...]]:
        return [m for _, m in self.basis(w)]

    def weight_of(self, exps: Tuple[int, ...]) -> int:
        return monomial_weight(exps, self.pres.weights)

    def product(self, m1: Tuple[int, ...], m2: Tuple[int, ...]) -> Dict[int, Fraction]:
        """Normal form of ``x^m1 * x^m2`` as coordinates in the basis of its weight."""
        key = (m1, m2) if m1 <= m2 else (m2, m1)
        hit = self._prod.get(key)
        if hit is None:
            m = tuple(a + b for a, b in zip(m1, m2))
            hit = self.coords({(0, m): Fraction(1)}, self.weight_of(m))
            self._prod[key] = hit
        return hit

    def normal_form(self, p: Poly) -> Dict[Tuple[int, ...], Fraction]:
        """Reduce a homogeneous polynomial to a combination of basis monomials."""
        if not p:
            return {}
        w = self.weight_of(next(iter(p)))
        basis = self.monomials(w)
        return {basis[i]: c for i, c in self.coords({(0, m): c for m, c in p.items()}, w).items()}


def quotient_slice(a: QuotientAlgebra, weight: int) -> List[Tuple[int, ...]]:
    """Monomial basis of the weight piece of ``a`` (hdeg 0)."""
    return a.monomials(weight)


# -- Koszul complexes --------------------------------------------------

def polynomial_ring(names: Sequence[str], weights: Optional[Sequence[int]] = None,
                    odd: Sequence[str] = ()) -> FreeDGAlgebra:
    """``Q[names]``; names listed in ``odd`` get hdeg -1."""
    weights = weights or [1] * len(names)
    return FreeDGAlgebra([Generator(n, -1 if n in odd else 0, w) for n, w in zip(names, weights)])


@dataclass
class HandySequence:
    ambient: FreeDGAlgebra
    elements: List[Element]
    gradings: List[Tuple[int, int, int]] = field(init=False)

    def __post_init__(self):
        self.gradings = []
        for k, x in enumerate(self.elements):
            g = self.ambient.homogeneous_grading(x)
            if g is None:
                raise InhomogeneousElement(
                    f"sequence element {k + 1} ({self.ambient.format(x)}) is zero or not homogeneous")
            self.gradings.append(g)


@dataclass
class KoszulComplex:
    """``R<E>`` with one exterior generator per sequence element and ``v(e_i) = x_i``."""

    algebra: FreeDGAlgebra
    sequence: HandySequence
    names: List[str]


def koszul_complex(R: FreeDGAlgebra, X) -> KoszulComplex:
    if not isinstance(X, HandySequence):
        X = HandySequence(R, [R.element(x) for x in X])
    names = []
    gens = []
    for k, (hd, _, wt) in enumerate(X.gradings):
        nm = f"e{k + 1}"
        while nm in R.index or nm in names:
            nm = "_" + nm
        names.append(nm)
        gens.append(Generator(nm, hdeg=hd, weight=wt, ext=-1))
    wide = FreeDGAlgebra(tuple(R.gens) + tuple(gens), None, check=False)
    v = {nm: wide.embed_into_wider(x, len(gens)) for nm, x in zip(names, X.elements)}
    return KoszulComplex(FreeDGAlgebra(wide.gens, v), X, names)


@dataclass
class Verdict:
    regular: bool
    weight_bound: int
    witness_weight: Optional[int] = None
    failing_index: Optional[int] = None
    detail: str = ""

    def __bool__(self):
        return self.regular

    def __str__(self):
        if self.regular:
            return f"regular up to weight {self.weight_bound}"
        return f"NOT REGULAR, witness weight {self.witness_weight}"


def koszul_homology(K: KoszulComplex, ext_degree: int, weight: int) -> int:
    """dim of the Koszul homology at exterior degree ``ext_degree`` (<= 0), summed over hdeg."""
    alg = K.algebra
    hdegs = sorted({alg.mono_hdeg(m) for m in weight_basis(alg, weight, ext=ext_degree)})
    total = 0
    for h in hdegs:
        sl = slice_complex(alg, weight, ext_degree - 1, ext_degree + 1, grading="ext", hdeg=h)
        total += sl.cohomology(ext_degree)
    return total


def is_regular_up_to(R: FreeDGAlgebra, X, weight_bound: int) -> Verdict:
    """Vanishing of the first Koszul homology in every weight up to the bound."""
    if weight_bound < 1:
        raise ValueError("weight_bound must be >= 1")
    K = X if isinstance(X, KoszulComplex) else koszul_complex(R, X)
    for w in range(1, weight_bound + 1):
        h = koszul_homology(K, -1, w)
        if h:
            return Verdict(False, weight_bound, witness_weight=w, detail=f"dim H^-1 = {h} at weight {w}")
    return Verdict(True, weight_bound)


def _span_rank(vectors: List[Dict[int, Fraction]], ncols: int) -> int:
    red = RowReducer(ncols)
    for v in vectors:
        red.add(v)
    return red.rank


def zero_divisor_check(R: FreeDGAlgebra, X, weight_bound: int) -> Verdict:
    """Each element acts regularly modulo the ideal of the elements before it.

    Even elements must be non-zero-divisors; odd elements must have
    annihilator equal to the ideal they generate.  Slices are tested for
    every source piece whose product with the element has weight at most
    the bound.
    """
    if weight_bound < 1:
        raise ValueError("weight_bound must be >= 1")
    if not isinstance(X, HandySequence):
        X = HandySequence(R, [R.element(x) for x in X])
    failures = []
    for i, (x, (gx, _, wx)) in enumerate(zip(X.elements, X.gradings)):
        prefix = list(zip(X.elements[:i], X.gradings[:i]))
        odd = gx % 2 != 0
        for w in range(0, weight_bound - wx + 1):
            for h in sorted({R.mono_hdeg(m) for m in weight_basis(R, w)}):
                src = weight_basis(R, w, hdeg=h)
                tgt = weight_basis(R, w + wx, hdeg=h + gx)
                sidx = {m: k for k, m in enumerate(src)}
                tidx = {m: k for k, m in enumerate(tgt)}

                def ideal_vectors(basis_w, basis_h, index, extra=()):
                    vecs = []
                    for y, (gy, _, wy) in list(prefix) + list(extra):
                        for m in weight_basis(R, basis_w - wy, hdeg=basis_h - gy):
                            prod = R.mul({m: Fraction(1)}, y)
                            if prod:
                                vecs.append({index[mm]: c for mm, c in prod.items()})
                    return vecs

                j_tgt = ideal_vectors(w + wx, h + gx, tidx)
                mult = []
                for m in src:
                    prod = R.mul({m: Fraction(1)}, x)
                    mult.append({tidx[mm]: c for mm, c in prod.items()})
                rank_j = _span_rank(j_tgt, len(tgt))
                rank_joint = _span_rank(j_tgt + mult, len(tgt))
                kernel = len(src) - (rank_joint - rank_j)
                expected = _span_rank(ideal_vectors(w, h, sidx, [(x, (gx, 0, wx))] if odd else []), len(src))
                if kernel != expected:
                    failures.append((w + wx, i, h, kernel - expected))
        if failures:
            w_fail = min(f[0] for f in failures)
            return Verdict(False, weight_bound, witness_weight=w_fail, failing_index=i + 1,
                           detail=f"element {i + 1} fails at target weight {w_fail}")
    return Verdict(True, weight_bound)
