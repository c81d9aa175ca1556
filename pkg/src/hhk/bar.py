"""Bar complexes, the contracting homotopy and direct Hochschild cohomology.

Everything here works with a weight-graded commutative algebra ``a``
concentrated in homological degree 0, so the Koszul signs of the faces are
trivial.  Tensors are tuples of basis monomials of ``a``; a coefficient
factor from a module ``M`` is a basis label ``(gen, exps)`` of ``M``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .exactlin import ExactMatrix, cohomology_dim
from .koszul import GradedModule, QuotientAlgebra

__all__ = [
    "BarSlice",
    "CochainSlice",
    "HomotopyReport",
    "bar_differentials",
    "contracting_homotopy_check",
    "acyclic_bar_homology",
    "source_weight_bound",
    "cochain_slice",
    "hochschild_direct",
    "hochschild_direct_table",
    "hochschild_via_bar",
]

Mono = Tuple[int, ...]
Tensor = Tuple[Mono, ...]


def _tensors(a: QuotientAlgebra, n: int, weight: int, positive: bool) -> List[Tensor]:
    """Basis tensors of ``a^{(x)n}`` (or of the positive part) of total weight ``weight``."""
    lo = 1 if positive else 0
    out: List[Tensor] = []

    def rec(k, rem, prefix):
        if k == n:
            if rem == 0:
                out.append(tuple(prefix))
            return
        for w in range(lo, rem - lo * (n - k - 1) + 1):
            for m in a.monomials(w):
                prefix.append(m)
                rec(k + 1, rem - w, prefix)
                prefix.pop()

    if weight >= 0:
        rec(0, weight, [])
    return out


def _scalar(c):
    return c.numerator if c.denominator == 1 else c


def _mul(a: QuotientAlgebra, m1: Mono, m2: Mono) -> List[Tuple[Fraction, Mono]]:
    cache = a.__dict__.setdefault("_bar_mul", {})
    hit = cache.get((m1, m2))
    if hit is None:
        basis = a.monomials(a.weight_of(m1) + a.weight_of(m2))
        hit = [(_scalar(c), basis[i]) for i, c in a.product(m1, m2).items()]
        cache[(m1, m2)] = hit
    return hit


def _act(M: GradedModule, y, m: Mono) -> List[Tuple[Fraction, tuple]]:
    cache = M.__dict__.setdefault("_bar_act", {})
    hit = cache.get((y, m))
    if hit is None:
        k, alpha = y
        new = tuple(p + q for p, q in zip(alpha, m))
        w = _module_weight(M, (k, new))
        basis = M.basis(w)
        hit = [(_scalar(c), basis[i]) for i, c in M.coords({(k, new): Fraction(1)}, w).items()]
        cache[(y, m)] = hit
    return hit


def _tensor_weight(a: QuotientAlgebra, t: Tensor) -> int:
    cache = a.__dict__.setdefault("_bar_wt", {})
    total = 0
    for m in t:
        w = cache.get(m)
        if w is None:
            w = cache[m] = a.weight_of(m)
        total += w
    return total


def _module_weight(M: GradedModule, y) -> int:
    k, alpha = y
    return M.gen_weights[k] + sum(e * g for e, g in zip(alpha, M.pres.weights))


def _module_tensors(a: QuotientAlgebra, M: GradedModule, n: int, weight: int, extra: int = 0) -> List[tuple]:
    """Basis of ``M (x) a^{(x)(n+extra)}`` in total weight ``weight``."""
    out = []
    for wm in range(M.min_weight, weight + 1):
        for y in M.basis(wm):
            for t in _tensors(a, n + extra, weight - wm, positive=False):
                out.append((y,) + t)
    return out


def _faces(a: QuotientAlgebra, M: GradedModule, tensor: tuple, last: str) -> Dict[tuple, Fraction]:
    """Alternating sum of faces of ``y (x) a_1 (x) ... (x) a_k``.

    ``last='cyclic'`` adds the face that moves ``a_k`` around to act on ``y``;
    ``last='bar'`` treats ``a_k`` as the right-hand algebra factor and only
    multiplies adjacent pairs.
    """
    y, rest = tensor[0], tensor[1:]
    out: Dict[tuple, Fraction] = {}

    def add(t, c):
        s = out.get(t, 0) + c
        if s:
            out[t] = s
        else:
            out.pop(t, None)

    k = len(rest)
    if k == 0:
        return out
    for c, yy in _act(M, y, rest[0]):
        add((yy,) + rest[1:], c)
    for i in range(1, k):
        sign = -1 if i % 2 else 1
        for c, m in _mul(a, rest[i - 1], rest[i]):
            add((y,) + rest[:i - 1] + (m,) + rest[i + 1:], sign * c)
    if last == "cyclic":
        sign = -1 if k % 2 else 1
        for c, yy in _act(M, y, rest[-1]):
            add((yy,) + rest[:-1], sign * c)
    return out


def _face_matrix(a, M, src: List[tuple], tgt: List[tuple], last: str) -> ExactMatrix:
    index = {t: i for i, t in enumerate(tgt)}
    entries = {}
    for j, t in enumerate(src):
        for tt, c in _faces(a, M, t, last).items():
            entries[(index[tt], j)] = c
    return ExactMatrix(len(tgt), len(src), entries)


@dataclass
class BarSlice:
    """Weight ``weight`` piece of the cyclic complex ``M (x) a^n`` and of the bar complex ``M (x) a^n (x) a``."""

    algebra: QuotientAlgebra
    module: GradedModule
    bar_degree: int
    weight: int
    basis: List[tuple]
    b_target: List[tuple]
    b_matrix: ExactMatrix
    bar_basis: List[tuple]
    bar_target: List[tuple]
    b_prime_matrix: ExactMatrix


def bar_differentials(a: QuotientAlgebra, M: Optional[GradedModule] = None, n: int = 1,
                      weight: int = 0) -> BarSlice:
    """Matrices of ``b`` (cyclic) and ``b'`` (bar) out of degree ``n`` in one weight."""
    if n < 0:
        raise ValueError("bar degree must be >= 0")
    M = M if M is not None else a
    cyc = _module_tensors(a, M, n, weight)
    bar = _module_tensors(a, M, n, weight, extra=1)
    if n == 0:
        b = ExactMatrix.zero(0, len(cyc))
        cyc_t: List[tuple] = []
        bar_t: List[tuple] = []
        bp = ExactMatrix.zero(0, len(bar))
    else:
        cyc_t = _module_tensors(a, M, n - 1, weight)
        bar_t = _module_tensors(a, M, n - 1, weight, extra=1)
        b = _face_matrix(a, M, cyc, cyc_t, "cyclic")
        bp = _face_matrix(a, M, bar, bar_t, "bar")
    return BarSlice(a, M, n, weight, cyc, cyc_t, b, bar, bar_t, bp)


# -- acyclic bar complex and its contracting homotopy -------------------

@dataclass
class HomotopyReport:
    ok: bool
    checked: int = 0
    counterexample: Optional[Tuple[int, int, tuple]] = None

    def __bool__(self):
        return self.ok


def _bprime(a: QuotientAlgebra, n: int, w: int) -> Tuple[List[Tensor], List[Tensor], ExactMatrix]:
    """``b'`` from ``a^{(x)(n+2)}`` to ``a^{(x)(n+1)}`` (degree -1 is ``a`` itself)."""
    src = _tensors(a, n + 2, w, positive=False)
    tgt = _tensors(a, n + 1, w, positive=False) if n >= 0 else []
    index = {t: i for i, t in enumerate(tgt)}
    entries: Dict[Tuple[int, int], Fraction] = {}
    if n >= 0:
        for j, t in enumerate(src):
            for i in range(len(t) - 1):
                sign = -1 if i % 2 else 1
                for c, m in _mul(a, t[i], t[i + 1]):
                    key = (index[t[:i] + (m,) + t[i + 2:]], j)
                    entries[key] = entries.get(key, 0) + sign * c
    return src, tgt, ExactMatrix(len(tgt), len(src), entries)


def _homotopy(a: QuotientAlgebra, n: int, w: int, sign: int) -> ExactMatrix:
    """``h(alpha) = sign * 1 (x) alpha`` from degree ``n`` to ``n + 1``."""
    src = _tensors(a, n + 2, w, positive=False)
    tgt = _tensors(a, n + 3, w, positive=False)
    index = {t: i for i, t in enumerate(tgt)}
    one = (0,) * a.pres.nvars
    return ExactMatrix(len(tgt), len(src), {(index[(one,) + t], j): sign for j, t in enumerate(src)})


def contracting_homotopy_check(a: QuotientAlgebra, n_max: int, weight_max: int, sign: int = 1) -> HomotopyReport:
    """Verify ``b'h + hb' = id`` on the augmented bar complex.

    Degree ``n`` is ``a^{(x)(n+2)}`` for ``n >= -1``; degree -1 is ``a``
    with ``b'`` out of it equal to zero.  ``sign`` scales ``h`` and exists
    so the check can be shown to catch a wrong sign.
    """
    if n_max < 1 or weight_max < 1:
        raise ValueError("bounds must be >= 1")
    checked = 0
    for w in range(weight_max + 1):
        for n in range(-1, n_max + 1):
            src, _, d_out = _bprime(a, n, w)
            h_out = _homotopy(a, n, w, sign)
            lhs = _bprime(a, n + 1, w)[2] @ h_out
            if n >= 0:
                lhs_terms = _homotopy(a, n - 1, w, sign) @ d_out
                total = _sum(lhs, lhs_terms)
            else:
                total = lhs
            ident = ExactMatrix.identity(len(src))
            if total != ident:
                dense = total.to_dense()
                for j, t in enumerate(src):
                    col = [dense[i][j] for i in range(len(src))]
                    if col != [Fraction(int(i == j)) for i in range(len(src))]:
                        return HomotopyReport(False, checked, (n, w, t))
            checked += len(src)
    return HomotopyReport(True, checked)


def _sum(x: ExactMatrix, y: ExactMatrix) -> ExactMatrix:
    entries = dict(x.entries())
    for k, v in y.entries():
        entries[k] = entries.get(k, 0) + v
    return ExactMatrix(x.nrows, x.ncols, entries)


def acyclic_bar_homology(a: QuotientAlgebra, n: int, weight: int) -> int:
    """Homology of the augmented bar complex at degree ``n`` (expected zero)."""
    d_in = _bprime(a, n + 1, weight)[2]
    d_out = _bprime(a, n, weight)[2]
    return cohomology_dim(d_in, d_out)


# -- Hochschild cochains ------------------------------------------------

def source_weight_bound(a: QuotientAlgebra, n: int) -> int:
    """Source-weight truncation that leaves HH^n unchanged.

    Filtering cochains by source weight gives a spectral sequence whose
    first page is Hom(Tor^a_k(Q, Q), M).  Truncating at U is exact in degree
    n once Tor_n and Tor_{n+1} vanish above U.  For complete intersections
    and Koszul algebras Tor_k lives in weights <= k * max(generator weight,
    relation weight / 2), which is the bound returned here.
    """
    g = max(a.pres.weights)
    r = max((a.pres.relation_weight(i) for i in range(len(a.pres.relations))), default=0)
    return math.ceil((n + 1) * max(Fraction(g), Fraction(r, 2)))


@dataclass
class CochainSlice:
    """Normalized cochains ``a+^{(x)n} -> M`` raising weight by ``shift``, sources of weight <= ``source_max``."""

    n: int
    shift: int
    source_max: int
    basis: List[Tuple[Tensor, tuple]] = field(default_factory=list)

    @property
    def dim(self) -> int:
        return len(self.basis)


def cochain_slice(a: QuotientAlgebra, M: GradedModule, n: int, shift: int, source_max: int,
                  positive: bool = True) -> CochainSlice:
    sl = CochainSlice(n, shift, source_max)
    lo = n if positive else 0
    for u in range(lo, source_max + 1):
        targets = M.basis(u + shift) if u + shift >= M.min_weight else []
        if not targets:
            continue
        for t in _tensors(a, n, u, positive):
            sl.basis.extend((t, y) for y in targets)
    return sl


def _coboundary_faces(a: QuotientAlgebra, t: Tensor) -> List[Tuple[Fraction, Tensor, Optional[Mono]]]:
    """Terms ``(c, s, mult)`` with ``(delta f)(t) = sum c * mult . f(s)``."""
    k = len(t)
    out: List[Tuple[Fraction, Tensor, Optional[Mono]]] = [(1, t[1:], t[0])]
    for i in range(1, k):
        sign = -1 if i % 2 else 1
        for c, m in _mul(a, t[i - 1], t[i]):
            out.append((sign * c, t[:i - 1] + (m,) + t[i + 1:], None))
    out.append((-1 if k % 2 else 1, t[:-1], t[-1]))
    return out


def _cyclic_faces(sl: BarSlice, a: QuotientAlgebra) -> Dict[Tensor, List[Tuple[Fraction, Tensor, Optional[Mono]]]]:
    """Read ``b(1 (x) alpha)`` off a cyclic ``b`` matrix as terms ``a0 (x) alpha'``."""
    one = (0,) * a.pres.nvars
    out: Dict[Tensor, List[Tuple[Fraction, Tensor, Optional[Mono]]]] = {}
    cols = {j: t for j, t in enumerate(sl.basis) if t[0] == (0, one)}
    entries: Dict[int, List[Tuple[int, Fraction]]] = {}
    for (i, j), v in sl.b_matrix.entries():
        if j in cols:
            entries.setdefault(j, []).append((i, v))
    for j, t in cols.items():
        terms = []
        for i, v in entries.get(j, ()):
            tgt = sl.b_target[i]
            a0 = tgt[0][1]
            terms.append((v, tgt[1:], None if not any(a0) else a0))
        out[t[1:]] = terms
    return out


def _coboundary_matrix(a: QuotientAlgebra, M: GradedModule, src: CochainSlice, tgt: CochainSlice,
                 faces=None) -> ExactMatrix:
    """Matrix of the Hochschild coboundary from ``src`` (degree n) to ``tgt`` (degree n+1)."""
    col = {b: j for j, b in enumerate(src.basis)}
    row = {b: i for i, b in enumerate(tgt.basis)}
    entries: Dict[Tuple[int, int], Fraction] = {}
    by_source: Dict[Tensor, List[tuple]] = {}
    for t, y in tgt.basis:
        by_source.setdefault(t, []).append(y)
    for t, _ in by_source.items():
        terms = faces(t) if faces else _coboundary_faces(a, t)
        for c, s, mult in terms:
            us = _tensor_weight(a, s)
            if us > src.source_max:
                continue
            ws = us + src.shift
            if ws < M.min_weight:
                continue
            for y in M.basis(ws):
                j = col.get((s, y))
                if j is None:
                    continue
                if mult is None:
                    images = [(1, y)]
                else:
                    images = _act(M, y, mult)
                for cc, yy in images:
                    i = row.get((t, yy))
                    if i is not None:
                        key = (i, j)
                        val = entries.get(key, 0) + c * cc
                        if val:
                            entries[key] = val
                        else:
                            entries.pop(key)
    return ExactMatrix(tgt.dim, src.dim, entries)


def _hh_dim(a, M, n, shift, U, positive=True, faces=None) -> int:
    slices = [cochain_slice(a, M, k, shift, U, positive) if k >= 0 else CochainSlice(k, shift, U)
              for k in (n - 1, n, n + 1)]
    d_in = _coboundary_matrix(a, M, slices[0], slices[1], faces) if n >= 1 else ExactMatrix.zero(slices[1].dim, 0)
    d_out = _coboundary_matrix(a, M, slices[1], slices[2], faces)
    return cohomology_dim(d_in, d_out)


def hochschild_direct(a: QuotientAlgebra, M: Optional[GradedModule] = None, n: int = 0,
                      weight_max: int = 6, weight_min: Optional[int] = None,
                      source_weight_max: Optional[int] = None, threads: int = 1) -> Dict[int, int]:
    """dim HH^n(a, M) per weight from the normalized Hochschild cochain complex.

    The weight of a cochain is the amount by which it raises weight.
    Weights below ``weight_min`` (default: the lowest weight any truncated
    cochain can have) are omitted; they vanish anyway.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    M = M if M is not None else a
    U = source_weight_max if source_weight_max is not None else source_weight_bound(a, n)
    lo = M.min_weight - U if weight_min is None else weight_min
    weights = list(range(lo, weight_max + 1))
    # prime caches serially; the slices themselves only read them
    for w in range(0, U + 1):
        a.monomials(w)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            dims = list(ex.map(lambda s: _hh_dim(a, M, n, s, U), weights))
    else:
        dims = [_hh_dim(a, M, n, s, U) for s in weights]
    return dict(zip(weights, dims))


def hochschild_direct_table(a: QuotientAlgebra, M: Optional[GradedModule] = None, n_max: int = 4,
                            weight_max: int = 6, weight_min: Optional[int] = None,
                            threads: int = 1) -> Dict[Tuple[int, int], int]:
    out = {}
    for n in range(n_max + 1):
        for w, d in hochschild_direct(a, M, n, weight_max, weight_min, threads=threads).items():
            out[(n, w)] = d
    return out


def hochschild_via_bar(a: QuotientAlgebra, n: int, weight_max: int, weight_min: Optional[int] = None,
                       source_weight_max: Optional[int] = None) -> Dict[int, int]:
    """HH^n(a, a) from unnormalized cochains ``Hom_a(a (x) a^n, a)`` dual to the cyclic ``b``.

    A cochain is determined by its values on ``1 (x) alpha``; its coboundary
    is read off the ``b`` matrix of :func:`bar_differentials` using
    ``f(a0 (x) alpha) = a0 f(alpha)``.
    """
    U = source_weight_max if source_weight_max is not None else source_weight_bound(a, n)
    lo = -U if weight_min is None else weight_min
    cache: Dict[Tensor, list] = {}

    def faces(t: Tensor):
        if t not in cache:
            w = sum(a.weight_of(m) for m in t)
            cache.update(_cyclic_faces(bar_differentials(a, a, len(t), w), a))
        return cache[t]

    return {s: _hh_dim(a, a, n, s, U, positive=False, faces=faces) for s in range(lo, weight_max + 1)}
