"""Free DG resolvents, Kaehler differentials and Hochschild cohomology through them.

A resolvent of ``a = Q[x]/I`` is a free graded-commutative DG algebra ``A``
whose hdeg 0 part is a polynomial ring mapping onto ``a`` and whose
homology is ``a`` in hdeg 0 and zero below.  Hochschild cohomology with
coefficients in an ``a``-module ``M`` is assembled from the complexes
``Hom_A(wedge^j Omega_A, M)``; a class in hdeg ``-i`` of the ``j``-th one
contributes to ``HH^{i+j}``.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .dgalg import (
    Element,
    FreeDGAlgebra,
    Generator,
    check_square_zero,
    exterior_algebra,
    slice_complex,
    weight_basis,
)
from .exactlin import ExactMatrix, cohomology_dim, cohomology_representatives
from .koszul import GradedModule, Presentation, QuotientAlgebra
from .poly import Poly, poly_mul, poly_pow

__all__ = [
    "BoundTooSmall",
    "Resolvent",
    "KaehlerModule",
    "HKRTable",
    "NormalConeReport",
    "tate_resolvent",
    "pad_resolvent",
    "kaehler",
    "right_partial",
    "hkr_table",
    "normal_cone_check",
    "resolvent_independence",
]


class BoundTooSmall(RuntimeError):
    """The requested bounds cannot be met (too many generators or too shallow a resolvent)."""


def _fresh(stem: str, taken) -> str:
    k = 1
    while f"{stem}{k}" in taken:
        k += 1
    return f"{stem}{k}"


@dataclass
class Resolvent:
    """``algebra`` with homology ``a`` in hdeg 0 and none in hdeg ``hdeg_bound..-1`` up to ``weight_bound``.

    ``augmentation`` sends every hdeg 0 generator to a polynomial in the
    presentation variables.
    """

    algebra: FreeDGAlgebra
    presentation: Presentation
    augmentation: Dict[str, Poly]
    hdeg_bound: int
    weight_bound: int

    @property
    def certified_bounds(self) -> Tuple[int, int]:
        return self.hdeg_bound, self.weight_bound

    def homology_dims(self, hdeg: int, weight: int) -> int:
        sl = slice_complex(self.algebra, weight, hdeg - 1, min(hdeg + 1, 0), grading="hdeg")
        return sl.cohomology(hdeg)

    def generators_by_hdeg(self) -> Dict[int, List[Generator]]:
        out: Dict[int, List[Generator]] = {}
        for g in self.algebra.gens:
            out.setdefault(g.hdeg, []).append(g)
        return out


def _vector_to_element(alg: FreeDGAlgebra, basis, vec) -> Element:
    return {m: Fraction(c) for m, c in zip(basis, vec) if c}


def tate_resolvent(a, hdeg_bound: int = -6, weight_bound: int = 8, max_generators: int = 400) -> Resolvent:
    """Kill homology slice by slice, from hdeg -1 downwards and by increasing weight.

    Each homology class at ``(hdeg i, weight w)`` gets a new generator of
    ``(hdeg i - 1, weight w)`` whose differential is the first cycle of the
    kernel basis not yet in the image.
    """
    pres = a.pres if isinstance(a, QuotientAlgebra) else a
    if hdeg_bound > -1 or weight_bound < 1:
        raise ValueError("need hdeg_bound <= -1 and weight_bound >= 1")
    alg = pres.polynomial_algebra()
    taken = set(pres.names)
    gens, diffs = [], {}
    for k, rel in enumerate(pres.relations):
        nm = _fresh("u", taken)
        taken.add(nm)
        gens.append(Generator(nm, -1, pres.relation_weight(k)))
        diffs[nm] = rel
    if gens:
        wide = FreeDGAlgebra(tuple(alg.gens) + tuple(gens), None, check=False)
        alg = FreeDGAlgebra(wide.gens, {nm: pres.to_element(wide, r) for nm, r in diffs.items()})
    for i in range(-1, hdeg_bound - 1, -1):
        for w in range(1, weight_bound + 1):
            sl = slice_complex(alg, w, i - 1, min(i + 1, 0), grading="hdeg")
            reps = cohomology_representatives(sl.matrix(i - 1), sl.matrix(i))
            if not reps:
                continue
            if alg.ngens + len(reps) > max_generators:
                raise BoundTooSmall(
                    f"more than {max_generators} generators needed to reach hdeg {hdeg_bound}, weight {weight_bound}")
            new, new_diff = [], {}
            for vec in reps:
                nm = _fresh("u", taken)
                taken.add(nm)
                new.append(Generator(nm, i - 1, w))
                new_diff[nm] = FreeDGAlgebra.embed_into_wider(_vector_to_element(alg, sl.bases[i], vec), len(reps))
            alg = alg.extend(new, new_diff)
    aug = {nm: {tuple(int(j == k) for j in range(pres.nvars)): Fraction(1)} for k, nm in enumerate(pres.names)}
    return Resolvent(alg, pres, aug, hdeg_bound, weight_bound)


def pad_resolvent(res: Resolvent, weight: int = 1) -> Resolvent:
    """Adjoin a contractible pair ``p`` (hdeg 0) and ``q`` (hdeg -1) with ``d q = p``, augmented by ``p -> 0``."""
    taken = {g.name for g in res.algebra.gens}
    p, q = _fresh("p", taken), _fresh("q", taken)
    gens = [Generator(p, 0, weight), Generator(q, -1, weight)]
    probe = FreeDGAlgebra(tuple(res.algebra.gens) + tuple(gens), None, check=False)
    alg = res.algebra.extend(gens, {q: probe.gen(p)})
    aug = dict(res.augmentation)
    aug[p] = {}
    return Resolvent(alg, res.presentation, aug, res.hdeg_bound, res.weight_bound)


# -- Kaehler differentials ------------------------------------------------

def right_partial(alg: FreeDGAlgebra, a: Element, gen: int) -> Element:
    """Derivative with respect to generator ``gen`` taken from the right.

    A monomial ``u t v`` contributes ``(-1)^{|t||v|} u v``: the factor is
    moved to the right end before it is removed.
    """
    out: Element = {}
    odd_t = alg.gens[gen].odd
    for m, c in a.items():
        e = m[gen]
        if not e:
            continue
        later = sum(m[k] * alg.gens[k].degree for k in range(gen + 1, alg.ngens))
        sign = -1 if (odd_t and later % 2) else 1
        mm = list(m)
        mm[gen] -= 1
        mm = tuple(mm)
        out[mm] = out.get(mm, 0) + sign * e * c
        if not out[mm]:
            del out[mm]
    return out


@dataclass
class KaehlerModule:
    """``wedge Omega_A`` as the free algebra over ``A`` on one generator ``dt`` per generator ``t``.

    ``dt`` has the hdeg and weight of ``t`` and exterior tag -1, so the
    exterior power ``j`` is the ``ext = -j`` part.
    """

    base: Resolvent
    algebra: FreeDGAlgebra
    names: List[str]

    @property
    def nbase(self) -> int:
        return self.base.algebra.ngens

    def d_generator(self, name: str) -> Element:
        return self.algebra.diff[self.names[self.base.algebra.index[name]]]


def kaehler(A) -> KaehlerModule:
    """Differential ``d(dt) = sum_t' (right d/dt' of dt) dt'``."""
    res = A if isinstance(A, Resolvent) else Resolvent(A, Presentation((), ()), {}, -1, 1)
    alg = res.algebra
    taken = {g.name for g in alg.gens}
    names = []
    for g in alg.gens:
        nm = "d" + g.name
        while nm in taken:
            nm = "d" + nm
        taken.add(nm)
        names.append(nm)
    module_gens = []
    for k, g in enumerate(alg.gens):
        dt = alg.diff.get(g.name, {})
        values = {}
        for kk in range(alg.ngens):
            part = right_partial(alg, dt, kk)
            if part:
                values[names[kk]] = part
        module_gens.append((Generator(names[k], g.hdeg, g.weight), values))
    return KaehlerModule(res, exterior_algebra(alg, module_gens), names)


# -- Hom complexes into M ---------------------------------------------------

def _d_monomials(K: KaehlerModule, j: int, hdeg: int) -> List[Tuple[int, ...]]:
    """Monomials in the ``dt`` generators alone with ``j`` factors and the given hdeg."""
    gens = K.algebra.gens[K.nbase:]
    out = []
    cur = [0] * len(gens)

    def rec(k, left, h):
        if k == len(gens):
            if left == 0 and h == hdeg:
                out.append((0,) * K.nbase + tuple(cur))
            return
        g = gens[k]
        top = 1 if g.odd else left
        for e in range(min(top, left), -1, -1):
            hh = h + e * g.hdeg
            if hh < hdeg:
                continue
            cur[k] = e
            rec(k + 1, left - e, hh)
        cur[k] = 0

    rec(0, j, 0)
    return out


class _HomComplex:
    """``Hom_A(wedge^j Omega_A, M)`` with ``A`` acting on ``M`` through the augmentation."""

    def __init__(self, K: KaehlerModule, M: GradedModule, j: int):
        self.K, self.M, self.j = K, M, j
        self._mons: Dict[int, List[Tuple[int, ...]]] = {}
        self._terms: Dict[Tuple[int, ...], List[Tuple[Fraction, Tuple[int, ...], Poly]]] = {}
        self._aug: Dict[Tuple[int, ...], Poly] = {}

    def monomials(self, i: int):
        if i not in self._mons:
            self._mons[i] = _d_monomials(self.K, self.j, -i) if i >= 0 else []
        return self._mons[i]

    def weight(self, b) -> int:
        return self.K.algebra.mono_weight(b)

    def augment(self, m: Tuple[int, ...]) -> Poly:
        """Image in ``a`` of an hdeg 0 monomial of ``A``."""
        hit = self._aug.get(m)
        if hit is None:
            res = self.K.base
            n = res.presentation.nvars
            hit = {(0,) * n: Fraction(1)}
            for k, e in enumerate(m[:self.K.nbase]):
                if e:
                    img = res.augmentation.get(res.algebra.gens[k].name)
                    if img is None:
                        raise ValueError(f"no augmentation for generator {res.algebra.gens[k].name}")
                    hit = poly_mul(hit, poly_pow(img, e, n))
            self._aug[m] = hit
        return hit

    def terms(self, b) -> List[Tuple[Fraction, Tuple[int, ...], Poly]]:
        """``d b = sum c * b'``; returns ``(coef, b', image of c in a)`` for hdeg 0 coefficients."""
        hit = self._terms.get(b)
        if hit is None:
            alg, nb = self.K.algebra, self.K.nbase
            hit = []
            for m, c in alg.differential.on_monomial(b).items():
                coef = m[:nb] + (0,) * (alg.ngens - nb)
                if alg.mono_hdeg(coef) != 0:
                    continue
                bb = (0,) * nb + m[nb:]
                hit.append((c, bb, self.augment(coef)))
            self._terms[b] = hit
        return hit

    def basis(self, i: int, w: int):
        out = []
        for b in self.monomials(i):
            t = self.weight(b) + w
            if t >= self.M.min_weight:
                out.extend((b, y) for y in self.M.basis(t))
        return out

    def matrix(self, i: int, w: int) -> ExactMatrix:
        """Coboundary ``(delta f)(b') = f(d b')`` from degree ``i`` to ``i + 1``."""
        src, tgt = self.basis(i, w), self.basis(i + 1, w)
        col = {x: k for k, x in enumerate(src)}
        entries: Dict[Tuple[int, int], Fraction] = {}
        M = self.M
        for bp in self.monomials(i + 1):
            tw = self.weight(bp) + w
            if tw < M.min_weight or not M.basis(tw):
                continue
            rowbase = {y: r for r, (b2, y) in enumerate(tgt) if b2 == bp}
            for c, b, img in self.terms(bp):
                sw = self.weight(b) + w
                if sw < M.min_weight:
                    continue
                for y in M.basis(sw):
                    jcol = col[(b, y)]
                    k, alpha = y
                    vec: Dict[tuple, Fraction] = {}
                    for mono, cc in img.items():
                        key = (k, tuple(p + q for p, q in zip(alpha, mono)))
                        vec[key] = vec.get(key, 0) + cc
                    basis = M.basis(tw)
                    for r, v in M.coords(vec, tw).items():
                        key = (rowbase[basis[r]], jcol)
                        entries[key] = entries.get(key, 0) + c * v
        return ExactMatrix(len(tgt), len(src), entries)

    def cohomology(self, i: int, w: int) -> int:
        d_out = self.matrix(i, w)
        d_in = self.matrix(i - 1, w) if i >= 1 else ExactMatrix.zero(d_out.ncols, 0)
        return cohomology_dim(d_in, d_out)

    def weight_floor(self, i: int) -> Optional[int]:
        mons = self.monomials(i)
        if not mons:
            return None
        return self.M.min_weight - max(self.weight(b) for b in mons)


@dataclass
class HKRTable:
    """``entries[(j, i, w)] = dim H^i Hom_A(wedge^j Omega_A, M)`` at weight shift ``w``."""

    entries: Dict[Tuple[int, int, int], int] = field(default_factory=dict)
    n_max: int = 0
    weight_max: int = 0

    def table(self) -> Dict[Tuple[int, int], int]:
        """Totals per ``(n, w)`` with ``n = i + j``."""
        out: Dict[Tuple[int, int], int] = {}
        for (j, i, w), d in self.entries.items():
            key = (i + j, w)
            out[key] = out.get(key, 0) + d
        return out

    def row(self, n: int) -> Dict[int, int]:
        return {w: d for (nn, w), d in self.table().items() if nn == n}


def hkr_table(A: Resolvent, M: Optional[GradedModule] = None, n_max: int = 4, weight_max: int = 6,
              j_max: Optional[int] = None, weight_min: Optional[int] = None, threads: int = 1) -> HKRTable:
    """Hochschild cohomology ``HH^n(a, M)`` for ``n <= n_max`` through the Kaehler complexes of ``A``."""
    if A.hdeg_bound > -n_max:
        raise BoundTooSmall(f"resolvent certified to hdeg {A.hdeg_bound}; need {-n_max} for n <= {n_max}")
    if M is None:
        M = QuotientAlgebra(A.presentation)
    j_max = n_max if j_max is None else min(j_max, n_max)
    if j_max < 0:
        raise ValueError("j_max must be >= 0")
    K = kaehler(A)
    jobs = []
    for j in range(j_max + 1):
        H = _HomComplex(K, M, j)
        for i in range(n_max - j + 1):
            floor = H.weight_floor(i)
            if floor is None:
                continue
            lo = floor if weight_min is None else weight_min
            for w in range(lo, weight_max + 1):
                jobs.append((H, j, i, w))
    # warm per-complex caches serially so worker threads only read them
    for H, j, i, w in jobs:
        H.monomials(i + 1)
        H.monomials(i - 1)
    run = lambda job: job[0].cohomology(job[2], job[3])
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            dims = list(ex.map(run, jobs))
    else:
        dims = [run(job) for job in jobs]
    out = HKRTable(n_max=n_max, weight_max=weight_max)
    for (H, j, i, w), d in zip(jobs, dims):
        out.entries[(j, i, w)] = d
    return out


# -- deformation to the normal cone ---------------------------------------

@dataclass
class NormalConeReport:
    ok: bool
    failures: List[str] = field(default_factory=list)
    slices_checked: int = 0

    def __bool__(self):
        return self.ok


def _minus_degree(m, minus: Sequence[int]) -> int:
    return sum(m[k] for k in minus)


def normal_cone_check(A, weight_max: int = 6, use_full: bool = False) -> NormalConeReport:
    """Compare the Koszul complex of ``T^-`` over ``A (x) A`` with ``wedge Omega_A``.

    ``A`` is a free DG algebra (or a :class:`Resolvent`).  The tensor square
    is written in ``t+ = (t1 + t2)/2`` and ``t- = (t1 - t2)/2``; its
    differential ``s`` is replaced by the part ``s~`` that preserves the
    ``T^-``-degree.  With ``use_full`` the unmodified ``s`` is used instead,
    which the bookkeeping checks must reject.
    """
    alg = A.algebra if isinstance(A, Resolvent) else A
    rep = NormalConeReport(True)

    def fail(msg):
        rep.ok = False
        rep.failures.append(msg)

    n = alg.ngens
    plus = [Generator(g.name + "+", g.hdeg, g.weight) for g in alg.gens]
    minus = [Generator(g.name + "-", g.hdeg, g.weight) for g in alg.gens]
    bare = FreeDGAlgebra(plus + minus, None, check=False)
    # the two tensor factors, written in the new coordinates
    first = alg.hom(bare, {g.name: bare.add(bare.gen(g.name + "+"), bare.gen(g.name + "-")) for g in alg.gens})
    second = alg.hom(bare, {g.name: bare.sub(bare.gen(g.name + "+"), bare.gen(g.name + "-")) for g in alg.gens})
    half = Fraction(1, 2)
    s_vals = {}
    for g in alg.gens:
        f = alg.diff.get(g.name, {})
        s_vals[g.name + "+"] = bare.scale(half, bare.add(first(f), second(f)))
        s_vals[g.name + "-"] = bare.scale(half, bare.sub(first(f), second(f)))
    R = FreeDGAlgebra(bare.gens, s_vals)
    if check_square_zero(R) is not None:
        fail("s does not square to zero")
    minus_idx = list(range(n, 2 * n))
    st_vals = {}
    for k, g in enumerate(R.gens):
        want = 0 if k < n else 1
        val = s_vals[g.name]
        st_vals[g.name] = val if use_full else {m: c for m, c in val.items() if _minus_degree(m, minus_idx) == want}
    for k, g in enumerate(R.gens):
        want = 0 if k < n else 1
        bad = [m for m in st_vals[g.name] if _minus_degree(m, minus_idx) != want]
        if bad:
            fail(f"differential of {g.name} changes the T- degree")
    try:
        Rt = FreeDGAlgebra(bare.gens, st_vals)
    except Exception as exc:  # degree errors are reported, not raised
        fail(f"modified differential is not a derivation of degree 1: {exc}")
        return rep
    if check_square_zero(Rt) is not None:
        fail("modified differential does not square to zero")
        return rep

    # K(T-) over (R, s~): e(t-) with v(e) = t- and h chosen so that hv + vh = 0
    enames = ["e" + g.name for g in alg.gens]
    egens = [Generator(nm, g.hdeg, g.weight, ext=-1) for nm, g in zip(enames, alg.gens)]
    wide = FreeDGAlgebra(tuple(Rt.gens) + tuple(egens), None, check=False)
    emb = lambda x: FreeDGAlgebra.embed_into_wider(x, n)
    v_vals = {nm: wide.gen(g.name + "-") for nm, g in zip(enames, alg.gens)}
    h_vals = {gg.name: emb(st_vals[gg.name]) for gg in Rt.gens}
    for k, nm in enumerate(enames):
        total: Element = {}
        for m, c in st_vals[minus[k].name].items():
            # c * m = (coefficient) * t'-, with t'- the unique minus factor
            idx = [q for q in minus_idx if m[q]]
            q = idx[-1]
            later = sum(m[r] * Rt.gens[r].degree for r in range(q + 1, 2 * n))
            sign = -1 if (Rt.gens[q].odd and later % 2) else 1
            coef = list(m)
            coef[q] -= 1
            coef = tuple(coef)
            cdeg = Rt.mono_degree(coef)
            term = wide.mul({coef + (0,) * n: Fraction(-sign * (-1) ** cdeg) * c}, wide.gen(enames[q - n]))
            for mm, cc in term.items():
                total[mm] = total.get(mm, 0) + cc
        h_vals[nm] = {m: c for m, c in total.items() if c}
    try:
        Kh = FreeDGAlgebra(wide.gens, h_vals)
        Kv = FreeDGAlgebra(wide.gens, v_vals)
        Kt = FreeDGAlgebra(wide.gens, {g.name: wide.add(h_vals.get(g.name, {}), v_vals.get(g.name, {}))
                                       for g in wide.gens})
    except Exception as exc:
        fail(f"Koszul differentials are not degree 1 derivations: {exc}")
        return rep
    for label, X in (("h", Kh), ("v", Kv), ("h+v", Kt)):
        if check_square_zero(X) is not None:
            fail(f"{label} does not square to zero on K(T-)")
    if not rep.ok:
        return rep

    # total homology of K(T-) is that of A
    for w in range(1, weight_max + 1):
        degs = sorted({Kt.mono_degree(m) for m in weight_basis(Kt, w)} | {alg.mono_degree(m) for m in weight_basis(alg, w)})
        if not degs:
            continue
        lo, hi = degs[0] - 1, degs[-1] + 1
        sk = slice_complex(Kt, w, lo, hi)
        sa = slice_complex(alg, w, lo, hi)
        for g in range(lo + 1, hi):
            if sk.cohomology(g) != sa.cohomology(g):
                fail(f"tot K(T-) and A differ in homology at degree {g}, weight {w}")
        rep.slices_checked += 1

    # K(T-) (x)_R A, with t- -> 0 and t+ -> t, against wedge Omega_A
    K = kaehler(alg)
    target = K.algebra
    images = {}
    for k, g in enumerate(alg.gens):
        images[g.name + "+"] = target.gen(g.name)
        images[g.name + "-"] = {}
        images[enames[k]] = target.gen(K.names[k])
    to_omega = wide.hom(target, images)
    for k, nm in enumerate(enames):
        got = to_omega(h_vals[nm])
        if to_omega(v_vals[nm]):
            fail(f"v({nm}) does not vanish modulo T-")
        expect: Element = {}
        for m, c in target.diff[K.names[k]].items():
            coef = m[:n] + (0,) * n
            sign = -(-1) ** target.mono_degree(coef)
            expect[m] = sign * c
        if got != expect:
            fail(f"differential of {nm} does not match the Kaehler differential of d{alg.gens[k].name}")
    reduced = FreeDGAlgebra(target.gens, {g.name: to_omega(h_vals[g.name + "+"]) if k < n else to_omega(h_vals[enames[k - n]])
                                          for k, g in enumerate(target.gens)})
    for w in range(1, weight_max + 1):
        for j in range(0, w + 1):
            hdegs = sorted({target.mono_hdeg(m) for m in weight_basis(target, w, ext=-j)})
            if not hdegs:
                continue
            lo, hi = hdegs[0] - 1, min(hdegs[-1] + 1, 0)
            s1 = slice_complex(reduced, w, lo, hi, grading="hdeg", ext=-j)
            s2 = slice_complex(target, w, lo, hi, grading="hdeg", ext=-j)
            for h in range(lo, hi + 1):
                if s1.dim(h) != s2.dim(h) or (lo < h < hi and s1.cohomology(h) != s2.cohomology(h)):
                    fail(f"slice (hdeg {h}, ext {-j}, weight {w}) differs from wedge Omega")
            rep.slices_checked += 1
    return rep


# -- independence of the resolvent ----------------------------------------

def resolvent_independence(a: QuotientAlgebra, hdeg_bound: int = -5, weight_bound: int = 8,
                           n_max: int = 4, weight_max: int = 6) -> Tuple[bool, List[str]]:
    """HKR tables agree for the Tate resolvent, a padded copy and one with reordered relations."""
    base = tate_resolvent(a, hdeg_bound, weight_bound)
    variants = {"padded": pad_resolvent(base)}
    k = len(a.pres.relations)
    if k > 1:
        order = list(range(k))[::-1]
        variants["reordered"] = tate_resolvent(a.pres.permuted(order), hdeg_bound, weight_bound)
    M = QuotientAlgebra(a.pres)
    ref = hkr_table(base, M, n_max, weight_max).table()
    problems = []
    for label, res in variants.items():
        other = hkr_table(res, M, n_max, weight_max).table()
        for key in sorted(set(ref) | set(other)):
            if ref.get(key, 0) != other.get(key, 0):
                problems.append(f"{label}: (n, w) = {key}: {ref.get(key, 0)} vs {other.get(key, 0)}")
    return not problems, problems
