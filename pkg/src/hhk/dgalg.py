"""Free graded-commutative DG algebras over Q.

Elements are plain dictionaries ``{monomial: Fraction}``; a monomial is the
exponent vector over the algebra's generators in their insertion order.
Generators carry a homological degree ``hdeg`` (<= 0 for algebra
generators), a positive ``weight`` and an exterior tag ``ext`` (0 or -1) for
double-graded objects.  Signs always follow the total degree
``hdeg + ext``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .exactlin import CompositeNotZero, ExactMatrix

Monomial = Tuple[int, ...]
Element = Dict[Monomial, Fraction]

__all__ = [
    "Generator",
    "FreeDGAlgebra",
    "Derivation",
    "ComplexSlice",
    "DegreeMismatch",
    "NotFree",
    "multiply",
    "extend_derivation",
    "check_square_zero",
    "weight_basis",
    "slice_complex",
    "exterior_algebra",
]


class DegreeMismatch(ValueError):
    """A value has the wrong (degree, weight) for the map it defines."""


class NotFree(ValueError):
    """Relations were supplied for a module that must be free."""


@dataclass(frozen=True)
class Generator:
    name: str
    hdeg: int = 0
    weight: int = 1
    ext: int = 0
    kind: str = "algebra"

    def __post_init__(self):
        if self.weight < 1:
            raise ValueError(f"generator {self.name!r}: weight must be >= 1")
        if self.kind == "algebra" and self.hdeg > 0:
            raise ValueError(f"generator {self.name!r}: algebra generators need hdeg <= 0")
        if self.ext not in (0, -1):
            raise ValueError(f"generator {self.name!r}: ext tag must be 0 or -1")

    @property
    def degree(self) -> int:
        return self.hdeg + self.ext

    @property
    def odd(self) -> bool:
        return self.degree % 2 == 1


def _add_into(acc: Element, m: Monomial, c) -> None:
    s = acc.get(m, 0) + c
    if s:
        acc[m] = s
    else:
        acc.pop(m, None)


class FreeDGAlgebra:
    """Free graded-commutative algebra ``Q<generators>`` with a differential.

    ``diff`` maps generator names to elements (or to anything accepted by
    :meth:`element`); missing generators are cycles.  The differential must
    raise total degree by one and preserve weight; this is checked.
    """

    def __init__(self, generators: Sequence[Generator], diff: Optional[Mapping] = None, check: bool = True):
        names = [g.name for g in generators]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate generator names in {names}")
        self.gens: Tuple[Generator, ...] = tuple(generators)
        self.index: Dict[str, int] = {n: i for i, n in enumerate(names)}
        self.ngens = len(self.gens)
        self._odd = tuple(g.odd for g in self.gens)
        self._deg = tuple(g.degree for g in self.gens)
        self._hdeg = tuple(g.hdeg for g in self.gens)
        self._ext = tuple(g.ext for g in self.gens)
        self._wt = tuple(g.weight for g in self.gens)
        self._diff_values: Tuple[Element, ...] = tuple(
            self.element(diff.get(g.name, {})) if diff else {} for g in self.gens
        )
        self._basis_cache: Dict[int, List[Monomial]] = {}
        self._d = Derivation(self, {g.name: v for g, v in zip(self.gens, self._diff_values)}, parity=1, check=check)

    # -- construction -------------------------------------------------
    def element(self, value) -> Element:
        if isinstance(value, dict):
            out: Element = {}
            for m, c in value.items():
                if isinstance(m, str):
                    for mm, cc in self.gen(m).items():
                        _add_into(out, mm, Fraction(c) * cc)
                else:
                    if len(m) != self.ngens:
                        raise ValueError("monomial length does not match the algebra")
                    _add_into(out, tuple(m), Fraction(c))
            return out
        if isinstance(value, str):
            if value in self.index:
                return self.gen(value)
            from .poly import parse_polynomial

            out = {}
            # monomials are read in generator order, so no reordering signs arise
            for m, c in parse_polynomial(value, [g.name for g in self.gens]).items():
                if any(e > 1 and self._odd[i] for i, e in enumerate(m)):
                    continue
                _add_into(out, m, c)
            return out
        if isinstance(value, (int, Fraction)):
            return self.const(value)
        raise TypeError(f"cannot convert {value!r} to an element")

    def one(self) -> Element:
        return {(0,) * self.ngens: Fraction(1)}

    def const(self, c) -> Element:
        c = Fraction(c)
        return {(0,) * self.ngens: c} if c else {}

    def gen(self, name: str) -> Element:
        i = self.index[name]
        m = [0] * self.ngens
        m[i] = 1
        return {tuple(m): Fraction(1)}

    def generator(self, name: str) -> Generator:
        return self.gens[self.index[name]]

    @property
    def diff(self) -> Dict[str, Element]:
        return {g.name: dict(v) for g, v in zip(self.gens, self._diff_values)}

    # -- gradings -----------------------------------------------------
    def mono_weight(self, m: Monomial) -> int:
        return sum(e * w for e, w in zip(m, self._wt))

    def mono_degree(self, m: Monomial) -> int:
        return sum(e * w for e, w in zip(m, self._deg))

    def mono_hdeg(self, m: Monomial) -> int:
        return sum(e * w for e, w in zip(m, self._hdeg))

    def mono_ext(self, m: Monomial) -> int:
        return sum(e * w for e, w in zip(m, self._ext))

    def grading(self, m: Monomial) -> Tuple[int, int, int]:
        """(hdeg, ext, weight) of a monomial."""
        return self.mono_hdeg(m), self.mono_ext(m), self.mono_weight(m)

    def homogeneous_grading(self, a: Element) -> Optional[Tuple[int, int, int]]:
        """Common (hdeg, ext, weight) of all terms, or None if inhomogeneous or zero."""
        keys = {self.grading(m) for m in a}
        return keys.pop() if len(keys) == 1 else None

    # -- arithmetic ---------------------------------------------------
    def mono_mul(self, m1: Monomial, m2: Monomial) -> Optional[Tuple[int, Monomial]]:
        """Product of two monomials as (sign, monomial), or None if it vanishes."""
        odd = self._odd
        sign = 1
        # odd generators of m1 to the right of position j, counted from the right
        odd_after = 0
        out = list(m1)
        for j in range(self.ngens - 1, -1, -1):
            e2 = m2[j]
            if e2 and odd[j]:
                if m1[j]:
                    return None
                if odd_after % 2:
                    sign = -sign
            if m1[j] and odd[j]:
                odd_after += 1
            out[j] += e2
        return sign, tuple(out)

    def mul(self, a: Element, b: Element) -> Element:
        out: Element = {}
        for m1, c1 in a.items():
            for m2, c2 in b.items():
                r = self.mono_mul(m1, m2)
                if r is not None:
                    _add_into(out, r[1], r[0] * c1 * c2)
        return out

    def product(self, *factors: Element) -> Element:
        out = self.one()
        for f in factors:
            out = self.mul(out, f)
        return out

    def add(self, *terms: Element) -> Element:
        out: Element = {}
        for t in terms:
            for m, c in t.items():
                _add_into(out, m, c)
        return out

    def scale(self, c, a: Element) -> Element:
        c = Fraction(c)
        return {m: c * v for m, v in a.items()} if c else {}

    def sub(self, a: Element, b: Element) -> Element:
        return self.add(a, self.scale(-1, b))

    def power(self, a: Element, k: int) -> Element:
        out = self.one()
        for _ in range(k):
            out = self.mul(out, a)
        return out

    def mono_element(self, m: Monomial) -> Element:
        return {tuple(m): Fraction(1)}

    # -- differential -------------------------------------------------
    def d(self, a: Element) -> Element:
        return self._d(a)

    @property
    def differential(self) -> "Derivation":
        return self._d

    def with_diff(self, diff: Mapping, check: bool = True) -> "FreeDGAlgebra":
        return FreeDGAlgebra(self.gens, diff, check=check)

    def extend(self, new_gens: Sequence[Generator], new_diff: Optional[Mapping] = None) -> "FreeDGAlgebra":
        """Adjoin generators at the end of the order; old elements embed by :meth:`embed`."""
        old = {g.name: self.embed_into_wider(v, len(new_gens)) for g, v in zip(self.gens, self._diff_values)}
        if new_diff:
            old.update(new_diff)
        return FreeDGAlgebra(tuple(self.gens) + tuple(new_gens), old)

    @staticmethod
    def embed_into_wider(a: Element, extra: int) -> Element:
        pad = (0,) * extra
        return {m + pad: c for m, c in a.items()}

    def hom(self, target: "FreeDGAlgebra", images: Mapping[str, Element]) -> Callable[[Element], Element]:
        """Graded algebra map sending each generator to ``images[name]`` (default: same-named generator)."""
        imgs = []
        for g in self.gens:
            if g.name in images:
                imgs.append(target.element(images[g.name]))
            else:
                imgs.append(target.gen(g.name))

        @lru_cache(maxsize=None)
        def on_mono(m: Monomial):
            out = target.one()
            for i, e in enumerate(m):
                for _ in range(e):
                    out = target.mul(out, imgs[i])
            return out

        def apply(a: Element) -> Element:
            out: Element = {}
            for m, c in a.items():
                for mm, cc in on_mono(m).items():
                    _add_into(out, mm, c * cc)
            return out

        return apply

    # -- display ------------------------------------------------------
    def format(self, a: Element) -> str:
        if not a:
            return "0"
        parts = []
        for m in sorted(a, reverse=True):
            c = a[m]
            factors = []
            for i, e in enumerate(m):
                if e == 1:
                    factors.append(self.gens[i].name)
                elif e > 1:
                    factors.append(f"{self.gens[i].name}^{e}")
            mono = "*".join(factors)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        gens = ", ".join(f"{g.name}({g.hdeg},{g.ext};w{g.weight})" for g in self.gens)
        return f"FreeDGAlgebra<{gens}>"


class Derivation:
    """Linear map determined by its values on generators via the signed Leibniz rule.

    For parity 1 this is ``D(mn) = D(m) n + (-1)^{|m|} m D(n)``; for parity 0
    no sign appears.  Values must be homogeneous of total degree
    ``|g| + shift`` and of the same weight as ``g``.
    """

    def __init__(self, alg: FreeDGAlgebra, values: Mapping[str, Element], parity: int = 1,
                 shift: Optional[int] = None, check: bool = True):
        self.alg = alg
        self.parity = parity % 2
        self.shift = (1 if self.parity else 0) if shift is None else shift
        if self.shift % 2 != self.parity:
            raise ValueError("derivation shift and parity disagree")
        vals: List[Element] = []
        for g in alg.gens:
            v = alg.element(values.get(g.name, {}))
            if check:
                for m in v:
                    if alg.mono_weight(m) != g.weight or alg.mono_degree(m) != g.degree + self.shift:
                        raise DegreeMismatch(
                            f"value on {g.name} has term {alg.format({m: v[m]})} of degree "
                            f"{alg.mono_degree(m)} weight {alg.mono_weight(m)}; expected degree "
                            f"{g.degree + self.shift} weight {g.weight}"
                        )
            vals.append(v)
        self.values = tuple(vals)
        self._cache: Dict[Monomial, Element] = {}

    def on_monomial(self, m: Monomial) -> Element:
        hit = self._cache.get(m)
        if hit is not None:
            return hit
        alg = self.alg
        out: Element = {}
        prefix = [0] * alg.ngens
        prefix_deg = 0
        for i, e in enumerate(m):
            if not e:
                continue
            val = self.values[i]
            if val:
                # D(g^e) = e g^(e-1) D(g); odd generators only occur with e = 1
                rest = list(prefix)
                rest[i] = e - 1
                left = {tuple(rest): Fraction(e)}
                suffix = [0] * alg.ngens
                suffix[i + 1:] = m[i + 1:]
                sign = -1 if (self.parity and prefix_deg % 2) else 1
                term = alg.mul(alg.mul(left, val), {tuple(suffix): Fraction(sign)})
                for mm, c in term.items():
                    _add_into(out, mm, c)
            prefix[i] = e
            prefix_deg += e * alg._deg[i]
        self._cache[m] = out
        return out

    def __call__(self, a: Element) -> Element:
        out: Element = {}
        for m, c in a.items():
            for mm, cc in self.on_monomial(m).items():
                _add_into(out, mm, c * cc)
        return out


def multiply(alg: FreeDGAlgebra, a: Element, b: Element) -> Element:
    return alg.mul(a, b)


def extend_derivation(alg: FreeDGAlgebra, values: Mapping[str, Element], parity="odd", shift=None) -> Derivation:
    """Unique derivation with the given generator values (parity ``"odd"`` or ``"even"``)."""
    p = {"odd": 1, "even": 0}.get(parity, parity)
    return Derivation(alg, values, parity=p, shift=shift)


def check_square_zero(alg: FreeDGAlgebra, derivation: Optional[Derivation] = None) -> Optional[str]:
    """Return None if d(d(g)) = 0 for all generators, else the first failing generator name.

    Checking generators suffices because d^2 = [d, d]/2 is itself a derivation.
    """
    d = derivation or alg.differential
    for i, g in enumerate(alg.gens):
        if d(d.values[i]):
            return g.name
    return None


def _all_monomials(alg: FreeDGAlgebra, weight: int) -> List[Monomial]:
    hit = alg._basis_cache.get(weight)
    if hit is not None:
        return hit
    n = alg.ngens
    wts = alg._wt
    odd = alg._odd
    out: List[Monomial] = []
    cur = [0] * n

    def rec(i: int, remaining: int):
        if i == n:
            if remaining == 0:
                out.append(tuple(cur))
            return
        w = wts[i]
        top = 1 if odd[i] else remaining // w
        for e in range(min(top, remaining // w), -1, -1):
            cur[i] = e
            rec(i + 1, remaining - e * w)
        cur[i] = 0

    if weight >= 0:
        rec(0, weight)
    alg._basis_cache[weight] = out
    return out


def weight_basis(alg: FreeDGAlgebra, weight: int, degree: Optional[int] = None, *,
                 hdeg: Optional[int] = None, ext: Optional[int] = None) -> List[Monomial]:
    """Monomials of the given weight, filtered by total degree / hdeg / ext.

    Ordered lexicographically by exponent vector, highest first, so that for
    ``Q[x, y]`` in weight 2 the order is ``x^2, xy, y^2``.
    """
    out = []
    for m in _all_monomials(alg, weight):
        if degree is not None and alg.mono_degree(m) != degree:
            continue
        if hdeg is not None and alg.mono_hdeg(m) != hdeg:
            continue
        if ext is not None and alg.mono_ext(m) != ext:
            continue
        out.append(m)
    return out


@dataclass
class ComplexSlice:
    """Finite piece of a cochain complex: bases per degree and the maps degree -> degree + 1."""

    weight: int
    lo: int
    hi: int
    bases: Dict[int, List] = field(default_factory=dict)
    matrices: Dict[int, ExactMatrix] = field(default_factory=dict)

    def dim(self, g: int) -> int:
        return len(self.bases.get(g, ()))

    def matrix(self, g: int) -> ExactMatrix:
        """Matrix of the map out of degree g (zero map outside the stored range)."""
        if g in self.matrices:
            return self.matrices[g]
        return ExactMatrix.zero(self.dim(g + 1), self.dim(g))

    def cohomology(self, g: int) -> int:
        from .exactlin import cohomology_dim

        if not (self.lo < g < self.hi) and not (g == self.lo and self.dim(g - 1) == 0) and not (
            g == self.hi and self.dim(g + 1) == 0
        ):
            raise ValueError(f"degree {g} needs neighbours inside [{self.lo}, {self.hi}]")
        return cohomology_dim(self.matrix(g - 1), self.matrix(g))

    def check_square_zero(self) -> None:
        for g in range(self.lo, self.hi - 1):
            if not (self.matrix(g + 1) @ self.matrix(g)).is_zero():
                raise CompositeNotZero(f"consecutive maps at degree {g} (weight {self.weight}) do not compose to zero")


def slice_complex(alg: FreeDGAlgebra, weight: int, lo: int, hi: int, *, grading: str = "degree",
                  derivation: Optional[Derivation] = None, **fixed) -> ComplexSlice:
    """Weight-``weight`` slice of ``alg`` in grading values ``lo..hi``.

    ``grading`` is ``"degree"`` (total), ``"hdeg"`` or ``"ext"``; further
    keyword filters (e.g. ``hdeg=-1``) pin the other gradings.  The
    differential must raise the chosen grading by one and preserve the
    pinned ones.
    """
    if lo > hi:
        raise ValueError("empty degree range")
    d = derivation or alg.differential
    if grading not in ("degree", "hdeg", "ext"):
        raise ValueError(f"unknown grading {grading!r}")
    sl = ComplexSlice(weight=weight, lo=lo, hi=hi)
    index: Dict[int, Dict[Monomial, int]] = {}
    for g in range(lo, hi + 1):
        basis = weight_basis(alg, weight, **{grading: g}, **fixed)
        sl.bases[g] = basis
        index[g] = {m: i for i, m in enumerate(basis)}
    for g in range(lo, hi):
        src, tgt = sl.bases[g], index[g + 1]
        entries = {}
        for j, m in enumerate(src):
            for mm, c in d.on_monomial(m).items():
                i = tgt.get(mm)
                if i is None:
                    raise DegreeMismatch(f"differential leaves the slice: {alg.format({m: 1})} -> {alg.format({mm: c})}")
                entries[(i, j)] = c
        sl.matrices[g] = ExactMatrix(len(sl.bases[g + 1]), len(src), entries)
    sl.check_square_zero()
    return sl


def exterior_algebra(base: FreeDGAlgebra, module_gens: Sequence[Tuple[Generator, Mapping[str, Element]]],
                     relations: Iterable = ()) -> FreeDGAlgebra:
    """Exterior algebra over ``base`` of the free DG module on ``module_gens``.

    Each module generator ``f`` of degree ``g`` with ``d(f) = sum a_j f_j``
    becomes an algebra generator of bidegree ``(g, -1)`` with differential
    ``sum a_j e_j`` (coefficients to the left).  The exterior degree ``j``
    piece is the ``ext = -j`` part.
    """
    if list(relations):
        raise NotFree("exterior_algebra needs a free module; relations were supplied")
    new = []
    for f, _ in module_gens:
        if f.ext != 0:
            raise DegreeMismatch(f"module generator {f.name} already carries an exterior tag")
        new.append(Generator(f.name, hdeg=f.hdeg, weight=f.weight, ext=-1, kind="algebra"))
    wide_n = base.ngens + len(new)
    names = [g.name for g in new]
    proto = FreeDGAlgebra(tuple(base.gens) + tuple(new), None, check=False)
    diff = {g.name: proto.embed_into_wider(v, len(new)) for g, v in zip(base.gens, base._diff_values)}
    for (f, dval), e in zip(module_gens, new):
        total: Element = {}
        for target, coef in dval.items():
            if target not in names:
                raise KeyError(f"differential of {f.name} mentions unknown module generator {target}")
            c = proto.embed_into_wider(base.element(coef), len(new))
            for m, v in proto.mul(c, proto.gen(target)).items():
                _add_into(total, m, v)
        diff[e.name] = total
    out = FreeDGAlgebra(proto.gens, diff)
    bad = check_square_zero(out)
    if bad is not None:
        raise CompositeNotZero(f"module differential does not square to zero at {bad}")
    assert out.ngens == wide_n
    return out
