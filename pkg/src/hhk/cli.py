"""Command-line interface: input files, commands, TSV tables and run manifests."""
from __future__ import annotations

import argparse
import hashlib
import json
import re
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import __version__
from .bar import contracting_homotopy_check, hochschild_direct_table
from .cech import (
    Chart,
    InconsistentTable,
    InfiniteSlice,
    MissingTransition,
    Overlap,
    Space,
    global_hh_smooth,
    simplicial_hochschild,
)
from .koszul import (
    GradedModule,
    InhomogeneousElement,
    Presentation,
    QuotientAlgebra,
    is_regular_up_to,
    polynomial_ring,
    zero_divisor_check,
)
from .poly import ParseError, Poly, monomial_weight, parse_polynomial
from .resolvent import BoundTooSmall, hkr_table, normal_cone_check, resolvent_independence, tate_resolvent

__all__ = ["AlgebraSpec", "InhomogeneousRelation", "parse_algebra", "parse_algebras", "parse_space",
           "parse_ring", "main"]

EXIT_OK, EXIT_INPUT, EXIT_MISMATCH, EXIT_BOUND = 0, 1, 2, 3


class InhomogeneousRelation(InhomogeneousElement):
    pass


@dataclass
class AlgebraSpec:
    name: str
    gens: List[Tuple[str, int, bool]] = field(default_factory=list)
    relations: List[Poly] = field(default_factory=list)
    module_gens: List[Tuple[str, int]] = field(default_factory=list)
    module_relations: List[Dict[Tuple[int, Tuple[int, ...]], Fraction]] = field(default_factory=list)
    field: str = "Q"

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(g for g, _, _ in self.gens)

    @property
    def weights(self) -> Tuple[int, ...]:
        return tuple(w for _, w, _ in self.gens)

    def presentation(self) -> Presentation:
        if any(inv for _, _, inv in self.gens):
            raise ParseError(f"algebra {self.name}: invertible generators are only allowed in space charts")
        if any(w < 1 for w in self.weights):
            raise ParseError(f"algebra {self.name}: generator weights must be positive")
        return Presentation(self.names, self.weights, tuple(self.relations), self.name)

    def algebra(self) -> QuotientAlgebra:
        return QuotientAlgebra(self.presentation())

    def module(self, a: QuotientAlgebra) -> GradedModule:
        if not self.module_gens:
            return a
        return GradedModule(a.pres, [w for _, w in self.module_gens], self.module_relations, name=self.name + "-module")


_WEIGHT = re.compile(r"^weight=(-?\d+)$")


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def parse_algebras(text: str, allow_charts: bool = False) -> Dict[str, AlgebraSpec]:
    """All ``algebra`` blocks of a file, by name (in file order)."""
    out: Dict[str, AlgebraSpec] = {}
    cur: Optional[AlgebraSpec] = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        words = line.split()
        head = words[0]
        if cur is None:
            if head == "algebra":
                if len(words) not in (2, 4) or (len(words) == 4 and words[2] != "over"):
                    raise ParseError("expected 'algebra <name> [over Q]'", lineno, 1)
                if len(words) == 4 and words[3] != "Q":
                    raise ParseError(f"unsupported base field {words[3]!r}; only Q is available", lineno,
                                     raw.index(words[3]) + 1)
                if words[1] in out:
                    raise ParseError(f"duplicate algebra name {words[1]!r}", lineno, 1)
                cur = AlgebraSpec(words[1])
            elif head in ("space", "chart", "overlap", "intersect", "end"):
                # space blocks are handled by parse_space
                continue
            else:
                raise ParseError(f"unexpected {head!r} outside an algebra block", lineno, 1)
            continue
        if head == "end":
            out[cur.name] = cur
            cur = None
        elif head == "gen":
            if len(words) < 3 or len(words) > 4:
                raise ParseError("expected 'gen <name> weight=<k> [invertible]'", lineno, 1)
            m = _WEIGHT.match(words[2])
            if not m:
                raise ParseError("expected weight=<integer>", lineno, raw.index(words[2]) + 1)
            inv = False
            if len(words) == 4:
                if words[3] != "invertible":
                    raise ParseError(f"unknown flag {words[3]!r}", lineno, raw.index(words[3]) + 1)
                inv = True
            if not re.match(r"^[A-Za-z_][A-Za-z0-9_]*$", words[1]):
                raise ParseError(f"bad generator name {words[1]!r}", lineno, raw.index(words[1]) + 1)
            if words[1] in cur.names or words[1] in {g for g, _ in cur.module_gens}:
                raise ParseError(f"duplicate generator name {words[1]!r}", lineno, raw.index(words[1]) + 1)
            w = int(m.group(1))
            if w == 0 or (w < 0 and not allow_charts):
                raise ParseError("generator weights must be positive", lineno, raw.index(words[2]) + 1)
            cur.gens.append((words[1], w, inv))
        elif head == "rel":
            body = line[3:].strip()
            offset = raw.index(body) if body else 0
            try:
                p = parse_polynomial(body, cur.names, line=lineno)
            except ParseError as exc:
                raise ParseError(str(exc).split(": ", 1)[-1], lineno, exc.col + offset) from None
            ws = sorted(monomial_weight(mm, cur.weights) for mm in p)
            if not p:
                raise ParseError("relation is zero", lineno, offset + 1)
            if len(set(ws)) != 1:
                raise InhomogeneousRelation(
                    f"line {lineno}: relation {len(cur.relations) + 1} ({body}) is not weight-homogeneous; "
                    f"term weights {ws}")
            cur.relations.append(p)
        elif head == "modgen":
            if len(words) != 3 or not _WEIGHT.match(words[2]):
                raise ParseError("expected 'modgen <name> weight=<k>'", lineno, 1)
            if words[1] in cur.names or words[1] in {g for g, _ in cur.module_gens}:
                raise ParseError(f"duplicate generator name {words[1]!r}", lineno, raw.index(words[1]) + 1)
            cur.module_gens.append((words[1], int(_WEIGHT.match(words[2]).group(1))))
        elif head == "modrel":
            body = line[6:].strip()
            mnames = [g for g, _ in cur.module_gens]
            n = len(cur.names)
            p = parse_polynomial(body, list(cur.names) + mnames, line=lineno)
            vec: Dict[Tuple[int, Tuple[int, ...]], Fraction] = {}
            for mono, c in p.items():
                mpart = mono[n:]
                if sum(mpart) != 1:
                    raise ParseError("module relations must be linear in module generators", lineno, 1)
                vec[(mpart.index(1), mono[:n])] = c
            ws = sorted({monomial_weight(k[1], cur.weights) + cur.module_gens[k[0]][1] for k in vec})
            if len(ws) != 1:
                raise InhomogeneousRelation(f"line {lineno}: module relation ({body}) is not weight-homogeneous; "
                                            f"term weights {ws}")
            cur.module_relations.append(vec)
        else:
            raise ParseError(f"unknown keyword {head!r}", lineno, 1)
    if cur is not None:
        raise ParseError(f"algebra {cur.name} is missing 'end'", len(text.splitlines()), 1)
    return out


def parse_algebra(text: str) -> AlgebraSpec:
    """The first algebra block of ``text``."""
    specs = parse_algebras(text)
    if not specs:
        raise ParseError("no 'algebra' block found", 1, 1)
    return next(iter(specs.values()))


def parse_ring(text: str) -> Tuple[List[str], List[int]]:
    """``Q[x,y]`` or ``Q[x:3,y:2]``."""
    m = re.fullmatch(r"\s*Q\[(.*)\]\s*", text)
    if not m:
        raise ParseError(f"expected a ring like Q[x,y], got {text!r}", 0, 1)
    names, weights = [], []
    for part in m.group(1).split(","):
        part = part.strip()
        nm, _, w = part.partition(":")
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", nm):
            raise ParseError(f"bad generator {part!r}", 0, 1)
        names.append(nm)
        weights.append(int(w) if w else 1)
    return names, weights


_FIELD = re.compile(r"d/d([A-Za-z_][A-Za-z0-9_]*)")


def _parse_frame(body: str, names: Sequence[str], lineno: int) -> Dict[str, Poly]:
    fields = {}
    text = _FIELD.sub(lambda m: "__D_" + m.group(1), body)
    placeholders = ["__D_" + nm for nm in names]
    p = parse_polynomial(text, list(names) + placeholders, allow_negative=True, line=lineno)
    n = len(names)
    for mono, c in p.items():
        fpart = mono[n:]
        if sum(fpart) != 1 or any(e < 0 for e in fpart):
            raise ParseError("frame transitions must be linear in the d/d fields", lineno, 1)
        t = names[fpart.index(1)]
        fields.setdefault(t, {})[mono[:n]] = c
    return fields


def parse_space(text: str) -> Space:
    algebras = parse_algebras(text, allow_charts=True)
    space: Optional[Space] = None
    inside = False
    triples = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        words = line.split()
        if words[0] == "algebra":
            inside = True
            continue
        if inside:
            if words[0] == "end":
                inside = False
            continue
        if words[0] == "space":
            if len(words) != 2:
                raise ParseError("expected 'space <name>'", lineno, 1)
            space = Space(words[1], [])
        elif space is None:
            raise ParseError(f"unexpected {words[0]!r} outside a space block", lineno, 1)
        elif words[0] == "chart":
            if len(words) != 2 or words[1] not in algebras:
                raise ParseError(f"chart must name an algebra defined earlier, got {line!r}", lineno, 1)
            spec = algebras[words[1]]
            if spec.relations:
                raise ParseError(f"chart {spec.name} has relations; only smooth charts are supported", lineno, 1)
            space.charts.append(Chart(spec.name, spec.names, spec.weights,
                                      frozenset(g for g, _, inv in spec.gens if inv)))
        elif words[0] == "overlap":
            m = re.fullmatch(r"overlap\s+(\d+)\s+(\d+)\s*:(.*)", line)
            if not m:
                raise ParseError("expected 'overlap <i> <j> : <subst> ; ...'", lineno, 1)
            i, j = int(m.group(1)), int(m.group(2))
            if not (i < j < len(space.charts)):
                raise ParseError(f"overlap {i} {j}: need i < j and both charts declared before", lineno, 1)
            ci, cj = space.charts[i], space.charts[j]
            subs, frames = {}, {}
            for item in m.group(3).split(";"):
                item = item.strip()
                if not item:
                    continue
                lhs, eq, rhs = item.partition("=")
                lhs = lhs.strip()
                if not eq:
                    raise ParseError(f"expected '<lhs> = <rhs>' in {item!r}", lineno, raw.find(item) + 1)
                fm = _FIELD.fullmatch(lhs)
                if fm:
                    if fm.group(1) not in cj.names:
                        raise ParseError(f"d/d{fm.group(1)}: not a generator of chart {j}", lineno, raw.find(lhs) + 1)
                    frames[fm.group(1)] = _parse_frame(rhs, ci.names, lineno)
                elif lhs in cj.names:
                    subs[lhs] = parse_polynomial(rhs, ci.names, allow_negative=True, line=lineno)
                else:
                    raise ParseError(f"{lhs!r} is not a generator of chart {j}", lineno, raw.find(lhs) + 1)
            space.overlaps[(i, j)] = Overlap(i, j, subs, frames or None)
        elif words[0] == "intersect":
            try:
                idx = tuple(sorted(int(x) for x in words[1:]))
            except ValueError:
                raise ParseError("expected 'intersect <i> <j> <k> ...'", lineno, 1) from None
            triples.append(idx)
        elif words[0] == "end":
            space.triples = triples
            return space
        else:
            raise ParseError(f"unknown keyword {words[0]!r}", lineno, 1)
    raise ParseError("no complete 'space' block found", len(text.splitlines()), 1)


# -- output -------------------------------------------------------------------

def _tsv(header: Sequence[str], rows: List[Sequence]) -> str:
    lines = ["\t".join(header)]
    for r in sorted(rows):
        lines.append("\t".join(str(x) for x in r))
    return "\n".join(lines) + "\n"


def _read(path: str) -> Tuple[str, str]:
    with open(path, "rb") as fh:
        data = fh.read()
    return data.decode("utf-8"), hashlib.sha256(data).hexdigest()


@dataclass
class _Result:
    text: str
    rows: List[Sequence]
    header: Sequence[str]
    code: int = EXIT_OK
    messages: List[str] = field(default_factory=list)


def _bounds(args) -> Dict[str, int]:
    return {k: getattr(args, k) for k in ("n_max", "j_max", "weight_max", "hdeg_min", "resolvent_weight")
            if getattr(args, k, None) is not None}


def _load_algebra(args, inputs):
    text, digest = _read(args.algebra)
    inputs[args.algebra] = digest
    spec = parse_algebra(text)
    a = spec.algebra()
    return spec, a, spec.module(a)


def _hkr(args, a, M):
    if args.hdeg_min > -args.n_max:
        raise BoundTooSmall(f"--hdeg-min {args.hdeg_min} cannot certify n <= {args.n_max}; use --hdeg-min {-args.n_max}")
    res = tate_resolvent(a, args.hdeg_min, args.resolvent_weight)
    return res, hkr_table(res, M, args.n_max, args.weight_max, j_max=args.j_max, threads=args.threads)


def cmd_direct(args, inputs) -> _Result:
    _, a, M = _load_algebra(args, inputs)
    table = hochschild_direct_table(a, M, args.n_max, args.weight_max, threads=args.threads)
    rows = [(n, w, d) for (n, w), d in table.items() if d]
    header = ("n", "weight", "dim")
    return _Result(_tsv(header, rows), rows, header)


def cmd_hkr(args, inputs) -> _Result:
    _, a, M = _load_algebra(args, inputs)
    _, t = _hkr(args, a, M)
    if args.format == "expanded":
        rows = [(i + j, w, d, i, j, i - j) for (j, i, w), d in t.entries.items() if d]
        header = ("n", "weight", "dim", "i", "j", "i_minus_j")
    else:
        rows = [(n, w, d) for (n, w), d in t.table().items() if d]
        header = ("n", "weight", "dim")
    return _Result(_tsv(header, rows), rows, header)


def cmd_crosscheck(args, inputs) -> _Result:
    _, a, M = _load_algebra(args, inputs)
    direct = hochschild_direct_table(a, M, args.n_max, args.weight_max, threads=args.threads)
    res, t = _hkr(args, a, M)
    hkr = t.table()
    keys = sorted(k for k in set(direct) | set(hkr) if direct.get(k, 0) or hkr.get(k, 0))
    rows = [(n, w, direct.get((n, w), 0), hkr.get((n, w), 0)) for n, w in keys]
    header = ("n", "weight", "direct", "hkr")
    out = _Result(_tsv(header, rows), rows, header)
    bad = [r for r in rows if r[2] != r[3]]
    out.messages.append(f"direct vs hkr: {'ok' if not bad else f'{len(bad)} mismatching rows'}")
    if M is a:
        ok, problems = resolvent_independence(a, res.hdeg_bound, args.resolvent_weight, args.n_max, args.weight_max)
        out.messages.append("resolvent independence: " + ("ok" if ok else "; ".join(problems[:3])))
        bad = bad or not ok
    nc = normal_cone_check(res, min(args.weight_max, args.resolvent_weight))
    out.messages.append("normal cone: " + ("ok" if nc.ok else "; ".join(nc.failures[:3])))
    if bad or not nc.ok:
        out.code = EXIT_MISMATCH
    return out


def cmd_koszul(args, inputs) -> _Result:
    names, weights = parse_ring(args.ring)
    R = polynomial_ring(names, weights)
    seq = [s.strip() for s in args.seq.split(",") if s.strip()]
    if not seq:
        raise ParseError("empty sequence", 0, 1)
    elems = []
    for s in seq:
        p = parse_polynomial(s, names)
        elems.append({m: c for m, c in p.items()})
    v1 = is_regular_up_to(R, elems, args.weight_max)
    v2 = zero_divisor_check(R, elems, args.weight_max)
    rows = [("koszul", str(v1)), ("zero-divisor", str(v2))]
    out = _Result("".join(f"{a}\t{b}\n" for a, b in rows), rows, ("check", "verdict"))
    if v1.regular != v2.regular:
        out.code = EXIT_MISMATCH
        out.messages.append("the two regularity tests disagree")
    return out


def cmd_global(args, inputs) -> _Result:
    text, digest = _read(args.space)
    inputs[args.space] = digest
    space = parse_space(text)
    lo = -args.weight_max
    g = global_hh_smooth(space, args.j_max, args.weight_max, lo)
    s = simplicial_hochschild(space, args.n_max, args.weight_max, lo)
    if args.format == "expanded":
        rows = [(i + j, w, d, i, j, i - j) for (i, j, w), d in g.items() if d and i + j <= args.n_max]
        header = ("n", "weight", "dim", "i", "j", "i_minus_j")
    else:
        rows = [(i + j, w, d, i, j) for (i, j, w), d in g.items() if d and i + j <= args.n_max]
        header = ("n", "weight", "dim", "i", "j")
    out = _Result(_tsv(header, rows), rows, header)
    agg: Dict[Tuple[int, int], int] = {}
    for (i, j, w), d in g.items():
        agg[(i + j, w)] = agg.get((i + j, w), 0) + d
    bad = [k for k in set(agg) | set(s) if k[0] <= args.n_max and agg.get(k, 0) != s.get(k, 0)]
    out.messages.append("simplicial vs decomposition: " + ("ok" if not bad else f"{len(bad)} mismatches"))
    if bad:
        out.code = EXIT_MISMATCH
    return out


def cmd_bar_homotopy(args, inputs) -> _Result:
    _, a, _ = _load_algebra(args, inputs)
    rep = contracting_homotopy_check(a, args.n_max, args.weight_max)
    if rep.ok:
        rows = [("pass", rep.checked)]
        out = _Result(f"pass\t{rep.checked} basis tensors\n", rows, ("result", "checked"))
    else:
        n, w, t = rep.counterexample
        rows = [("counterexample", n, w, str(t))]
        out = _Result(f"counterexample\tdegree {n}\tweight {w}\t{t}\n", rows, ("result",))
        out.code = EXIT_MISMATCH
    return out


COMMANDS = {
    "direct": cmd_direct,
    "hkr": cmd_hkr,
    "koszul": cmd_koszul,
    "global": cmd_global,
    "crosscheck": cmd_crosscheck,
    "bar-homotopy": cmd_bar_homotopy,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hhk", description="Exact Hochschild cohomology of weighted graded algebras.")
    p.add_argument("--version", action="version", version=f"hhk {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        if name in ("direct", "hkr", "crosscheck", "bar-homotopy"):
            sp.add_argument("--algebra", required=True, metavar="FILE")
        if name == "global":
            sp.add_argument("--space", required=True, metavar="FILE")
        if name == "koszul":
            sp.add_argument("--ring", required=True, help='e.g. "Q[x,y]" or "Q[x:3,y:2]"')
            sp.add_argument("--seq", required=True, help='comma-separated polynomials, e.g. "xy,x"')
        sp.add_argument("--n-max", type=int, default=3 if name == "bar-homotopy" else 4)
        sp.add_argument("--j-max", type=int, default=4)
        sp.add_argument("--weight-max", type=int, default=5 if name == "bar-homotopy" else 6)
        sp.add_argument("--hdeg-min", type=int, default=-6)
        sp.add_argument("--resolvent-weight", type=int, default=8)
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--format", choices=("tsv", "expanded"), default="tsv")
        sp.add_argument("--output", metavar="FILE")
        sp.add_argument("--manifest", metavar="FILE")
    return p


def _error(exc: BaseException) -> str:
    return f"error[{type(exc).__module__.rsplit('.', 1)[-1]}.{type(exc).__name__}]: {exc}"


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads < 1:
        print("error[cli.ValueError]: --threads must be >= 1", file=sys.stderr)
        return EXIT_INPUT
    inputs: Dict[str, str] = {}
    start = time.perf_counter()
    try:
        result = COMMANDS[args.command](args, inputs)
    except BoundTooSmall as exc:
        print(_error(exc), file=sys.stderr)
        return EXIT_BOUND
    except (ParseError, InhomogeneousElement, InconsistentTable, MissingTransition, InfiniteSlice,
            OSError, ValueError) as exc:
        print(_error(exc), file=sys.stderr)
        return EXIT_INPUT
    wall = time.perf_counter() - start
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(result.text)
    else:
        sys.stdout.write(result.text)
    for msg in result.messages:
        print(msg, file=sys.stderr)
    manifest_path = args.manifest or (args.output + ".manifest.json" if args.output else None)
    if manifest_path:
        manifest = {
            "command": args.command,
            "inputs": inputs,
            "bounds": _bounds(args),
            "format": args.format,
            "version": __version__,
            "wall_time_s": round(wall, 3),
            "exit_code": result.code,
            "columns": list(result.header),
            "table": [list(r) for r in sorted(result.rows)],
        }
        if args.command == "koszul":
            manifest["ring"], manifest["sequence"] = args.ring, args.seq
        with open(manifest_path, "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return result.code


if __name__ == "__main__":
    sys.exit(main())
