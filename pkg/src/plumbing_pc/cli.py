"""Command line front end.

Exit codes: 0 success, 1 invalid input (bad graph or options), 2 an
identity check failed.
"""
import argparse
import json
import sys
from fractions import Fraction
from math import floor
from typing import Dict, List, Optional

from . import lattice as lat
from . import polypart as PP
from . import series as S
from . import surgery as SG
from .graph_core import PlumbingError, load_graph, orbifold_graph
from .lattice import LatticeError, LatticeVector

OK, INVALID, IDENTITY_FAILED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which would collide with a failed check
    def error(self, message):
        raise UsageError(message)


def _frac(x) -> str:
    return str(Fraction(x))


def _cls(h) -> str:
    return "(" + ",".join(map(str, h)) + ")"


def _vec(x: LatticeVector) -> str:
    return str(x)


def parse_class(g, text: Optional[str]):
    if text is None:
        return None
    text = text.strip().strip("()")
    parts = [p for p in text.split(",") if p.strip()]
    try:
        return lat.check_class(g, [int(p) for p in parts])
    except ValueError as err:
        raise UsageError(f"bad class {text!r}: {err}") from None


def parse_point(g, text: str) -> LatticeVector:
    """``3`` (all coordinates) or ``v1=1/2,v3=2`` (missing ones are 0)."""
    try:
        if "=" not in text and ":" not in text:
            c = Fraction(text)
            return LatticeVector(g.ids, (c,) * len(g))
        coords: Dict[int, Fraction] = {}
        for item in text.split(","):
            key, _, value = item.replace(":", "=").partition("=")
            key = key.strip()
            if not key.startswith("v"):
                raise ValueError(f"coordinate {item!r} must look like v<id>=<p/q>")
            coords[int(key[1:])] = Fraction(value.strip())
        return lat.vector(g, coords)
    except (ValueError, ZeroDivisionError) as err:
        raise UsageError(f"bad point {text!r}: {err}") from None


# ---------------------------------------------------------------------------
# subcommands; each returns (exit code, payload, text lines)


def cmd_validate(g, args):
    payload = {"vertices": len(g), "det": g.data.det, "valid": True}
    return OK, payload, [f"ok: {len(g)} vertices, det {g.data.det}"]


def cmd_invariants(g, args):
    d = g.data
    orb = orbifold_graph(g)
    payload = {
        "ids": list(g.ids),
        "A": [list(r) for r in d.A],
        "A_inv": [[_frac(x) for x in r] for r in d.A_inv],
        "det": d.det,
        "K": _vec(lat.canonical_class(g)),
        "K_squared": _frac(lat.square(g, lat.canonical_class(g))),
        "dual_basis": {str(v): _vec(lat.dual_vector(g, v)) for v in g.ids},
        "group_moduli": list(lat.group_moduli(g)),
        "nodes": list(g.nodes),
        "ends": list(g.ends),
        "orbifold_edges": [list(e) for e in orb.edges],
    }
    lines = [f"ids: {' '.join(map(str, g.ids))}", "A:"]
    lines += ["  " + " ".join(f"{x:>4}" for x in r) for r in d.A]
    lines += ["A_inv:"] + ["  " + " ".join(f"{_frac(x):>8}" for x in r) for r in d.A_inv]
    lines += [f"det: {d.det}", f"K: {payload['K']}", f"K^2: {payload['K_squared']}"]
    lines += [f"E*_{v}: {payload['dual_basis'][str(v)]}" for v in g.ids]
    lines += [f"H: {' x '.join(f'Z/{m}' for m in payload['group_moduli']) or 'trivial'}",
              f"nodes: {' '.join(map(str, g.nodes)) or '-'}",
              f"ends: {' '.join(map(str, g.ends)) or '-'}",
              "orbifold edges: " + (" ".join(f"{a}-{b}" for a, b in orb.edges) or "-")]
    return OK, payload, lines


def cmd_expand(g, args):
    bound = parse_point(g, args.bound)
    if any(c < 0 for c in bound.coords):
        raise UsageError("bound must be nonnegative")
    f = S.build_fH(g)
    den = f.den
    # exponents live on the 1/den grid; round the bound down onto it
    box = S.taylor_box(f, tuple(floor(c * den) for c in bound.coords))
    rows = []
    for e in sorted(box.coefficients):
        exps = LatticeVector(g.ids, tuple(Fraction(x, den) for x in e))
        rows.append((str(exps), str(box.coefficients[e])))
    payload = {"bound": str(bound), "terms": [{"exponent": a, "coefficient": b} for a, b in rows]}
    return OK, payload, [f"{a} {b}" for a, b in rows]


def cmd_count(g, args):
    x = parse_point(g, args.x)
    if not lat.in_dual_lattice(g, x):
        raise UsageError(f"{x} is not in the dual lattice")
    h = parse_class(g, args.cls)
    if h is None:
        h = lat.class_of(g, x)
    value = S.count_Q(g, h, x)
    return OK, {"x": str(x), "class": list(h), "count": value}, [str(value)]


def _classes(g, args):
    h = parse_class(g, getattr(args, "cls", None))
    return [h] if h is not None else lat.classes(g)


def cmd_polypart(g, args):
    if not g.nodes:
        raise UsageError("graph has no node; the polynomial part lives on node variables")
    out, lines = [], []
    for h in _classes(g, args):
        P = PP.polypart_multi(g, h)
        value = sum(P.terms.values())
        out.append({"class": list(h), "polynomial": str(P), "value_at_one": value})
        lines.append(f"h={_cls(h)} P={P}")
        lines.append(f"h={_cls(h)} P(1)={value}")
    return OK, {"variables": list(g.nodes), "parts": out}, lines


def cmd_sw(g, args):
    rows, lines = [], []
    for h in _classes(g, args):
        pc = PP.periodic_constant(g, h, args.mode)
        sw = PP.sw_invariant(g, h, args.mode)
        rows.append({"class": list(h), "pc": _frac(pc), "sw": _frac(sw)})
        lines.append(f"h={_cls(h)} pc={_frac(pc)} sw={_frac(sw)}")
    return OK, {"mode": args.mode or PP.default_mode(g), "rows": rows}, lines


def cmd_structure_check(g, args):
    if args.samples < 1:
        raise UsageError("--samples must be positive")
    if args.mode == "orbifold" and not g.nodes:
        raise UsageError("orbifold mode needs a node")
    apex = lat.node_shift(g)
    rows, lines, code = [], [], OK
    for h in _classes(g, args):
        for x in S.deep_points(g, h, args.samples, apex):
            r = S.structure_counts(g, h, x, args.mode)
            status = "pass" if r.equal else "FAIL"
            code = code if r.equal else IDENTITY_FAILED
            rows.append({"class": list(h), "x": str(x), "lhs": r.lhs, "rhs": r.rhs, "status": status})
            lines.append(f"h={_cls(h)} x={x} lhs={r.lhs} rhs={r.rhs} {status}")
    return code, {"mode": args.mode, "rows": rows}, lines


def cmd_surgery_check(g, args):
    if args.vertex not in g.euler or len(g) == 1 or g.degree(args.vertex) != 1:
        raise UsageError(f"vertex {args.vertex} is not an end vertex")
    report = SG.check_all(g, args.vertex, count=args.samples)
    rows, lines = [], [f"{'class':<10} {'identity':<28} {'lhs':>12} {'rhs':>12} status"]
    for r in report.rows:
        status = "pass" if r.passed else "FAIL"
        rows.append({"class": list(r.h), "identity": r.identity, "lhs": _frac(r.lhs),
                     "rhs": _frac(r.rhs), "status": status})
        lines.append(f"{_cls(r.h):<10} {r.identity:<28} {_frac(r.lhs):>12} {_frac(r.rhs):>12} {status}")
    code = OK if report.passed else IDENTITY_FAILED
    return code, {"vertex": args.vertex, "rows": rows}, lines


COMMANDS = {
    "validate": cmd_validate,
    "invariants": cmd_invariants,
    "expand": cmd_expand,
    "count": cmd_count,
    "polypart": cmd_polypart,
    "sw": cmd_sw,
    "structure-check": cmd_structure_check,
    "surgery-check": cmd_surgery_check,
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="plumbing-pc", description="Invariants of negative definite plumbing trees.")
    sub = p.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True

    def add(name, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("graph", help="graph file (vertex/edge lines)")
        sp.add_argument("--format", choices=("text", "json"), default="text")
        return sp

    add("validate", "check the tree and definiteness conditions")
    add("invariants", "intersection data, canonical class, group, orbifold graph")
    sp = add("expand", "Taylor coefficients of the series in a box")
    sp.add_argument("--bound", required=True, help="p/q for every vertex or v<id>=<p/q>,...")
    sp = add("count", "counting function at a point")
    sp.add_argument("--x", required=True, help="p/q for every vertex or v<id>=<p/q>,...")
    sp.add_argument("--class", dest="cls", help="class in Smith coordinates, c1,c2,...")
    sp = add("polypart", "polynomial part on the node variables")
    sp.add_argument("--class", dest="cls")
    sp = add("sw", "periodic constants and sw invariants for every class")
    sp.add_argument("--class", dest="cls")
    sp.add_argument("--mode", choices=PP.MODES, default=None)
    sp = add("structure-check", "compare the counting function with its edge assembly")
    sp.add_argument("--mode", choices=("full", "orbifold"), default="full")
    sp.add_argument("--samples", type=int, default=10)
    sp.add_argument("--class", dest="cls")
    sp = add("surgery-check", "surgery identities at an end vertex")
    sp.add_argument("--vertex", type=int, required=True)
    sp.add_argument("--samples", type=int, default=5)
    return p


def _emit(payload, lines, fmt, stream) -> None:
    if fmt == "json":
        stream.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    else:
        for line in lines:
            stream.write(line + "\n")


def run(argv: Optional[List[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError as err:
        stderr.write(f"error: {err}\n")
        return INVALID
    try:
        g = load_graph(args.graph)
    except OSError as err:
        stderr.write(f"error: cannot read {args.graph}: {err.strerror}\n")
        return INVALID
    except PlumbingError as err:
        stderr.write(f"error: {err}\n")
        if args.format == "json":
            _emit({"valid": False, "error": str(err)}, [], "json", stdout)
        return INVALID
    try:
        code, payload, lines = COMMANDS[args.command](g, args)
    except (UsageError, LatticeError, PlumbingError, SG.SurgeryError) as err:
        stderr.write(f"error: {err}\n")
        return INVALID
    except (S.SeriesError, PP.FitError) as err:
        stderr.write(f"error: {err}\n")
        return IDENTITY_FAILED
    _emit(payload, lines, args.format, stdout)
    return code


def main() -> None:
    sys.exit(run())
