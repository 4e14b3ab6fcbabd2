"""Checks of the end-vertex surgery identities.

Each identity is evaluated twice: once on the full tree and once on the
tree with the end vertex u removed plus a one-variable correction in t_u.
All comparisons are exact.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import List, Optional, Sequence

from . import lattice as lat
from . import polypart as PP
from .graph_core import PlumbingGraph, delete_end_vertex
from .lattice import HClass, LatticeVector

DEFAULT_GROUP_CAP = 200


class SurgeryError(ValueError):
    pass


@dataclass(frozen=True)
class IdentityRow:
    h: HClass
    identity: str
    lhs: Fraction
    rhs: Fraction
    point: Optional[LatticeVector] = None

    @property
    def passed(self) -> bool:
        return self.lhs == self.rhs


@dataclass
class SurgeryReport:
    vertex: int
    rows: List[IdentityRow] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def failures(self) -> List[IdentityRow]:
        return [r for r in self.rows if not r.passed]

    def add(self, *args, **kw) -> None:
        self.rows.append(IdentityRow(*args, **kw))


def _smaller(g: PlumbingGraph, u: int) -> PlumbingGraph:
    if u not in g.euler:
        raise SurgeryError(f"unknown vertex {u}")
    if len(g) == 1 or g.degree(u) != 1:
        raise SurgeryError(f"vertex {u} is not an end vertex")
    return delete_end_vertex(g, u)


def default_samples(g: PlumbingGraph, u: int, h: HClass, count: int = 5) -> List[LatticeVector]:
    """Points of class h deep in the cone of g, differing by E_v with v != u.

    Those steps commute with the projection that forgets u, so all samples
    land in one coset downstairs as well.
    """
    apex = lat.node_shift(g)
    x0 = PP._anchor(g, lat.rep_r(g, h), 1, apex, [count + 2] * len(g))
    others = [v for v in g.ids if v != u]
    out: List[LatticeVector] = []
    for total in range(count + 1):
        for combo in combinations_with_replacement(others, total):
            x = x0
            for v in combo:
                x = x + lat.e_vector(g, v)
            if lat.in_structure_cone(g, x):
                out.append(x)
            if len(out) == count:
                return out
    return out


def check_quasipoly_recursion(g: PlumbingGraph, u: int,
                              samples: Optional[Sequence[LatticeVector]] = None,
                              count: int = 5) -> SurgeryReport:
    """L^T_[x](x) = L^{T-u}_[pi x](pi x) + L^u_[x](x_u) at sample points."""
    small = _smaller(g, u)
    if samples is None:
        samples = [x for h in lat.classes(g) for x in default_samples(g, u, h, count)]
    report = SurgeryReport(u)
    for x in samples:
        h = lat.class_of(g, x)
        y = lat.project_dual(g, x, u, small)
        lhs = PP.fit_quasipolynomial(g, h)(x)
        rhs = PP.fit_quasipolynomial(small, lat.class_of(small, y))(y)
        rhs += PP.fit_one_variable(g, u, h)(x[u])
        report.add(h, "quasipolynomial recursion", lhs, rhs, x)
    return report


def check_bn_formula(g: PlumbingGraph, u: int, cap: int = DEFAULT_GROUP_CAP) -> SurgeryReport:
    """Surgery formula for sw with the one-variable pc taken from the 1V split."""
    small = _smaller(g, u)
    if lat.group_order(g) > cap:
        raise SurgeryError(f"|H| = {lat.group_order(g)} exceeds the cap {cap}")
    report = SurgeryReport(u)
    for h in lat.classes(g):
        r = lat.rep_r(g, h)
        y = lat.project_dual(g, r, u, small)
        lhs = PP.sw_invariant(g, h) + PP.normalization(g, r)
        rhs = PP.sw_invariant(small, lat.class_of(small, y)) + PP.normalization(small, y)
        rhs -= PP.pc_one_variable(g, h, u)
        report.add(h, "surgery formula", lhs, rhs, r)
    return report


def check_pc_recursion_s(g: PlumbingGraph, u: int) -> SurgeryReport:
    """s_h-normalized recursion, plus the projection property of s_h."""
    small = _smaller(g, u)
    report = SurgeryReport(u)
    for h in lat.classes(g):
        s = lat.rep_s(g, h)
        y = lat.project_dual(g, s, u, small)
        hb = lat.class_of(small, y)
        s_small = lat.rep_s(small, hb)
        report.add(h, "projection of s_h", Fraction(int(y == s_small)), Fraction(1), s)
        lhs = PP.fit_quasipolynomial(g, h)(s)
        rhs = PP.fit_quasipolynomial(small, hb)(y) + PP.fit_one_variable(g, u, h)(s[u])
        report.add(h, "s-normalized recursion", lhs, rhs, s)
    return report


def check_all(g: PlumbingGraph, u: int, count: int = 5) -> SurgeryReport:
    report = SurgeryReport(u)
    for part in (check_quasipoly_recursion(g, u, count=count), check_bn_formula(g, u),
                 check_pc_recursion_s(g, u)):
        report.rows += part.rows
    return report
