"""Lattice arithmetic for a plumbing graph.

Vectors live in L' (the dual lattice) and are written in the basis E_v of
L, so their coordinates are rationals whose denominators divide det(A).
The finite group H = L'/L is realized through the Smith normal form of A.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import floor, prod
from typing import Dict, Iterable, Iterator, List, Mapping, Sequence, Tuple

from . import exact
from .graph_core import PlumbingError, PlumbingGraph, delete_end_vertex

HClass = Tuple[int, ...]


class LatticeError(ValueError):
    pass


@dataclass(frozen=True)
class LatticeVector:
    """Exact vector with rational coordinates indexed by vertex ids."""

    ids: Tuple[int, ...]
    coords: Tuple[Fraction, ...]

    @classmethod
    def from_map(cls, coords: Mapping[int, object]) -> "LatticeVector":
        ids = tuple(sorted(coords))
        return cls(ids, tuple(Fraction(coords[v]) for v in ids))

    @classmethod
    def zero(cls, ids: Sequence[int]) -> "LatticeVector":
        ids = tuple(sorted(ids))
        return cls(ids, (Fraction(0),) * len(ids))

    @classmethod
    def parse(cls, text: str) -> "LatticeVector":
        """Inverse of ``str``: ``v1:1/2,v3:-2/1``."""
        coords = {}
        for item in text.split(","):
            item = item.strip()
            if not item:
                continue
            key, _, value = item.partition(":")
            if not key.startswith("v") or not value:
                raise LatticeError(f"malformed coordinate {item!r}")
            coords[int(key[1:])] = Fraction(value)
        return cls.from_map(coords)

    def __getitem__(self, v: int) -> Fraction:
        return self.coords[self.ids.index(v)]

    def as_dict(self) -> Dict[int, Fraction]:
        return dict(zip(self.ids, self.coords))

    def _check(self, other: "LatticeVector") -> None:
        if self.ids != other.ids:
            raise LatticeError("vectors live on different vertex sets")

    def __add__(self, other: "LatticeVector") -> "LatticeVector":
        self._check(other)
        return LatticeVector(self.ids, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "LatticeVector") -> "LatticeVector":
        self._check(other)
        return LatticeVector(self.ids, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "LatticeVector":
        return LatticeVector(self.ids, tuple(-a for a in self.coords))

    def __mul__(self, k) -> "LatticeVector":
        return LatticeVector(self.ids, tuple(a * k for a in self.coords))

    __rmul__ = __mul__

    def __str__(self) -> str:
        return ",".join(f"v{v}:{c.numerator}/{c.denominator}" for v, c in zip(self.ids, self.coords))

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coords)


@dataclass(frozen=True)
class SmithData:
    """``U A V = D`` with the invariant factors of A on the diagonal of D."""

    U: Tuple[Tuple[int, ...], ...]
    D: Tuple[int, ...]
    V: Tuple[Tuple[int, ...], ...]
    positions: Tuple[int, ...]  # diagonal slots with d_i > 1
    moduli: Tuple[int, ...]     # the nontrivial invariant factors


# ---------------------------------------------------------------------------
# basic vectors


def e_vector(g: PlumbingGraph, v: int) -> LatticeVector:
    return LatticeVector(g.ids, tuple(Fraction(int(w == v)) for w in g.ids))


def dual_vector(g: PlumbingGraph, v: int) -> LatticeVector:
    """E*_v, characterized by (E*_v, E_w) = -delta_vw."""
    return LatticeVector(g.ids, g.data.dual(v))


def canonical_class(g: PlumbingGraph) -> LatticeVector:
    return LatticeVector(g.ids, g.data.K)


def vector(g: PlumbingGraph, coords: Mapping[int, object]) -> LatticeVector:
    """Vector on ``g`` from a partial map; missing coordinates are 0."""
    unknown = set(coords) - set(g.ids)
    if unknown:
        raise LatticeError(f"unknown vertices {sorted(unknown)}")
    return LatticeVector(g.ids, tuple(Fraction(coords.get(v, 0)) for v in g.ids))


def apply_A(g: PlumbingGraph, x: LatticeVector) -> List[Fraction]:
    """A x; its v-th entry is -(x, E_v)."""
    return exact.matvec(g.data.A, x.coords)


def form(g: PlumbingGraph, x: LatticeVector, y: LatticeVector) -> Fraction:
    """Intersection form (x, y) = -x^T A y."""
    return -sum(a * b for a, b in zip(x.coords, apply_A(g, y)))


def square(g: PlumbingGraph, x: LatticeVector) -> Fraction:
    return form(g, x, x)


def in_dual_lattice(g: PlumbingGraph, x: LatticeVector) -> bool:
    return all(c.denominator == 1 for c in apply_A(g, x))


# ---------------------------------------------------------------------------
# the group H


@lru_cache(maxsize=None)
def smith_data(g: PlumbingGraph) -> SmithData:
    U, D, V = exact.smith_normal_form(g.data.A)
    diag = tuple(D[i][i] for i in range(len(D)))
    positions = tuple(i for i, d in enumerate(diag) if d > 1)
    return SmithData(tuple(map(tuple, U)), diag, tuple(map(tuple, V)),
                     positions, tuple(diag[i] for i in positions))


def group_moduli(g: PlumbingGraph) -> Tuple[int, ...]:
    return smith_data(g).moduli


def group_order(g: PlumbingGraph) -> int:
    return prod(group_moduli(g))


def classes(g: PlumbingGraph) -> List[HClass]:
    """All elements of H in lexicographic order."""
    return [tuple(c) for c in product(*(range(m) for m in group_moduli(g)))]


def zero_class(g: PlumbingGraph) -> HClass:
    return (0,) * len(group_moduli(g))


def add_classes(moduli: Sequence[int], a: HClass, b: HClass) -> HClass:
    return tuple((x + y) % m for x, y, m in zip(a, b, moduli))


def neg_class(moduli: Sequence[int], a: HClass) -> HClass:
    return tuple((-x) % m for x, m in zip(a, moduli))


def scale_class(moduli: Sequence[int], a: HClass, k: int) -> HClass:
    return tuple((k * x) % m for x, m in zip(a, moduli))


def check_class(g: PlumbingGraph, h: Iterable[int]) -> HClass:
    """Validate and normalize a class given in Smith coordinates."""
    moduli = group_moduli(g)
    h = tuple(int(c) for c in h)
    if not moduli and h in ((), (0,)):
        return ()
    if len(h) != len(moduli):
        raise LatticeError(f"class {h} needs {len(moduli)} coordinates (moduli {moduli})")
    if any(not 0 <= c < m for c, m in zip(h, moduli)):
        raise LatticeError(f"class {h} out of range for moduli {moduli}")
    return h


def class_of_integer_image(g: PlumbingGraph, c: Sequence[int]) -> HClass:
    """Class of the element whose image under A is the integer vector c."""
    sd = smith_data(g)
    uc = exact.matvec(sd.U, c)
    return tuple(int(uc[i]) % sd.D[i] for i in sd.positions)


def class_of(g: PlumbingGraph, x: LatticeVector) -> HClass:
    c = apply_A(g, x)
    if any(v.denominator != 1 for v in c):
        raise LatticeError(f"{x} is not in the dual lattice")
    return class_of_integer_image(g, [int(v) for v in c])


@lru_cache(maxsize=None)
def _unimodular_inverse(g: PlumbingGraph) -> Tuple[Tuple[int, ...], ...]:
    inv = exact.inverse(smith_data(g).U)
    return tuple(tuple(int(x) for x in row) for row in inv)


def any_preimage(g: PlumbingGraph, h: HClass) -> LatticeVector:
    """Some element of L' in the class h."""
    sd = smith_data(g)
    h = check_class(g, h)
    e = [0] * len(g)
    for pos, c in zip(sd.positions, h):
        e[pos] = c
    c = exact.matvec(_unimodular_inverse(g), e)
    x = exact.matvec(g.data.A_inv, c)
    return LatticeVector(g.ids, tuple(x))


def rep_r(g: PlumbingGraph, h: HClass) -> LatticeVector:
    """The representative of h with all coordinates in [0, 1)."""
    x = any_preimage(g, h)
    return LatticeVector(g.ids, tuple(c - floor(c) for c in x.coords))


def rep_s(g: PlumbingGraph, h: HClass) -> LatticeVector:
    """Minimal element of the Lipman cone in the class h.

    Laufer-type iteration: starting from r_h, repeatedly add E_v for the
    smallest id v with (x, E_v) > 0.
    """
    x = list(rep_r(g, h).coords)
    A = g.data.A
    cap = 10 * g.data.det * len(g) * max(1, max(abs(e) for e in g.euler.values()))
    for _ in range(cap + 1):
        Ax = exact.matvec(A, x)
        bad = next((i for i, c in enumerate(Ax) if c < 0), None)
        if bad is None:
            return LatticeVector(g.ids, tuple(x))
        x[bad] += 1
    raise LatticeError(f"minimal representative iteration did not stop within {cap} steps")


# ---------------------------------------------------------------------------
# order and cones


def leq(a: LatticeVector, b: LatticeVector) -> bool:
    a._check(b)
    return all(x <= y for x, y in zip(a.coords, b.coords))


def in_lipman(g: PlumbingGraph, x: LatticeVector) -> bool:
    """(x, E_v) <= 0 for every v."""
    return all(c >= 0 for c in apply_A(g, x))


def in_lipman_interior(g: PlumbingGraph, x: LatticeVector) -> bool:
    return all(c > 0 for c in apply_A(g, x))


def node_shift(g: PlumbingGraph) -> LatticeVector:
    """Sum over vertices of (delta_v - 2) E*_v, apex of the structure subcone."""
    total = LatticeVector.zero(g.ids)
    for v in g.ids:
        k = g.degree(v) - 2
        if k:
            total = total + dual_vector(g, v) * k
    return total


def in_structure_cone(g: PlumbingGraph, x: LatticeVector) -> bool:
    """x lies in sum (delta_v - 2) E*_v + int(S')."""
    return in_lipman_interior(g, x - node_shift(g))


def in_canonical_cone(g: PlumbingGraph, x: LatticeVector) -> bool:
    """x lies in -K + int(S')."""
    return in_lipman_interior(g, x + canonical_class(g))


# ---------------------------------------------------------------------------
# projections


def project(x: LatticeVector, I: Iterable[int]) -> LatticeVector:
    I = sorted(set(I))
    if not I:
        raise LatticeError("projection onto an empty vertex set")
    return LatticeVector(tuple(I), tuple(x[v] for v in I))


def project_dual(g: PlumbingGraph, x: LatticeVector, u: int,
                 smaller: PlumbingGraph = None) -> LatticeVector:
    """The map L'(T) -> L'(T minus u) keeping E*_v for v != u and killing E*_u."""
    if g.degree(u) != 1:
        raise PlumbingError(f"vertex {u} is not an end vertex")
    if smaller is None:
        smaller = delete_end_vertex(g, u)
    c = dict(zip(g.ids, apply_A(g, x)))  # x = sum c_v E*_v
    rest = [c[v] for v in smaller.ids]
    return LatticeVector(smaller.ids, tuple(exact.matvec(smaller.data.A_inv, rest)))


def box_points(lo: LatticeVector, hi: LatticeVector) -> Iterator[LatticeVector]:
    """Vectors lo + l with l in L and lo + l <= hi."""
    ranges = [range(0, floor(b - a) + 1) for a, b in zip(lo.coords, hi.coords)]
    for steps in product(*ranges):
        yield LatticeVector(lo.ids, tuple(a + s for a, s in zip(lo.coords, steps)))
