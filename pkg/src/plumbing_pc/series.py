"""Group-ring Laurent polynomials, rational functions and counting functions.

Exponents are stored as integer numerator vectors over a common
denominator ``den`` (for a plumbing graph, ``den = det A``), so hashing and
comparison stay exact without rational normalization.  Coefficients live in
Z[H]; internally a polynomial is a map ``(exponent, class) -> int``.

The counting functions enumerate the Taylor expansion of the generating
function directly.  The innermost geometric factor is summed in closed form
and the remaining ones are expanded with numpy, which keeps the brute force
oracle usable on trees with ten or so vertices.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from math import prod
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from . import lattice as lat
from .graph_core import PlumbingGraph, is_subtree, subtree_degree
from .lattice import HClass, LatticeVector

Exponent = Tuple[int, ...]
Factor = Tuple[HClass, Exponent]  # (g, alpha) meaning 1 - g t^alpha


class SeriesError(ValueError):
    pass


# ---------------------------------------------------------------------------
# group ring


def _add(moduli, a, b):
    return tuple((x + y) % m for x, y, m in zip(a, b, moduli))


def _scale(moduli, a, k):
    return tuple((k * x) % m for x, m in zip(a, moduli))


class GroupRingElement:
    """Finitely supported integer valued function on H."""

    __slots__ = ("moduli", "terms")

    def __init__(self, moduli: Sequence[int], terms: Mapping[HClass, int] = ()):
        self.moduli = tuple(moduli)
        self.terms = {h: c for h, c in dict(terms).items() if c}

    def __getitem__(self, h: HClass) -> int:
        return self.terms.get(tuple(h), 0)

    def __add__(self, other):
        out = dict(self.terms)
        for h, c in other.terms.items():
            out[h] = out.get(h, 0) + c
        return GroupRingElement(self.moduli, out)

    def __neg__(self):
        return GroupRingElement(self.moduli, {h: -c for h, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return GroupRingElement(self.moduli, {h: c * other for h, c in self.terms.items()})
        out: Dict[HClass, int] = {}
        for a, c in self.terms.items():
            for b, e in other.terms.items():
                k = _add(self.moduli, a, b)
                out[k] = out.get(k, 0) + c * e
        return GroupRingElement(self.moduli, out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, int):
            return self.terms == ({(0,) * len(self.moduli): other} if other else {})
        return isinstance(other, GroupRingElement) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def __str__(self) -> str:
        inner = ", ".join(f"({','.join(map(str, h))}): {c}" for h, c in sorted(self.terms.items()))
        return "{" + inner + "}"

    __repr__ = __str__


# ---------------------------------------------------------------------------
# Laurent polynomials


class LaurentPoly:
    """Sparse Laurent polynomial in ``variables`` with Z[H] coefficients.

    ``terms`` maps ``(exponent_numerators, class)`` to a nonzero integer; the
    actual exponent of a term is ``exponent_numerators / den``.
    """

    __slots__ = ("variables", "den", "moduli", "terms")

    def __init__(self, variables: Sequence[int], den: int, moduli: Sequence[int] = (),
                 terms: Mapping[Tuple[Exponent, HClass], int] = ()):
        self.variables = tuple(variables)
        self.den = int(den)
        self.moduli = tuple(moduli)
        self.terms = {k: c for k, c in dict(terms).items() if c}

    # construction helpers
    def _like(self, terms) -> "LaurentPoly":
        return LaurentPoly(self.variables, self.den, self.moduli, terms)

    @classmethod
    def monomial(cls, variables, den, moduli, exponent, h=None, coef=1) -> "LaurentPoly":
        h = tuple(h) if h is not None else (0,) * len(moduli)
        return cls(variables, den, moduli, {(tuple(exponent), h): coef})

    @classmethod
    def from_fractions(cls, variables, den, moduli, items) -> "LaurentPoly":
        """Build from ``[(coef, exponent_as_rationals[, class])]``."""
        terms: Dict = {}
        zero = (0,) * len(moduli)
        for item in items:
            coef, exps = item[0], item[1]
            h = tuple(item[2]) if len(item) > 2 else zero
            num = []
            for e in exps:
                q = Fraction(e) * den
                if q.denominator != 1:
                    raise SeriesError(f"exponent {e} not on the 1/{den} grid")
                num.append(int(q))
            key = (tuple(num), h)
            terms[key] = terms.get(key, 0) + coef
        return cls(variables, den, moduli, terms)

    def one(self) -> "LaurentPoly":
        return self._like({((0,) * len(self.variables), (0,) * len(self.moduli)): 1})

    def zero(self) -> "LaurentPoly":
        return self._like({})

    # arithmetic
    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return self._like(out)

    def __neg__(self) -> "LaurentPoly":
        return self._like({k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) - c
        return self._like(out)

    def __mul__(self, other) -> "LaurentPoly":
        if isinstance(other, int):
            return self._like({k: c * other for k, c in self.terms.items()})
        out: Dict = {}
        m = self.moduli
        for (e1, h1), c1 in self.terms.items():
            for (e2, h2), c2 in other.terms.items():
                k = (tuple(a + b for a, b in zip(e1, e2)), _add(m, h1, h2))
                out[k] = out.get(k, 0) + c1 * c2
        return self._like(out)

    __rmul__ = __mul__

    def shift(self, exponent: Exponent, h: Optional[HClass] = None, coef: int = 1) -> "LaurentPoly":
        """Multiply by the monomial ``coef * h * t^exponent``."""
        h = tuple(h) if h is not None else (0,) * len(self.moduli)
        m = self.moduli
        return self._like({(tuple(a + b for a, b in zip(e, exponent)), _add(m, g, h)): c * coef
                           for (e, g), c in self.terms.items()})

    def __eq__(self, other):
        return (isinstance(other, LaurentPoly) and self.variables == other.variables
                and self.den == other.den and self.terms == other.terms)

    def __hash__(self):
        return hash((self.variables, self.den, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self) -> int:
        return len(self.exponents())

    # views
    def exponents(self) -> List[Exponent]:
        return sorted({e for e, _ in self.terms})

    def coefficient(self, exponent: Exponent) -> GroupRingElement:
        exponent = tuple(exponent)
        return GroupRingElement(self.moduli, {h: c for (e, h), c in self.terms.items() if e == exponent})

    def monomials(self) -> List[Tuple[Exponent, GroupRingElement]]:
        return [(e, self.coefficient(e)) for e in self.exponents()]

    def as_fraction_dict(self) -> Dict[Tuple[Fraction, ...], int]:
        """Group-free view ``{exponent as rationals: coefficient}``."""
        if any(any(h) for _, h in self.terms):
            raise SeriesError("polynomial has nontrivial group coefficients")
        out: Dict = {}
        for (e, _), c in self.terms.items():
            k = tuple(Fraction(x, self.den) for x in e)
            out[k] = out.get(k, 0) + c
        return {k: c for k, c in out.items() if c}

    def at_one(self) -> GroupRingElement:
        """Value at t = 1 (sum of coefficients, kept per class)."""
        out: Dict[HClass, int] = {}
        for (_, h), c in self.terms.items():
            out[h] = out.get(h, 0) + c
        return GroupRingElement(self.moduli, out)

    def class_part(self, h: HClass) -> "LaurentPoly":
        """Group-free polynomial formed by the terms of class ``h``."""
        h = tuple(h)
        out: Dict = {}
        for (e, g), c in self.terms.items():
            if g == h:
                out[(e, ())] = out.get((e, ()), 0) + c
        return LaurentPoly(self.variables, self.den, (), out)

    def project(self, variables: Sequence[int]) -> "LaurentPoly":
        pos = [self.variables.index(v) for v in variables]
        out: Dict = {}
        for (e, h), c in self.terms.items():
            k = (tuple(e[i] for i in pos), h)
            out[k] = out.get(k, 0) + c
        return LaurentPoly(variables, self.den, self.moduli, out)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, coef in self.monomials():
            exps = ",".join(f"{x}/{self.den}" for x in e)
            parts.append(f"{coef}*t^({exps})")
        return " + ".join(parts)

    __repr__ = __str__


def _binomial(variables, den, moduli, factor: Factor) -> LaurentPoly:
    g, alpha = factor
    zero = (0,) * len(moduli)
    return LaurentPoly(variables, den, moduli,
                       {((0,) * len(variables), zero): 1, (tuple(alpha), tuple(g)): -1})


def _geometric(variables, den, moduli, factor: Factor, count: int) -> LaurentPoly:
    """sum_{k < count} g^k t^{k alpha}."""
    g, alpha = factor
    terms: Dict = {}
    for k in range(count):
        key = (tuple(k * a for a in alpha), _scale(moduli, g, k))
        terms[key] = terms.get(key, 0) + 1
    return LaurentPoly(variables, den, moduli, terms)


# ---------------------------------------------------------------------------
# rational functions


@dataclass(frozen=True)
class RationalFunction:
    """``prefactor * prod(1 - g t^gamma) / prod(1 - h t^alpha)``.

    Numerator binomials are kept factored so that cancellations against the
    denominator stay visible; :attr:`numerator` expands them.
    """

    variables: Tuple[int, ...]
    den: int
    moduli: Tuple[int, ...]
    prefactor: LaurentPoly
    binomials: Tuple[Factor, ...]
    denominator: Tuple[Factor, ...]

    def __post_init__(self):
        for g, alpha in self.denominator:
            if all(a == 0 for a in alpha) or any(a < 0 for a in alpha):
                raise SeriesError(f"denominator exponent {alpha} is not a nonzero nonnegative vector")

    @property
    def numerator(self) -> LaurentPoly:
        out = self.prefactor
        for f in self.binomials:
            out = out * _binomial(self.variables, self.den, self.moduli, f)
        return out

    @property
    def denominator_factors(self) -> Tuple[Factor, ...]:
        return self.denominator

    def expanded(self) -> "RationalFunction":
        return RationalFunction(self.variables, self.den, self.moduli, self.numerator, (), self.denominator)

    def with_numerator(self, numerator: LaurentPoly) -> "RationalFunction":
        return RationalFunction(self.variables, self.den, self.moduli, numerator, (), self.denominator)

    def denominator_poly(self) -> LaurentPoly:
        out = self.prefactor.one()
        for f in self.denominator:
            out = out * _binomial(self.variables, self.den, self.moduli, f)
        return out

    def is_polynomial(self) -> bool:
        return not self.denominator

    def __str__(self) -> str:
        num = str(self.prefactor)
        for g, a in self.binomials:
            num += f" * (1 - {GroupRingElement(self.moduli, {g: 1})}*t^({','.join(f'{x}/{self.den}' for x in a)}))"
        dens = " * ".join(f"(1 - {GroupRingElement(self.moduli, {g: 1})}*t^({','.join(f'{x}/{self.den}' for x in a)}))"
                          for g, a in self.denominator)
        return f"[{num}] / [{dens or '1'}]"


def polynomial_function(p: LaurentPoly) -> RationalFunction:
    return RationalFunction(p.variables, p.den, p.moduli, p, (), ())


# ---------------------------------------------------------------------------
# the function f_H of a graph


def dual_numerators(g: PlumbingGraph, v: int) -> Exponent:
    """E*_v as integer numerators over det A."""
    d = g.data.det
    return tuple(int(c * d) for c in g.data.dual(v))


def vector_numerators(g_den: int, x: LatticeVector) -> Exponent:
    out = []
    for c in x.coords:
        q = c * g_den
        if q.denominator != 1:
            raise SeriesError(f"{x} is not on the 1/{g_den} grid")
        out.append(int(q))
    return tuple(out)


def dual_class(g: PlumbingGraph, v: int) -> HClass:
    return lat.class_of(g, lat.dual_vector(g, v))


@lru_cache(maxsize=None)
def build_fH(g: PlumbingGraph) -> RationalFunction:
    """prod_v (1 - h_v t^{E*_v})^{delta_v - 2} with h_v the class of E*_v."""
    moduli = lat.group_moduli(g)
    den = g.data.det
    binomials, denominator = [], []
    for v in g.ids:
        factor = (dual_class(g, v), dual_numerators(g, v))
        k = g.degree(v) - 2
        if k > 0:
            binomials += [factor] * k
        elif k < 0:
            denominator += [factor] * (-k)
    one = LaurentPoly.monomial(g.ids, den, moduli, (0,) * len(g))
    return RationalFunction(g.ids, den, moduli, one, tuple(binomials), tuple(denominator))


def equivariant_part(f: RationalFunction, h: HClass) -> RationalFunction:
    """The class-h component f_h, with group-free denominators.

    Each factor 1/(1 - g t^a) is rewritten as
    (sum_{k<|H|} g^k t^{ka}) / (1 - t^{|H| a}); afterwards every numerator
    term carries the class of its exponent and the class-h terms are kept.
    """
    order = prod(f.moduli)
    h = tuple(h)
    if order == 1:
        return RationalFunction(f.variables, f.den, (), _strip(f.prefactor),
                                tuple(((), a) for _, a in f.binomials),
                                tuple(((), a) for _, a in f.denominator))
    num = f.numerator
    new_den = []
    for factor in f.denominator:
        num = num * _geometric(f.variables, f.den, f.moduli, factor, order)
        new_den.append(((), tuple(order * a for a in factor[1])))
    return RationalFunction(f.variables, f.den, (), num.class_part(h), (), tuple(new_den))


def _strip(p: LaurentPoly) -> LaurentPoly:
    return LaurentPoly(p.variables, p.den, (), {(e, ()): c for (e, _), c in p.terms.items()})


def _ratio(gamma: Exponent, alpha: Exponent) -> Optional[int]:
    """k >= 1 with gamma = k * alpha, if it exists."""
    i = next(i for i, a in enumerate(alpha) if a)
    if gamma[i] % alpha[i]:
        return None
    k = gamma[i] // alpha[i]
    if k < 1 or any(gc != k * a for gc, a in zip(gamma, alpha)):
        return None
    return k


def cancel_factors(f: RationalFunction) -> RationalFunction:
    """Cancel denominator factors against numerator binomials.

    (1 - g^k t^{k a}) / (1 - g t^a) = sum_{j<k} g^j t^{j a}.  Pairs are taken
    greedily by smallest multiplier k (ties: larger exponent first), which
    leaves the shortest geometric sums behind.
    """
    binomials = list(f.binomials)
    denominator = list(f.denominator)
    prefactor = f.prefactor
    while True:
        best = None
        for j, (g, alpha) in enumerate(denominator):
            for i, (gb, gamma) in enumerate(binomials):
                k = _ratio(gamma, alpha)
                if k is None or tuple(gb) != _scale(f.moduli, g, k):
                    continue
                key = (k, tuple(-a for a in alpha), i, j)
                if best is None or key < best[0]:
                    best = (key, i, j, k)
        if best is None:
            break
        _, i, j, k = best
        prefactor = prefactor * _geometric(f.variables, f.den, f.moduli, denominator[j], k)
        del binomials[i]
        del denominator[j]
    return RationalFunction(f.variables, f.den, f.moduli, prefactor, tuple(binomials), tuple(denominator))


def exact_divide(p: LaurentPoly, factor: Factor) -> LaurentPoly:
    """p / (1 - g t^alpha), raising if the division leaves a remainder."""
    g, alpha = factor
    weight = lambda e: sum(e)  # alpha >= 0, nonzero, so weight(alpha) > 0
    rest = dict(p.terms)
    quotient: Dict = {}
    top = max((weight(e) for e, _ in rest), default=0)
    m = p.moduli
    while rest:
        e, h = min(rest, key=lambda k: (weight(k[0]), k))
        if weight(e) > top:
            raise SeriesError("polynomial is not divisible by the given binomial")
        c = rest.pop((e, h))
        quotient[(e, h)] = quotient.get((e, h), 0) + c
        nxt = (tuple(a + b for a, b in zip(e, alpha)), _add(m, h, g))
        v = rest.get(nxt, 0) + c
        if v:
            rest[nxt] = v
        else:
            rest.pop(nxt, None)
    return p._like(quotient)


def to_laurent(f: RationalFunction) -> LaurentPoly:
    """Rewrite f as a Laurent polynomial, raising if it is not one."""
    f = cancel_factors(f)
    num = f.numerator
    for factor in f.denominator:
        num = exact_divide(num, factor)
    return num


def _project_exp(e: Exponent, pos: Sequence[int]) -> Exponent:
    return tuple(e[i] for i in pos)


def reduce_to(f: RationalFunction, I: Iterable[int], simplify: bool = False,
              graph: Optional[PlumbingGraph] = None) -> RationalFunction:
    """Set t_v = 1 for v outside I (projection of exponents onto I).

    With ``simplify`` the projected factors are cancelled greedily.  When
    ``graph`` is given, ``f`` is its f_H and I spans a subtree, the result is
    put in the form P_I * prod_{j in I} (1 - h_j t^{E*_j})^{delta_{j,I} - 2}
    with P_I a Laurent polynomial.
    """
    I = tuple(sorted(set(I)))
    if not I:
        raise SeriesError("cannot reduce to an empty variable set")
    if not set(I) <= set(f.variables):
        raise SeriesError(f"variables {I} not among {f.variables}")
    pos = [f.variables.index(v) for v in I]
    prefactor = f.prefactor.project(I)
    binomials = tuple((g, _project_exp(a, pos)) for g, a in f.binomials)
    denominator = []
    for g, a in f.denominator:
        pa = _project_exp(a, pos)
        if not any(pa):
            raise SeriesError(f"denominator exponent vanishes after projection to {I}")
        denominator.append((g, pa))
    out = RationalFunction(I, f.den, f.moduli, prefactor, binomials, tuple(denominator))
    if not simplify:
        return out
    if graph is not None and is_subtree(graph, I):
        if f.variables != graph.ids:
            raise SeriesError("subtree simplification needs the full function of the graph")
        return _subtree_form(graph, out)
    return cancel_factors(out)


def _subtree_form(g: PlumbingGraph, f: RationalFunction) -> RationalFunction:
    J = f.variables
    pos = [g.ids.index(j) for j in J]
    extra_num, extra_den, keep_num, keep_den = [], [], [], []
    for j in J:
        factor = (dual_class(g, j), _project_exp(dual_numerators(g, j), pos))
        k = subtree_degree(g, j, J) - 2
        if k < 0:
            extra_num += [factor] * (-k)
            keep_den += [factor] * (-k)
        elif k > 0:
            extra_den += [factor] * k
            keep_num += [factor] * k
    scaled = RationalFunction(J, f.den, f.moduli, f.prefactor,
                              f.binomials + tuple(extra_num), f.denominator + tuple(extra_den))
    P = to_laurent(scaled)
    return RationalFunction(J, f.den, f.moduli, P, tuple(keep_num), tuple(keep_den))


# ---------------------------------------------------------------------------
# Taylor expansion


@dataclass(frozen=True)
class SeriesBox:
    """All Taylor coefficients with exponent <= bound (numerators over den)."""

    variables: Tuple[int, ...]
    den: int
    moduli: Tuple[int, ...]
    bound: Exponent
    coefficients: Mapping[Exponent, GroupRingElement]

    def __getitem__(self, exponent: Exponent) -> GroupRingElement:
        if any(e > b for e, b in zip(exponent, self.bound)):
            raise KeyError(f"{exponent} outside the box {self.bound}")
        return self.coefficients.get(tuple(exponent), GroupRingElement(self.moduli))


def _terms(p: LaurentPoly):
    return [(e, h, c) for (e, h), c in p.terms.items()]


def taylor_box(f: RationalFunction, bound) -> SeriesBox:
    """Exact Taylor coefficients of f at every exponent <= bound."""
    if isinstance(bound, LatticeVector):
        bound = vector_numerators(f.den, bound)
    bound = tuple(bound)
    if any(b < 0 for b in bound):
        raise SeriesError("box bound must be nonnegative")
    acc: Dict[Tuple[Exponent, HClass], int] = {}
    m = f.moduli
    factors = list(f.denominator)

    def rec(e, h, c, j):
        if j == len(factors):
            acc[(e, h)] = acc.get((e, h), 0) + c
            return
        g, alpha = factors[j]
        while all(x <= b for x, b in zip(e, bound)):
            rec(e, h, c, j + 1)
            e = tuple(x + a for x, a in zip(e, alpha))
            h = _add(m, h, g)

    for e, h, c in _terms(f.numerator):
        if all(x <= b for x, b in zip(e, bound)):
            rec(e, h, c, 0)
    coeffs: Dict[Exponent, Dict[HClass, int]] = {}
    for (e, h), c in acc.items():
        coeffs.setdefault(e, {})
        coeffs[e][h] = coeffs[e].get(h, 0) + c
    table = {e: GroupRingElement(m, d) for e, d in coeffs.items()}
    return SeriesBox(f.variables, f.den, m, bound, {e: v for e, v in table.items() if not v.is_zero()})


def coefficient(f: RationalFunction, exponent) -> GroupRingElement:
    """Taylor coefficient of f at one exponent.

    Factors supported on a single coordinate are solved in closed form, one
    per coordinate; the remaining factors are enumerated.
    """
    if isinstance(exponent, LatticeVector):
        exponent = vector_numerators(f.den, exponent)
    target = tuple(exponent)
    m = f.moduli
    leaf: Dict[int, Factor] = {}
    general: List[Factor] = []
    # prefer later factors for the closed-form slot (callers append unit factors last)
    for g, alpha in reversed(f.denominator):
        support = [i for i, a in enumerate(alpha) if a]
        if len(support) == 1 and support[0] not in leaf:
            leaf[support[0]] = (g, alpha)
        else:
            general.append((g, alpha))
    acc: Dict[HClass, int] = {}

    def finish(y, h, c):
        for i, yi in enumerate(y):
            if i in leaf:
                g, alpha = leaf[i]
                a = alpha[i]
                if yi < 0 or yi % a:
                    return
                h = _add(m, h, _scale(m, g, yi // a))
            elif yi:
                return
        acc[h] = acc.get(h, 0) + c

    def rec(y, h, c, j):
        if j == len(general):
            finish(y, h, c)
            return
        g, alpha = general[j]
        while True:
            rec(y, h, c, j + 1)
            y = tuple(yi - a for yi, a in zip(y, alpha))
            h = _add(m, h, g)
            if any(yi < 0 for yi, a in zip(y, alpha) if a):
                break

    for e, h, c in _terms(f.numerator):
        y = tuple(t - x for t, x in zip(target, e))
        if all(yi >= 0 for yi in y):
            rec(y, h, c, 0)
    return GroupRingElement(m, acc)


# ---------------------------------------------------------------------------
# counting functions


class _Group:
    """Finite abelian group with elements encoded as integers."""

    def __init__(self, moduli: Sequence[int]):
        self.moduli = tuple(moduli)
        self.elements = [tuple(c) for c in product(*(range(k) for k in self.moduli))]
        self.code = {h: i for i, h in enumerate(self.elements)}
        n = len(self.elements)
        self.add = np.array([[self.code[_add(self.moduli, a, b)] for b in self.elements]
                             for a in self.elements], dtype=np.int64).reshape(n, n)
        self.neg = np.array([self.code[tuple((-x) % k for x, k in zip(a, self.moduli))]
                             for a in self.elements], dtype=np.int64)

    def powers(self, g: HClass) -> np.ndarray:
        """Codes of 0, g, 2g, ... up to the order of g (exclusive)."""
        out, h = [], (0,) * len(self.moduli)
        while True:
            out.append(self.code[h])
            h = _add(self.moduli, h, g)
            if not any(h):
                return np.array(out, dtype=np.int64)

    def discrete_log(self, g: HClass) -> np.ndarray:
        """For each element t: the k < ord(g) with k g = t, or -1."""
        table = np.full(len(self.elements), -1, dtype=np.int64)
        pw = self.powers(g)
        table[pw] = np.arange(len(pw))
        return table


_ROW_LIMIT = 3_000_000


def _count_below(terms, factors, target, moduli, h) -> int:
    """Sum of Taylor coefficients of class h over a region below ``target``.

    ``terms``: numerator as ``[(exponent, class, coef)]``; ``factors``:
    ``[(class, alpha)]`` with alpha strictly positive in every coordinate.
    All vectors are already restricted to the compared coordinates.  A Taylor
    exponent l counts when l_c < target_c for some c, i.e. l is not >= target.
    """
    grp = _Group(moduli)
    hc = grp.code[tuple(h)]
    target = np.asarray(target, dtype=np.int64)
    if any(a <= 0 for _, alpha in factors for a in alpha):
        raise SeriesError("counting needs strictly positive factor exponents")
    # the factor with the smallest steps goes last: it is summed in closed form
    factors = sorted(factors, key=lambda f: -sum(f[1]))
    alphas = [np.asarray(a, dtype=np.int64) for _, a in factors]
    pows = [grp.powers(g) for g, _ in factors]
    logs = [grp.discrete_log(g) for g, _ in factors]
    def span(Z, alpha):
        # number of k >= 0 keeping some coordinate of Z - k alpha positive
        return np.maximum(np.max(-((-Z) // alpha), axis=1), 0)

    Z = np.array([target - np.asarray(e, dtype=np.int64) for e, _, _ in terms], dtype=np.int64)
    C = np.array([grp.code[tuple(c)] for _, c, _ in terms], dtype=np.int64)
    W = np.array([w for _, _, w in terms], dtype=np.int64)
    if len(terms) == 0:
        return 0
    if not factors:
        inside = (Z > 0).any(axis=1)
        return int(W[inside & (C == hc)].sum())

    def run(Z, C, W, j) -> int:
        alpha = alphas[j]
        n = span(Z, alpha)
        if j == len(factors) - 1:
            need = grp.add[grp.neg[C], hc]        # class still missing
            rho = logs[j][need]
            o = len(pows[j])
            cnt = np.where((rho >= 0) & (n > rho), (n - rho - 1) // o + 1, 0)
            return int((W * cnt).sum())
        keep = n > 0
        Z, C, W, n = Z[keep], C[keep], W[keep], n[keep]
        total = int(n.sum())
        if total == 0:
            return 0
        if total > _ROW_LIMIT and len(n) > 1:
            half = len(n) // 2
            return run(Z[:half], C[:half], W[:half], j) + run(Z[half:], C[half:], W[half:], j)
        rows = np.repeat(np.arange(len(n)), n)
        starts = np.cumsum(n) - n
        k = np.arange(total, dtype=np.int64) - np.repeat(starts, n)
        Z2 = Z[rows] - k[:, None] * alpha[None, :]
        p = pows[j]
        C2 = grp.add[C[rows], p[k % len(p)]]
        return run(Z2, C2, W[rows], j + 1)

    return run(Z, C, W, 0)


def _graph_terms(g: PlumbingGraph):
    f = build_fH(g)
    return _terms(f.numerator), list(f.denominator)


def _restrict(vectors, pos):
    return [tuple(v[i] for i in pos) for v in vectors]


def count_region(g: PlumbingGraph, h: HClass, x: LatticeVector, coords: Iterable[int]) -> int:
    """Sum of p_l over Taylor exponents l of class h with l_c < x_c for some c in coords.

    coords = V gives Q_h(x); coords = N the reduced counting function; one or
    two vertices the counting functions of the projected series.
    """
    coords = sorted(set(coords))
    h = lat.check_class(g, h)
    pos = [g.ids.index(c) for c in coords]
    den = g.data.det
    xt = [Fraction(x[c]) * den for c in coords]
    if any(q.denominator != 1 for q in xt):
        raise SeriesError(f"{x} is not in the dual lattice")
    target = tuple(int(q) for q in xt)
    terms, factors = _graph_terms(g)
    terms = [(tuple(e[i] for i in pos), c, w) for e, c, w in terms]
    factors = [(cl, tuple(a[i] for i in pos)) for cl, a in factors]
    return _count_below(terms, factors, target, lat.group_moduli(g), h)


def count_Q(g: PlumbingGraph, h: HClass, x: LatticeVector, reduced: bool = False) -> int:
    """Counting function Q_h(x) = sum_{l not >= x, [l] = h} p_l.

    With ``reduced`` the comparison only uses the node coordinates (x may
    then be given on the nodes alone).
    """
    if reduced:
        if not g.nodes:
            raise SeriesError("reduced counting needs at least one node")
        return count_region(g, h, x, g.nodes)
    return count_region(g, h, x, g.ids)


# ---------------------------------------------------------------------------
# coefficient functions


MAX_SUBSET_VERTICES = 20


def coefficient_I(g: PlumbingGraph, x: LatticeVector, I: Iterable[int]) -> GroupRingElement:
    """Coeff of t_I^x in T[f_H(t_I) prod_{i in I} t_i / (1 - t_i)]."""
    I = tuple(sorted(set(I)))
    f = reduce_to(build_fH(g), I)
    den = f.den
    unit = lambda i: tuple(den if j == i else 0 for j in range(len(I)))
    shift = tuple([den] * len(I))
    zero = (0,) * len(f.moduli)
    rf = RationalFunction(I, den, f.moduli, f.numerator.shift(shift), (),
                          f.denominator + tuple((zero, unit(i)) for i in range(len(I))))
    return coefficient(rf, vector_numerators(den, lat.project(x, I)))


def count_C_H(g: PlumbingGraph, x: LatticeVector) -> GroupRingElement:
    """Alternating sum over nonempty I of the I-coefficient functions."""
    if len(g) > MAX_SUBSET_VERTICES:
        raise SeriesError(f"subset expansion limited to {MAX_SUBSET_VERTICES} vertices; "
                          "use structure_counts for larger graphs")
    total = GroupRingElement(lat.group_moduli(g))
    for r in range(1, len(g) + 1):
        for I in combinations(g.ids, r):
            c = coefficient_I(g, x, I)
            total = total + (c if r % 2 else -c)
    return total


def count_C(g: PlumbingGraph, x: LatticeVector) -> int:
    return count_C_H(g, x)[lat.class_of(g, x)]


def shifted_coefficient(g: PlumbingGraph, h: HClass, x: LatticeVector, I: Iterable[int]) -> int:
    """h-part of Coeff(T[t_I^{-r} f_h(t_I) prod t_i/(1 - t_i)], t_I^x), r = r_{h - [x]}."""
    moduli = lat.group_moduli(g)
    r = lat.rep_r(g, lat.add_classes(moduli, h, lat.neg_class(moduli, lat.class_of(g, x))))
    return coefficient_I(g, x + r, I)[tuple(h)]


# ---------------------------------------------------------------------------
# structure theorem counts


@dataclass(frozen=True)
class StructureCounts:
    lhs: int
    rhs: int
    in_cone: bool

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs


def structure_counts(g: PlumbingGraph, h: HClass, x: LatticeVector, mode: str = "full") -> StructureCounts:
    """Both sides of the structure identity for the counting function.

    full:      Q_h(x) vs sum_edges Q^{vw}_h(x) - sum_v (delta_v - 1) Q^v_h(x)
    orbifold:  Q^red_h(x) vs the same assembly over the orbifold graph.
    """
    from .graph_core import orbifold_graph

    h = lat.check_class(g, h)
    in_cone = lat.in_structure_cone(g, x)
    if mode == "full":
        lhs = count_region(g, h, x, g.ids)
        rhs = sum(count_region(g, h, x, e) for e in sorted(g.edges))
        rhs -= sum((g.degree(v) - 1) * count_region(g, h, x, [v]) for v in g.ids if g.degree(v) != 1)
    elif mode == "orbifold":
        if not g.nodes:
            raise SeriesError("orbifold mode needs at least one node")
        orb = orbifold_graph(g)
        lhs = count_region(g, h, x, g.nodes)
        rhs = sum(count_region(g, h, x, e) for e in orb.edges)
        rhs -= sum((orb.valency(v) - 1) * count_region(g, h, x, [v])
                   for v in orb.vertices if orb.valency(v) != 1)
    else:
        raise SeriesError(f"unknown mode {mode!r}")
    return StructureCounts(lhs, rhs, in_cone)


def deep_points(g: PlumbingGraph, h: HClass, count: int, apex: LatticeVector,
                depth: int = 1) -> List[LatticeVector]:
    """Points of class h in apex + int(S'), walking outward from the apex.

    Candidates are apex + r + m * sum E*_v + small integer steps, where r
    fixes the class; only those strictly inside the cone are returned.
    """
    moduli = lat.group_moduli(g)
    total_dual = LatticeVector.zero(g.ids)
    for v in g.ids:
        total_dual = total_dual + lat.dual_vector(g, v)
    out: List[LatticeVector] = []
    seen = set()
    steps = [lat.LatticeVector.zero(g.ids)] + [lat.e_vector(g, v) for v in g.ids]
    steps += [lat.e_vector(g, v) + lat.e_vector(g, w) for v, w in combinations(g.ids, 2)]
    m = depth
    while len(out) < count:
        base = apex + total_dual * m
        r = lat.rep_r(g, lat.add_classes(moduli, h, lat.neg_class(moduli, lat.class_of(g, base))))
        for s in steps:
            y = base + r + s
            if y in seen:
                continue
            seen.add(y)
            if lat.in_lipman_interior(g, y - apex):
                out.append(y)
                if len(out) == count:
                    break
        m += 1
    return out
