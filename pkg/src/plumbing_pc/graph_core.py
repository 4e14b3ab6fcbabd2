"""Plumbing trees: parsing, validation and the intersection data they carry.

A plumbing graph here is a tree whose vertices carry integer Euler numbers
e_v.  The associated matrix A has A_vv = -e_v and A_vw = -1 for every edge,
and it must be positive definite (the intersection form -A is negative
definite).  Everything computed from A is exact.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from . import exact


class PlumbingError(ValueError):
    """Base class for invalid plumbing graph input."""


class GraphSyntaxError(PlumbingError):
    pass


class NotATreeError(PlumbingError):
    pass


class NotNegativeDefiniteError(PlumbingError):
    pass


@dataclass(frozen=True)
class PlumbingGraph:
    """Immutable decorated tree.

    ``euler`` maps vertex id to e_v; ``edges`` holds sorted id pairs.  Build
    instances through :func:`make_graph` or :func:`parse_graph`, which
    validate the tree and definiteness conditions.
    """

    euler: Mapping[int, int]
    edges: FrozenSet[Tuple[int, int]]

    @cached_property
    def ids(self) -> Tuple[int, ...]:
        return tuple(sorted(self.euler))

    @cached_property
    def index(self) -> Dict[int, int]:
        return {v: i for i, v in enumerate(self.ids)}

    @cached_property
    def neighbors(self) -> Dict[int, Tuple[int, ...]]:
        nb: Dict[int, list] = {v: [] for v in self.ids}
        for a, b in self.edges:
            nb[a].append(b)
            nb[b].append(a)
        return {v: tuple(sorted(ws)) for v, ws in nb.items()}

    def degree(self, v: int) -> int:
        return len(self.neighbors[v])

    @cached_property
    def nodes(self) -> Tuple[int, ...]:
        return tuple(v for v in self.ids if self.degree(v) >= 3)

    @cached_property
    def ends(self) -> Tuple[int, ...]:
        return tuple(v for v in self.ids if self.degree(v) == 1)

    def __len__(self) -> int:
        return len(self.euler)

    def __hash__(self):
        return hash((tuple(sorted(self.euler.items())), self.edges))

    def __eq__(self, other):
        if not isinstance(other, PlumbingGraph):
            return NotImplemented
        return dict(self.euler) == dict(other.euler) and self.edges == other.edges

    @cached_property
    def data(self) -> "IntersectionData":
        return _intersection_data(self)


@dataclass(frozen=True)
class IntersectionData:
    """Exact intersection data of a plumbing graph, indexed by ``ids`` order."""

    ids: Tuple[int, ...]
    A: Tuple[Tuple[int, ...], ...]
    A_inv: Tuple[Tuple[Fraction, ...], ...]
    det: int
    K: Tuple[Fraction, ...]
    nodes: Tuple[int, ...]
    ends: Tuple[int, ...]

    def dual(self, v: int) -> Tuple[Fraction, ...]:
        """E*_v in E-coordinates: column v of A^-1."""
        j = self.ids.index(v)
        return tuple(row[j] for row in self.A_inv)

    @property
    def dual_basis(self) -> Dict[int, Tuple[Fraction, ...]]:
        return {v: self.dual(v) for v in self.ids}

    def form(self, x: Sequence, y: Sequence) -> Fraction:
        """Intersection form (x, y) = -x^T A y in E-coordinates."""
        return -sum(Fraction(xi) * aij * yj
                    for xi, row in zip(x, self.A) for aij, yj in zip(row, y) if aij)


@dataclass(frozen=True)
class OrbifoldGraph:
    vertices: Tuple[int, ...]
    edges: Tuple[Tuple[int, int], ...]
    # interior vertices of the T-path realizing each orbifold edge
    paths: Mapping[Tuple[int, int], Tuple[int, ...]] = field(compare=False)

    def valency(self, v: int) -> int:
        return sum(v in e for e in self.edges)

    @property
    def valencies(self) -> Dict[int, int]:
        return {v: self.valency(v) for v in self.vertices}


@dataclass(frozen=True)
class ReducedMatrix:
    J: Tuple[int, ...]
    matrix: Tuple[Tuple[Fraction, ...], ...]


# ---------------------------------------------------------------------------
# construction and validation


def make_graph(vertices: Iterable[Tuple[int, int]],
               edges: Iterable[Tuple[int, int]] = ()) -> PlumbingGraph:
    """Build and validate a plumbing graph from (id, euler) pairs and edges."""
    euler: Dict[int, int] = {}
    for v, e in vertices:
        v, e = int(v), int(e)
        if v in euler:
            raise GraphSyntaxError(f"duplicate vertex {v}")
        euler[v] = e
    if not euler:
        raise GraphSyntaxError("graph has no vertices")
    es = set()
    for a, b in edges:
        a, b = int(a), int(b)
        if a not in euler or b not in euler:
            raise GraphSyntaxError(f"edge {a} {b} uses an undeclared vertex")
        if a == b:
            raise NotATreeError(f"loop at vertex {a}")
        e = (min(a, b), max(a, b))
        if e in es:
            raise NotATreeError(f"repeated edge {a} {b}")
        es.add(e)
    g = PlumbingGraph(euler, frozenset(es))
    _check_tree(g)
    _check_definite(g)
    return g


def _check_tree(g: PlumbingGraph) -> None:
    if len(g.edges) != len(g.euler) - 1:
        raise NotATreeError("graph is not a tree (edge count must be |V| - 1)")
    seen = {g.ids[0]}
    stack = [g.ids[0]]
    while stack:
        v = stack.pop()
        for w in g.neighbors[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    if len(seen) != len(g.euler):
        raise NotATreeError("graph is disconnected")


def intersection_matrix(g: PlumbingGraph) -> List[List[int]]:
    n = len(g)
    A = [[0] * n for _ in range(n)]
    for v, i in g.index.items():
        A[i][i] = -g.euler[v]
    for a, b in g.edges:
        i, j = g.index[a], g.index[b]
        A[i][j] = A[j][i] = -1
    return A


def _check_definite(g: PlumbingGraph) -> None:
    minors = exact.leading_minors(intersection_matrix(g))
    if any(m <= 0 for m in minors):
        raise NotNegativeDefiniteError("intersection form is not negative definite")


def _intersection_data(g: PlumbingGraph) -> IntersectionData:
    A = intersection_matrix(g)
    A_inv = exact.inverse(A)
    det = exact.determinant(A)
    # adjunction (K, E_v) = -2 - e_v together with (K, E_v) = -(A K)_v
    rhs = [[2 + g.euler[v]] for v in g.ids]
    K = tuple(row[0] for row in exact.solve(A, rhs))
    return IntersectionData(
        ids=g.ids,
        A=tuple(map(tuple, A)),
        A_inv=tuple(map(tuple, A_inv)),
        det=det,
        K=K,
        nodes=g.nodes,
        ends=g.ends,
    )


def analyze(g: PlumbingGraph) -> IntersectionData:
    return g.data


# ---------------------------------------------------------------------------
# text format


def parse_graph(text: str) -> PlumbingGraph:
    """Parse the line based graph format.

    Lines are ``vertex <id> <euler>`` or ``edge <id1> <id2>``; ``#`` starts a
    comment and blank lines are ignored.
    """
    vertices, edges = [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "vertex" and len(parts) == 3:
                vertices.append((int(parts[1]), int(parts[2])))
                continue
            if parts[0] == "edge" and len(parts) == 3:
                edges.append((int(parts[1]), int(parts[2])))
                continue
        except ValueError:
            pass
        raise GraphSyntaxError(f"line {lineno}: cannot parse {raw.strip()!r}")
    return make_graph(vertices, edges)


def format_graph(g: PlumbingGraph) -> str:
    lines = [f"vertex {v} {g.euler[v]}" for v in g.ids]
    lines += [f"edge {a} {b}" for a, b in sorted(g.edges)]
    return "\n".join(lines) + "\n"


def load_graph(path) -> PlumbingGraph:
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read())


# ---------------------------------------------------------------------------
# derived structures


def orbifold_graph(g: PlumbingGraph) -> OrbifoldGraph:
    """Nodes of ``g`` joined whenever a path of valency-2 vertices links them."""
    nodes = set(g.nodes)
    edges, paths = set(), {}
    for n in sorted(nodes):
        for first in g.neighbors[n]:
            prev, cur, interior = n, first, []
            while cur not in nodes and g.degree(cur) == 2:
                interior.append(cur)
                prev, cur = cur, next(w for w in g.neighbors[cur] if w != prev)
            if cur in nodes:
                e = (min(n, cur), max(n, cur))
                edges.add(e)
                paths[e] = tuple(interior if n < cur else reversed(interior))
    return OrbifoldGraph(tuple(sorted(nodes)), tuple(sorted(edges)), paths)


def is_subtree(g: PlumbingGraph, J: Iterable[int]) -> bool:
    J = set(J)
    if not J or not J <= set(g.euler):
        return False
    start = min(J)
    seen, stack = {start}, [start]
    while stack:
        v = stack.pop()
        for w in g.neighbors[v]:
            if w in J and w not in seen:
                seen.add(w)
                stack.append(w)
    return seen == J


def subtree_degree(g: PlumbingGraph, v: int, J: Iterable[int]) -> int:
    J = set(J)
    return sum(w in J for w in g.neighbors[v])


def reduced_matrix(g: PlumbingGraph, J: Iterable[int],
                   order: Optional[Sequence[int]] = None) -> ReducedMatrix:
    """Reduced matrix of a subtree J by successive end-vertex removals.

    Removing an end vertex i with neighbor j updates
    Ã_jj <- Ã_jj - 1 / Ã_ii.  ``order`` optionally fixes the preference in
    which removable vertices are peeled (default: smallest id first).
    """
    J = set(J)
    if not is_subtree(g, J):
        raise PlumbingError(f"vertex set {sorted(J)} does not induce a subtree")
    diag = {v: Fraction(-g.euler[v]) for v in g.ids}
    alive = set(g.ids)
    nb = {v: set(ws) for v, ws in g.neighbors.items()}
    rank = {v: i for i, v in enumerate(order)} if order is not None else {v: v for v in g.ids}
    while alive != J:
        candidates = [v for v in alive - J if len(nb[v]) == 1]
        i = min(candidates, key=lambda v: rank.get(v, v))
        (j,) = nb[i]
        diag[j] -= 1 / diag[i]
        nb[j].discard(i)
        alive.discard(i)
        del nb[i]
    ids = tuple(sorted(J))
    mat = []
    for a in ids:
        row = []
        for b in ids:
            if a == b:
                row.append(diag[a])
            elif b in nb[a]:
                row.append(Fraction(-1))
            else:
                row.append(Fraction(0))
        mat.append(tuple(row))
    return ReducedMatrix(ids, tuple(mat))


def delete_end_vertex(g: PlumbingGraph, u: int) -> PlumbingGraph:
    if u not in g.euler:
        raise PlumbingError(f"unknown vertex {u}")
    if len(g) == 1:
        raise PlumbingError("cannot delete the only vertex")
    if g.degree(u) != 1:
        raise PlumbingError(f"vertex {u} is not an end vertex")
    return make_graph(((v, e) for v, e in g.euler.items() if v != u),
                      (e for e in g.edges if u not in e))
