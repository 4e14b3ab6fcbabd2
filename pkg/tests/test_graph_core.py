from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

import oracle
from conftest import SMALL, graph, graph_path
from plumbing_pc import exact
from plumbing_pc.graph_core import (
    GraphSyntaxError, NotATreeError, NotNegativeDefiniteError, PlumbingError,
    delete_end_vertex, format_graph, is_subtree, make_graph, orbifold_graph,
    parse_graph, reduced_matrix,
)
from strategies import trees


def test_parse_roundtrip(example):
    assert parse_graph(format_graph(example)) == example


def test_comments_and_blank_lines():
    g = parse_graph("# a -2 vertex\n\nvertex 7 -2   # trailing\n")
    assert g.ids == (7,) and g.euler[7] == -2


@pytest.mark.parametrize("text, err", [
    ("vertex 0 -2\nedge 0\n", GraphSyntaxError),
    ("vertex 0 x\n", GraphSyntaxError),
    ("vertex 0 -2\nvertex 0 -3\n", GraphSyntaxError),
    ("", GraphSyntaxError),
    ("vertex 0 -2\nedge 0 1\n", GraphSyntaxError),
    ("vertex 0 -2\nvertex 1 -2\n", NotATreeError),
    ("vertex 0 -2\nvertex 1 -2\nvertex 2 -2\nedge 0 1\nedge 1 2\nedge 2 0\n", NotATreeError),
    ("vertex 0 -2\nedge 0 0\n", NotATreeError),
    ("vertex 0 1\n", NotNegativeDefiniteError),
    ("vertex 0 0\n", NotNegativeDefiniteError),
    ("vertex 0 -1\nvertex 1 -1\nedge 0 1\n", NotNegativeDefiniteError),
])
def test_errors_are_distinct(text, err):
    with pytest.raises(err):
        parse_graph(text)


def test_error_hierarchy():
    for cls in (GraphSyntaxError, NotATreeError, NotNegativeDefiniteError):
        assert issubclass(cls, PlumbingError)


@pytest.mark.parametrize("name", SMALL + ["example"])
def test_inverse_against_sympy(name):
    g = graph(name)
    duals = oracle.duals(*oracle.read_graph(graph_path(name)))
    for v in g.ids:
        assert g.data.dual(v) == duals[v]
    ids, A = oracle.matrix(*oracle.read_graph(graph_path(name)))
    assert g.data.det == A.det()


def test_example_data(example):
    assert example.data.det == 1
    assert example.nodes == (0, 1, 2)
    assert example.ends == (3, 4, 6, 8, 9)
    orb = orbifold_graph(example)
    assert orb.vertices == (0, 1, 2)
    assert orb.edges == ((0, 1), (0, 2))
    assert orb.paths[(0, 1)] == (5,) and orb.paths[(0, 2)] == (7,)
    # node columns of A^-1 restricted to the nodes
    assert [example.data.dual(v)[:3] for v in (0, 1, 2)] == [
        (42, 84, 36), (84, 186, 72), (36, 72, 42)]


def test_single_vertex():
    g = make_graph([(0, -1)])
    assert g.data.A == ((1,),) and g.data.K == (Fraction(1),)
    assert g.nodes == () and g.ends == ()


def test_delete_end_vertex(example):
    small = delete_end_vertex(example, 3)
    assert 3 not in small.euler and len(small) == 9
    with pytest.raises(PlumbingError):
        delete_end_vertex(example, 0)


def test_subtree():
    g = graph("star237")
    assert is_subtree(g, [0, 1])
    assert not is_subtree(g, [1, 2])
    assert not is_subtree(g, [])


@given(trees())
def test_inverse_and_adjunction(g):
    d = g.data
    n = len(g)
    assert exact.matmul(d.A, d.A_inv) == exact.identity(n)
    assert d.det == exact.determinant(d.A) > 0
    for v in g.ids:
        e_v = [Fraction(int(w == v)) for w in g.ids]
        # adjunction: (K, E_v) + (E_v, E_v) + 2 = 0
        assert d.form(d.K, e_v) + d.form(e_v, e_v) + 2 == 0
        for w in g.ids:
            e_w = [Fraction(int(u == w)) for u in g.ids]
            assert d.form(d.dual(v), e_w) == -(v == w)


@given(trees(max_size=6), st.data())
def test_reduced_matrix_is_inverse_block(g, data):
    """Peeling ends in any order gives the inverse of the J-block of A^-1."""
    # grow a random subtree from a random root
    J = {data.draw(st.sampled_from(g.ids))}
    for _ in range(data.draw(st.integers(0, len(g) - 1))):
        frontier = sorted({w for v in J for w in g.neighbors[v]} - J)
        if not frontier:
            break
        J.add(data.draw(st.sampled_from(frontier)))
    J = sorted(J)
    order = data.draw(st.permutations(g.ids))
    red = reduced_matrix(g, J, order=order)
    pos = [g.ids.index(v) for v in J]
    block = sympy.Matrix([[g.data.A_inv[i][j] for j in pos] for i in pos])
    assert sympy.Matrix(red.matrix) * block == sympy.eye(len(J))
