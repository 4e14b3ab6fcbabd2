from fractions import Fraction
from itertools import product

import pytest
import sympy
from hypothesis import given, strategies as st
from sympy.matrices.normalforms import smith_normal_form

from conftest import SMALL, graph
from plumbing_pc import exact
from plumbing_pc import lattice as lat
from plumbing_pc.graph_core import delete_end_vertex
from plumbing_pc.lattice import LatticeError, LatticeVector
from strategies import graph_and_class, trees


def _moduli_sympy(g):
    D = smith_normal_form(sympy.Matrix(g.data.A), domain=sympy.ZZ)
    return sorted(abs(int(D[i, i])) for i in range(len(g)) if abs(D[i, i]) > 1)


@pytest.mark.parametrize("name", SMALL + ["example"])
def test_group_matches_sympy(name):
    g = graph(name)
    assert sorted(lat.group_moduli(g)) == _moduli_sympy(g)
    assert lat.group_order(g) == g.data.det


def test_known_groups():
    assert lat.group_moduli(graph("minus1")) == ()
    assert lat.group_moduli(graph("chain22")) == (3,)
    assert lat.group_moduli(graph("d4")) == (2, 2)
    assert sorted(lat.group_moduli(graph("star2333"))) == [3, 9]


def test_vector_parse_roundtrip():
    x = LatticeVector((1, 3), (Fraction(1, 2), Fraction(-2)))
    assert str(x) == "v1:1/2,v3:-2/1"
    assert LatticeVector.parse(str(x)) == x
    with pytest.raises(LatticeError):
        LatticeVector.parse("w1:2")


def test_check_class():
    g = graph("chain22")
    assert lat.check_class(g, [2]) == (2,)
    with pytest.raises(LatticeError):
        lat.check_class(g, [3])
    with pytest.raises(LatticeError):
        lat.check_class(g, [0, 0])
    assert lat.check_class(graph("minus1"), [0]) == ()


def test_minus2_representatives():
    g = graph("minus2")
    half = LatticeVector((0,), (Fraction(1, 2),))
    assert lat.rep_r(g, (1,)) == half
    assert lat.rep_s(g, (1,)) == half
    assert lat.rep_s(g, (0,)) == LatticeVector.zero((0,))


def test_node_shift_star():
    g = graph("star237")
    shift = lat.node_shift(g)
    # one node, three ends: E*_node - sum of E*_end
    want = lat.dual_vector(g, 0) - lat.dual_vector(g, 1) - lat.dual_vector(g, 2) - lat.dual_vector(g, 3)
    assert shift == want


@given(trees())
def test_classes_are_a_group(g):
    moduli = lat.group_moduli(g)
    cls = lat.classes(g)
    assert len(cls) == g.data.det == len(set(cls))
    for v in g.ids:
        # E_v is in L, so it is in the trivial class
        assert lat.class_of(g, lat.e_vector(g, v)) == lat.zero_class(g)
    a = lat.dual_vector(g, g.ids[0])
    b = lat.dual_vector(g, g.ids[-1])
    assert lat.class_of(g, a + b) == lat.add_classes(moduli, lat.class_of(g, a), lat.class_of(g, b))


@given(graph_and_class())
def test_rep_r(gh):
    g, h = gh
    r = lat.rep_r(g, h)
    assert lat.class_of(g, r) == h
    assert all(0 <= c < 1 for c in r.coords)


@given(graph_and_class(max_size=4))
def test_rep_s_is_the_minimum(gh):
    """s_h lies in S' and below every element of S' of class h in a box."""
    g, h = gh
    s = lat.rep_s(g, h)
    assert lat.class_of(g, s) == h and lat.in_lipman(g, s)
    r = lat.rep_r(g, h)
    top = max(int(c) for c in s.coords) + 2
    for steps in product(range(top + 1), repeat=len(g)):
        x = r + LatticeVector(g.ids, tuple(Fraction(k) for k in steps))
        if lat.in_lipman(g, x):
            assert lat.leq(s, x)


@given(trees(min_size=2), st.data())
def test_project_dual(g, data):
    u = data.draw(st.sampled_from(g.ends))
    small = delete_end_vertex(g, u)
    # E*_v goes to E*_v, E*_u to 0
    for v in g.ids:
        y = lat.project_dual(g, lat.dual_vector(g, v), u, small)
        want = LatticeVector.zero(small.ids) if v == u else lat.dual_vector(small, v)
        assert y == want
    # E_v for v != u goes to E_v: only the u-th row of A is dropped
    for v in small.ids:
        assert lat.project_dual(g, lat.e_vector(g, v), u, small) == lat.e_vector(small, v)


@given(trees())
def test_snf_factorization(g):
    sd = lat.smith_data(g)
    D = exact.matmul(exact.matmul(sd.U, g.data.A), sd.V)
    n = len(g)
    assert all(D[i][j] == (sd.D[i] if i == j else 0) for i in range(n) for j in range(n))
    assert all(sd.D[i + 1] % sd.D[i] == 0 for i in range(n - 1))
