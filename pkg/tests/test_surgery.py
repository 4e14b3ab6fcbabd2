from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import graph
from plumbing_pc import lattice as lat
from plumbing_pc import surgery as SG
from plumbing_pc.graph_core import delete_end_vertex
from strategies import trees


@pytest.mark.parametrize("name", ["chain22", "star237", "star334", "d4", "lens"])
def test_all_identities_small(name):
    g = graph(name)
    for u in g.ends:
        report = SG.check_all(g, u)
        assert report.rows and report.passed, report.failures()


def test_samples_share_a_coset_downstairs():
    g = graph("star334")
    u = 3
    small = delete_end_vertex(g, u)
    for h in lat.classes(g):
        pts = SG.default_samples(g, u, h, count=5)
        assert len(pts) == 5
        assert all(lat.in_structure_cone(g, x) for x in pts)
        down = {lat.class_of(small, lat.project_dual(g, x, u, small)) for x in pts}
        assert len(down) == 1


def test_report_helpers():
    r = SG.SurgeryReport(0)
    r.add((), "x", Fraction(1), Fraction(1))
    r.add((), "y", Fraction(1), Fraction(2))
    assert not r.passed and [f.identity for f in r.failures()] == ["y"]


def test_rejects_inner_vertex():
    with pytest.raises(SG.SurgeryError):
        SG.check_bn_formula(graph("star237"), 0)
    with pytest.raises(SG.SurgeryError):
        SG.check_all(graph("minus1"), 0)


def test_group_cap():
    with pytest.raises(SG.SurgeryError):
        SG.check_bn_formula(graph("lens"), 0, cap=5)


@settings(max_examples=10)
@given(trees(min_size=2, max_size=4, max_slack=1), st.data())
def test_surgery_formula_random(g, data):
    u = data.draw(st.sampled_from(g.ends))
    assert SG.check_bn_formula(g, u).passed
    assert SG.check_pc_recursion_s(g, u).passed
