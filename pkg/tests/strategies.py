"""Hypothesis strategies for small negative definite trees."""
from hypothesis import strategies as st

from plumbing_pc.graph_core import make_graph


@st.composite
def trees(draw, min_size=1, max_size=5, max_slack=2):
    """Trees with euler numbers -(degree + slack), slack >= 1 at vertex 0.

    The matrix is then irreducibly diagonally dominant, so the form is
    negative definite.  Ends with slack 0 give -1 vertices.
    """
    n = draw(st.integers(min_size, max_size))
    parents = [draw(st.integers(0, i - 1)) for i in range(1, n)]
    edges = [(p, i) for i, p in enumerate(parents, 1)]
    deg = [0] * n
    for a, b in edges:
        deg[a] += 1
        deg[b] += 1
    slack = [draw(st.integers(0, max_slack)) for _ in range(n)]
    slack[0] = max(slack[0], 1)
    return make_graph([(v, -(deg[v] + slack[v])) for v in range(n)], edges)


@st.composite
def graph_and_class(draw, **kw):
    from plumbing_pc import lattice as lat

    g = draw(trees(**kw))
    cls = lat.classes(g)
    return g, cls[draw(st.integers(0, len(cls) - 1))]
