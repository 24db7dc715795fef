import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphzeta.errors import ConnectivityError, SimplicityError
from graphzeta.graph import ball, build_graph, frontier, read_edge_list, write_edge_list


def test_cycle_and_complete():
    c4 = build_graph([(0, 1), (1, 2), (2, 3), (3, 0)])
    assert list(c4.degrees) == [2, 2, 2, 2]
    k4 = build_graph([(i, j) for i in range(4) for j in range(i + 1, 4)])
    assert list(k4.degrees) == [3, 3, 3, 3] and k4.max_degree == 3


def test_rejections():
    with pytest.raises(SimplicityError):
        build_graph([(0, 1), (0, 1)])
    with pytest.raises(SimplicityError):
        build_graph([(0, 0), (0, 1)])
    with pytest.raises(ConnectivityError):
        build_graph([(0, 1), (2, 3)])


def test_labels_mapped_in_order():
    g = build_graph([("a", "b"), ("b", "c")])
    assert g.vertex_count == 3 and g.labels == ("a", "b", "c")


def test_ball_examples(graphs):
    c4, k4 = graphs["C4"], graphs["K4"]
    assert ball(c4, 0, 0) == [0]
    assert ball(c4, 0, 1) == [0, 1, 3]
    assert ball(k4, 2, 1) == [0, 1, 2, 3]


def test_frontier_examples(graphs):
    c4 = graphs["C4"]
    assert frontier(c4, range(4)) == []
    assert frontier(c4, [0, 1]) == [0, 1]
    path = build_graph([(0, 1), (1, 2), (2, 3), (3, 4)])
    assert frontier(path, [0, 1, 2]) == [2]


def test_edge_list_roundtrip(tmp_path, graphs):
    p = tmp_path / "g.txt"
    p.write_text("# petersen\n" + "\n".join(f"{a} {b}" for a, b in graphs["petersen"].edges()))
    g = read_edge_list(p)
    assert g.edges() == graphs["petersen"].edges()
    write_edge_list(g, tmp_path / "h.txt")
    assert read_edge_list(tmp_path / "h.txt").edges() == g.edges()


@st.composite
def connected_graphs(draw, max_n=12):
    n = draw(st.integers(2, max_n))
    # random spanning tree plus extra edges
    edges = {(draw(st.integers(0, v - 1)), v) for v in range(1, n)}
    extra = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=2 * n))
    edges |= {(min(a, b), max(a, b)) for a, b in extra if a != b}
    return build_graph(sorted(edges), vertex_count=n)


@settings(max_examples=60, deadline=None)
@given(connected_graphs(), st.data())
def test_ball_and_frontier_properties(g, data):
    for v in range(g.vertex_count):
        assert len(ball(g, v, 1)) == g.degrees[v] + 1
    K = data.draw(st.sets(st.integers(0, g.vertex_count - 1), min_size=1))
    F = set(frontier(g, K))
    assert F <= K
    brute = {v for v in K if any(w not in K for w in g.adjacency[v])}
    assert F == brute


@settings(max_examples=40, deadline=None)
@given(connected_graphs())
def test_adjacency_norm_bounded_by_max_degree(g):
    A = g.adjacency_matrix(dtype=float, sparse=False)
    assert np.abs(np.linalg.eigvalsh(A)).max() <= g.max_degree + 1e-9
