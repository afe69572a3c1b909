import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subgraph_test import Graph, graph_from_edges, read_edge_list, write_edge_list
from subgraph_test.errors import NodeOutOfRange, ParseError, SelfLoop
from subgraph_test.graph import DENSE_LOOKUP_MAX_N
from subgraph_test.models import gen_er


def test_orientation_and_duplicates_collapse():
    g = graph_from_edges(3, [(0, 1), (1, 0), (1, 2)])
    assert g.edge_count == 2
    assert g.neighbors(1).tolist() == [0, 2]


def test_empty_graph():
    g = graph_from_edges(2, [])
    assert g.edge_count == 0 and g.n == 2
    assert g.edges().shape == (0, 2)


def test_self_loop_rejected():
    with pytest.raises(SelfLoop):
        graph_from_edges(3, [(0, 0)])


def test_out_of_range_rejected():
    with pytest.raises(NodeOutOfRange):
        graph_from_edges(3, [(0, 3)])
    with pytest.raises(NodeOutOfRange):
        graph_from_edges(3, [(-1, 2)])


def test_arrays_are_read_only():
    g = graph_from_edges(3, [(0, 1)])
    with pytest.raises(ValueError):
        g.indices[0] = 2


edge_lists = st.integers(1, 30).flatmap(
    lambda n: st.tuples(
        st.just(n),
        st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda e: e[0] != e[1]), max_size=80),
    )
)


@settings(max_examples=200, deadline=None)
@given(edge_lists)
def test_invariants(case):
    n, edges = case
    g = graph_from_edges(n, edges)
    assert int(g.degrees.sum()) == 2 * g.edge_count
    assert g.edge_count == len({frozenset(e) for e in edges})
    for i in range(n):
        nb = g.neighbors(i)
        assert np.all(np.diff(nb) > 0)
        assert np.all((nb >= 0) & (nb < n))
        for j in nb:
            assert i in g.neighbors(int(j))
    a = g.adjacency.toarray()
    assert (a == a.T).all() and not a.diagonal().any()


@settings(max_examples=100, deadline=None)
@given(edge_lists)
def test_has_edges_matches_adjacency(case):
    n, edges = case
    g = graph_from_edges(n, edges)
    a = g.adjacency.toarray().astype(bool)
    u, v = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    assert np.array_equal(g.has_edges(u.ravel(), v.ravel()).reshape(n, n), a)
    assert all(g.has_edge(i, j) == a[i, j] for i in range(n) for j in range(n))


def test_has_edges_sparse_path_agrees():
    rng = np.random.default_rng(3)
    g = gen_er(DENSE_LOOKUP_MAX_N + 10, 0.001, rng)
    e = g.edges()
    assert g.has_edges(e[:, 0], e[:, 1]).all()
    assert g.has_edges(e[:, 1], e[:, 0]).all()
    u = rng.integers(0, g.n, 5000)
    v = rng.integers(0, g.n, 5000)
    expected = [g.has_edge(int(a), int(b)) for a, b in zip(u, v)]
    assert g.has_edges(u, v).tolist() == expected


def test_complement_is_involution():
    g = gen_er(25, 0.3, np.random.default_rng(1))
    c = g.complement()
    assert c.edge_count + g.edge_count == 25 * 24 // 2
    assert c.complement() == g


def test_read_simple_file(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("3\n0 1\n1 2\n")
    g = read_edge_list(p)
    assert g.n == 3 and g.edge_count == 2


def test_read_skips_comments_and_blank_lines(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("# header\n\n4\n0 1\n# mid\n2 3\n\n")
    assert read_edge_list(p).edge_count == 2


def test_read_out_of_range_names_line(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("2\n0 5\n")
    with pytest.raises(NodeOutOfRange, match="line 2"):
        read_edge_list(p)


@pytest.mark.parametrize(
    "text, line",
    [("", None), ("x\n", 1), ("3\n0\n", 2), ("3\n0 1 2\n", 2), ("3\n0 -1\n", 2), ("3\n0 1\n1 a\n", 3)],
)
def test_read_parse_errors(tmp_path, text, line):
    p = tmp_path / "g.txt"
    p.write_text(text)
    with pytest.raises(ParseError) as info:
        read_edge_list(p)
    assert info.value.line == line


def test_read_self_loop(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("3\n1 1\n")
    with pytest.raises(SelfLoop):
        read_edge_list(p)


@pytest.mark.parametrize("seed", range(10))
def test_write_read_round_trip(tmp_path, seed):
    rng = np.random.default_rng(seed)
    g = gen_er(int(rng.integers(0, 50)), float(rng.random()), rng)
    p = tmp_path / "g.txt"
    write_edge_list(g, p)
    back = read_edge_list(p)
    assert back == g
    first = p.read_bytes()
    write_edge_list(back, p)
    assert p.read_bytes() == first


def test_graph_not_hashable_but_comparable():
    a = graph_from_edges(3, [(0, 1)])
    b = graph_from_edges(3, [(1, 0)])
    assert a == b and a != graph_from_edges(3, [(1, 2)])
    assert isinstance(a, Graph)
    with pytest.raises(TypeError):
        hash(a)
