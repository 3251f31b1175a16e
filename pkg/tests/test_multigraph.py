from __future__ import annotations

from collections import deque

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ends_universal.multigraph import (
    Dummy,
    FiniteMultigraph,
    GraphError,
    bfs_layers,
    components,
    contract_edge,
    contract_partition,
    degree,
    edge_cut,
    from_json,
    is_connected,
    to_dot,
    to_json,
)


def path(n: int) -> FiniteMultigraph:
    return FiniteMultigraph(frozenset(range(n)), {f"p{i}": (i, i + 1) for i in range(n - 1)})


def reachable(g: FiniteMultigraph, v) -> frozenset:
    seen, todo = {v}, deque([v])
    while todo:
        x = todo.popleft()
        for e, (a, b) in g.edges.items():
            for y in ((b,) if a == x else ()) + ((a,) if b == x else ()):
                if y not in seen:
                    seen.add(y)
                    todo.append(y)
    return frozenset(seen)


@st.composite
def multigraphs(draw, max_vertices: int = 6, max_edges: int = 8):
    n = draw(st.integers(1, max_vertices))
    m = draw(st.integers(0, max_edges))
    ends = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), min_size=m, max_size=m))
    return FiniteMultigraph(frozenset(range(n)), {f"e{i}": pair for i, pair in enumerate(ends)})


def test_components_of_path_is_one_block():
    g = FiniteMultigraph(frozenset("abc"), {"x": ("a", "b"), "y": ("b", "c")})
    assert components(g) == [frozenset("abc")]


def test_components_without_edges():
    g = FiniteMultigraph(frozenset("ab"))
    assert components(g) == [frozenset("a"), frozenset("b")]


def test_triangle_minus_vertex_edges():
    g = FiniteMultigraph(frozenset("abc"), {"x": ("a", "b")})
    assert set(components(g)) == {reachable(g, "a"), reachable(g, "c")}


@given(multigraphs())
def test_components_match_reachability(g):
    comps = components(g)
    assert {reachable(g, v) for v in g.vertices} == set(comps)
    assert is_connected(g) == (len(comps) == 1)


def test_bfs_layers_path():
    assert bfs_layers(path(3), 0) == [frozenset([0]), frozenset([1]), frozenset([2])]


def test_bfs_layers_binary_tree_depth_two():
    g = FiniteMultigraph(frozenset(range(7)), {f"t{i}": ((i - 1) // 2, i) for i in range(1, 7)})
    assert [len(x) for x in bfs_layers(g, 0)] == [1, 2, 4]


def test_bfs_layers_k4():
    g = FiniteMultigraph(frozenset(range(4)), {f"k{a}{b}": (a, b) for a in range(4) for b in range(a + 1, 4)})
    for root in range(4):
        assert bfs_layers(g, root) == [frozenset([root]), frozenset(range(4)) - {root}]


def test_bfs_layers_disconnected_names_vertex():
    g = FiniteMultigraph(frozenset("ab"))
    with pytest.raises(GraphError, match="'b'"):
        bfs_layers(g, "a")


def test_edge_cut():
    g = FiniteMultigraph(frozenset(range(7)), {f"t{i}": ((i - 1) // 2, i) for i in range(1, 7)})
    assert len(edge_cut(g, {1, 2}, {3, 4, 5, 6})) == 4
    assert edge_cut(g, {3}, {4}) == frozenset()
    with pytest.raises(GraphError):
        edge_cut(g, {1, 2}, {2, 3})


def test_edge_cut_complete_join():
    verts = [(1, 0), (1, 1), (2, 0), (2, 1), (2, 2)]
    edges = {f"j{i}": (a, b) for i, (a, b) in enumerate((a, b) for a in verts[:2] for b in verts[2:])}
    g = FiniteMultigraph(frozenset(verts), edges)
    assert len(edge_cut(g, verts[:2], verts[2:])) == 6


def test_contract_partition_path():
    q, qmap = contract_partition(path(4), [{0}, {1}, {2, 3}])
    assert len(q.vertices) == 3
    assert qmap.dropped_loops == frozenset({"p2"})
    assert q.edges["p1"] == (1, 2)


def test_contract_partition_single_block():
    q, _ = contract_partition(path(4), [set(range(4))])
    assert len(q.vertices) == 1 and not q.edges


def test_contract_partition_rejects_non_partition():
    with pytest.raises(GraphError):
        contract_partition(path(3), [{0, 1}, {1, 2}])
    with pytest.raises(GraphError):
        contract_partition(path(3), [{0, 1}])


def test_contract_partition_keeps_parallels():
    # root joined to two child blocks of size 2
    verts = ["r", "a0", "a1", "b0", "b1"]
    edges = {f"x{v}": ("r", v) for v in verts[1:]}
    edges.update({"ia": ("a0", "a1"), "ib": ("b0", "b1")})
    q, qmap = contract_partition(FiniteMultigraph(frozenset(verts), edges), [{"r"}, {"a0", "a1"}, {"b0", "b1"}])
    assert len(q.edges) == 4
    assert qmap.dropped_loops == frozenset({"ia", "ib"})


def test_contract_edge_hawaiian_stage():
    g = FiniteMultigraph(frozenset("vw"), {"e1": ("v", "w"), "e2": ("v", "w")})
    q, qmap = contract_edge(g, "e2", merged="z")
    assert q == FiniteMultigraph(frozenset("z"), {"e1": ("z", "z")})
    assert qmap.dropped_loops == frozenset({"e2"})


def test_contract_loop_removes_only_loop():
    g = FiniteMultigraph(frozenset("ab"), {"l": ("a", "a"), "x": ("a", "b")})
    q, _ = contract_edge(g, "l")
    assert q == FiniteMultigraph(frozenset("ab"), {"x": ("a", "b")})


def test_contract_triangle_edge():
    g = FiniteMultigraph(frozenset("abc"), {"ab": ("a", "b"), "bc": ("b", "c"), "ca": ("c", "a")})
    q, _ = contract_edge(g, "ab")
    assert len(q.vertices) == 2 and len(q.edges) == 2
    assert len({frozenset(ends) for ends in q.edges.values()}) == 1


def test_contract_edge_unknown():
    with pytest.raises(GraphError):
        contract_edge(path(2), "nope")


def test_degree_counts_loops_twice():
    assert degree(FiniteMultigraph(frozenset("z"), {"l": ("z", "z")}), "z") == 2
    assert degree(FiniteMultigraph(frozenset("z")), "z") == 0
    g = FiniteMultigraph(frozenset("vw"), {"a": ("v", "w"), "b": ("v", "w")})
    assert degree(g, "v") == degree(g, "w") == 2
    with pytest.raises(GraphError):
        degree(g, "x")


@given(multigraphs())
def test_handshake(g):
    assert sum(degree(g, v) for v in g.vertices) == 2 * len(g.edges)


@given(multigraphs(), st.data())
@settings(max_examples=60)
def test_contract_partition_edge_accounting(g, data):
    labels = data.draw(st.lists(st.integers(0, 2), min_size=len(g.vertices), max_size=len(g.vertices)))
    groups: dict = {}
    for v, lab in zip(sorted(g.vertices), labels):
        groups.setdefault(lab, set()).add(v)
    q, qmap = contract_partition(g, groups.values())
    assert len(q.edges) + len(qmap.dropped_loops) == len(g.edges)
    assert all(a != b for a, b in q.edges.values())


def test_equality_ignores_end_order():
    assert FiniteMultigraph(frozenset("ab"), {"x": ("a", "b")}) == FiniteMultigraph(frozenset("ab"), {"x": ("b", "a")})


def test_rejects_bad_edges():
    with pytest.raises(GraphError):
        FiniteMultigraph(frozenset("a"), {"x": ("a", "b")})
    with pytest.raises(GraphError):
        FiniteMultigraph(frozenset("a"), {"a": ("a", "a")})


def test_json_roundtrip_with_loops_and_parallels():
    g = FiniteMultigraph(frozenset("ab"), {"x": ("a", "b"), "y": ("a", "b"), "l": ("b", "b")})
    assert from_json(to_json(g)) == g


def test_json_marks_dummies():
    g = FiniteMultigraph(frozenset(["r", Dummy("s")]), {"x": ("r", Dummy("s"))})
    assert '"dummies"' in to_json(g, [Dummy("s")])


def test_dot_one_statement_per_parallel_edge():
    g = FiniteMultigraph(frozenset("ab"), {"x": ("a", "b"), "y": ("a", "b"), "z": ("a", "b")})
    assert to_dot(g).count("--") == 3
