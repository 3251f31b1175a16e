from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ends_universal.locally_finite import (
    AsymmetryError,
    ExplorationLimitError,
    HorizonError,
    LazyGraph,
    bonding,
    build,
    builder_catalog,
    check_bonding,
    check_end_prefix,
    check_inverse_system,
    check_truncation,
    cross_edges,
    end_prefix,
    frontier,
    pieces,
    prefix,
    separation_stage,
    stacked_cliques,
    truncation,
)
from ends_universal.multigraph import Dummy, FiniteMultigraph, degree

CORPUS = ["ray", "double_ray", "binary_tree", "quadrant_grid", "ladder", "stacked_cliques"]


def test_ray_prefix():
    p = prefix(build("ray"), 2)
    assert p.layers == (frozenset([0]), frozenset([1]), frozenset([2]))
    assert len(p.graph.edges) == 2


def test_binary_tree_prefix():
    p = prefix(build("binary_tree"), 2)
    assert len(p.graph.vertices) == 7 and len(p.graph.edges) == 6


def test_quadrant_grid_prefix():
    p = prefix(build("quadrant_grid"), 2)
    assert [len(x) for x in p.layers] == [1, 2, 3]
    # brute force over the corner: pairs at l1 distance 1 with coordinate sum <= 2
    pts = [(i, j) for i in range(3) for j in range(3) if i + j <= 2]
    expected = {frozenset((a, b)) for a in pts for b in pts if abs(a[0] - b[0]) + abs(a[1] - b[1]) == 1}
    assert len(p.graph.edges) == len(expected) == 6


def test_frontier_pieces():
    fd = frontier(build("binary_tree"), 0)
    assert len(fd.pieces) == 2 and {p.parent for p in fd.pieces} == {0}
    for n in range(5):
        assert len(frontier(build("ray"), n).pieces) == 1
    assert len(pieces(build("double_ray"), 1)) == 2


def test_truncation_ray_stage_one():
    t = truncation(build("ray"), 1)
    assert len(t.graph.vertices) == 2 and len(t.graph.edges) == 1
    assert t.real == frozenset([0])


def test_truncation_binary_tree_stage_two():
    t = truncation(build("binary_tree"), 2)
    assert len(t.real) == 3 and len(t.dummies) == 4
    assert len(t.graph.edges) == 6


def test_truncation_stacked_cliques_stage_one():
    t = truncation(build("stacked_cliques"), 1)
    assert len(t.real) == 1 and len(t.dummies) == 1
    assert len(t.graph.edges) == 2
    (d,) = t.dummies
    assert degree(t.graph, d) == 2


def test_truncation_rejects_stage_zero():
    with pytest.raises(ValueError):
        truncation(build("ray"), 0)


def test_bonding_ray():
    b = bonding(build("ray"), 1)
    assert b.vertex_map[Dummy(2)] == Dummy(1)
    assert b.vertex_map[0] == 0


def test_bonding_binary_tree_two_to_one():
    g = build("binary_tree")
    b = bonding(g, 1)
    images = [b.vertex_map[d] for d in truncation(g, 2).dummies]
    assert sorted(images.count(d) for d in truncation(g, 1).dummies) == [2, 2]


@pytest.mark.parametrize("name", CORPUS)
def test_bonding_identity_on_reals(name):
    g = build(name)
    for n in range(1, 4):
        b = bonding(g, n)
        assert all(b.vertex_map[x] == x for x in truncation(g, n).real)


def test_tampered_bonding_reported():
    g = build("binary_tree")
    b = bonding(g, 1)
    vmap = dict(b.vertex_map)
    vmap[""] = "0"
    tampered = type(b)(b.stage, vmap, b.edge_map, b.collapsed)
    assert check_bonding(truncation(g, 2), truncation(g, 1), tampered)


def test_end_prefixes():
    g = build("ray")
    assert len({end_prefix(g, "ray", 5).at(k) for k in range(1, 6)}) == 5
    for k in range(1, 6):
        assert len(truncation(g, k).dummies) == 1
    t = build("binary_tree")
    assert separation_stage(end_prefix(t, "0^w", 4), end_prefix(t, "01^w", 4)) == 2
    assert not check_end_prefix(t, end_prefix(t, "(10)^w", 5))


def test_stacked_clique_degree():
    g = stacked_cliques()
    assert len(g.neighbors((2, 0))) == 1 + 1 + 3


def test_cross_edges_stacked_join():
    assert len(cross_edges(stacked_cliques(), 1)) == 6


@pytest.mark.parametrize("name", CORPUS)
def test_inverse_system(name):
    rep = check_inverse_system(build(name), 6)
    assert rep.ok, rep.witnesses


@pytest.mark.parametrize("name", CORPUS)
@given(n=st.integers(1, 5))
def test_truncations_loop_free_with_parallels(name, n):
    g = build(name)
    assert check_truncation(g, truncation(g, n)) == []


def test_asymmetry_detected():
    g = LazyGraph(0, lambda v: [1] if v == 0 else [2] if v == 1 else [1], "bad")
    with pytest.raises(AsymmetryError, match="0"):
        g.layers(2)


def test_exploration_limit(monkeypatch):
    monkeypatch.setenv("ENDS_UNIVERSAL_MAX_VERTICES", "50")
    with pytest.raises(ExplorationLimitError):
        build("binary_tree").layers(10)


def test_horizon_error_when_components_merge_late():
    c6 = FiniteMultigraph(frozenset(range(6)), {f"e{i}": (i, (i + 1) % 6) for i in range(6)})
    with pytest.raises(HorizonError):
        truncation(LazyGraph.from_finite(c6, 0), 1)


def test_unknown_builder_lists_catalog():
    with pytest.raises(KeyError) as info:
        build("nope")
    assert all(name in str(info.value) for name in builder_catalog())


def test_blowup_as_lazy_graph():
    g = build("blowup_lf")
    assert [len(x) for x in g.layers(2)] == [1, 4, 12]
