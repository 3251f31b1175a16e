from __future__ import annotations

import dataclasses
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ends_universal.blowup import BlowupVertex, adjacent, UNIVERSAL_LF
from ends_universal.embed_lf import (
    CapacityError,
    check_extension,
    check_lift,
    embed,
    level_function,
    lift_end,
    validate_embedding,
    validate_warmup,
    verify_star,
    warmup_embed,
)
from ends_universal.locally_finite import build, cross_edges, end_prefix, star

V = BlowupVertex


def recurrence(g, n):
    """Straight evaluation of the level recurrence from layer data."""
    h = [len(g.neighbors(g.root))]
    for k in range(1, n + 1):
        h.append(max(h[-1] + len(g.layer(k)), len(cross_edges(g, k))))
    return h


def test_ray_levels():
    assert level_function(build("ray"), "thm32", 5).values == (1, 2, 3, 4, 5, 6)


def test_binary_tree_levels():
    assert level_function(build("binary_tree"), "thm32", 3).values == (2, 4, 8, 16)


@pytest.mark.parametrize("name", ["ray", "double_ray", "binary_tree", "quadrant_grid", "ladder", "stacked_cliques"])
def test_levels_follow_recurrence(name):
    g = build(name)
    assert list(level_function(g, "thm32", 4).values) == recurrence(g, 4)


def test_single_vertex():
    g = build("single_vertex")
    assert level_function(g, "thm32", 3).values == (0,)
    assert embed(g, 3).vertex_map == {g.root: V("", 0)}
    w = warmup_embed(g, 2)
    assert w.h == (1,) and w.vertex_map == {g.root: (1, 0)}


def test_ray_depth_one():
    st_ = embed(build("ray"), 1)
    assert st_.h == (1, 2)
    assert st_.vertex_map == {0: V("0", 0), 1: V("00", 0)}
    assert st_.edge_map[(0, 1)] == (V("0", 0), V("00", 0))
    assert adjacent(UNIVERSAL_LF, *st_.edge_map[(0, 1)])


def test_binary_tree_depth_two():
    state = embed(build("binary_tree"), 2)
    assert validate_embedding(state) == []
    assert len(state.edge_map) == 6
    interiors = [set(p[1:-1]) for p in state.edge_map.values()]
    assert all(not a & b for a, b in combinations(interiors, 2))


@pytest.mark.parametrize(
    "name,n", [("ray", 6), ("double_ray", 5), ("binary_tree", 4), ("quadrant_grid", 4), ("ladder", 4)]
)
def test_embedding_valid(name, n):
    state = embed(build(name), n)
    assert validate_embedding(state) == []
    assert check_extension(state) == []
    for k in range(n + 1):
        assert verify_star(state, k).ok


def test_star_property_examples():
    tree = embed(build("binary_tree"), 2)
    assert len({tree.block_assignment[p] for p in tree.pieces[2]}) == 4
    assert verify_star(embed(build("double_ray"), 1), 1).ok


def test_ray_lift_is_leftmost_chain():
    g = build("ray")
    state = embed(g, 3)
    lifted = lift_end(state, end_prefix(g, "ray", 3))
    assert [d.rep.addr for d in lifted] == ["0", "00", "000", "0000"]
    assert check_lift(state, lifted) == []


def test_lift_depth_zero():
    g = build("binary_tree")
    state = embed(g, 2)
    lifted = lift_end(state, end_prefix(g, "0^w", 0))
    assert [d.rep.addr for d in lifted] == ["00"]


def test_binary_tree_ends_lift_apart():
    g = build("binary_tree")
    state = embed(g, 2)
    a = lift_end(state, end_prefix(g, "0^w", 2))
    b = lift_end(state, end_prefix(g, "01^w", 2))
    assert a[-1] != b[-1] and len(a[-1].rep.addr) == 8


def test_lift_beyond_depth_rejected():
    g = build("ray")
    with pytest.raises(ValueError):
        lift_end(embed(g, 1), end_prefix(g, "ray", 3))


def test_shrunk_levels_fail():
    with pytest.raises(CapacityError):
        embed(build("binary_tree"), 3, level_fn=[2, 3, 3, 4])
    with pytest.raises(CapacityError):
        embed(star(3), 1, level_fn=[1, 3])


def test_tampered_state_detected():
    state = embed(build("binary_tree"), 2)
    vmap = dict(state.vertex_map)
    vmap["00"] = vmap["01"]
    assert validate_embedding(dataclasses.replace(state, vertex_map=vmap))


@given(leaves=st.integers(1, 6), n=st.integers(0, 2))
@settings(max_examples=20, deadline=None)
def test_stars_embed(leaves, n):
    assert validate_embedding(embed(star(leaves), n)) == []


def test_warmup_ray():
    w = warmup_embed(build("ray"), 2)
    assert w.h == (1, 2, 3)
    assert [w.vertex_map[k][0] for k in range(3)] == [1, 2, 3]
    assert all(len(p) == 2 for p in w.edge_map.values())


def test_warmup_star():
    w = warmup_embed(star(3), 1)
    assert w.h == (3, 4)
    assert w.vertex_map[0][0] == 3
    assert {w.vertex_map[v][0] for v in (1, 2, 3)} == {4}


@pytest.mark.parametrize("name", ["ray", "binary_tree", "quadrant_grid", "stacked_cliques", "ladder"])
def test_warmup_valid(name):
    assert validate_warmup(warmup_embed(build(name), 4)) == []


def test_warmup_long_paths_are_straight():
    w = warmup_embed(build("binary_tree"), 2)
    for path in w.edge_map.values():
        j = path[1][1] if len(path) > 2 else None
        assert all(i == j for _, i in path[1:-1])
