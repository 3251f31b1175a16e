from __future__ import annotations

from itertools import permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ends_universal.graphlike import (
    EdgeContractionSystem,
    build_system,
    builders,
    complete_graph,
    cycle,
    cycle_graph,
    dumbbell_graph,
    from_finite_graph,
    hawaiian,
    loop,
    sierpinski_graphlike,
    split,
    theta_graph,
    triple_edge_graph,
    validate,
)
from ends_universal.multigraph import FiniteMultigraph, components, degree


def contracted_shape(g: FiniteMultigraph, keep) -> tuple[int, list]:
    """Vertex count and kept-edge incidence pattern after contracting all other edges."""
    parent = {v: v for v in g.vertices}

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for e, (a, b) in g.edges.items():
        if e not in keep:
            parent[find(a)] = find(b)
    roots = {find(v) for v in g.vertices}
    pattern = sorted((e, find(a) == find(b)) for e, (a, b) in g.edges.items() if e in keep)
    return len(roots), pattern


def test_hawaiian_first_stages():
    sys = hawaiian(1)
    assert sys.expand(0) == FiniteMultigraph(frozenset([0]))
    assert sys.expand(1) == FiniteMultigraph(frozenset([0]), {"e1": (0, 0)})
    assert sys.expand(2) == FiniteMultigraph(frozenset([0, 1]), {"e1": (0, 1), "e2": (0, 1)})


def test_hawaiian_eight_validates():
    rep = validate(hawaiian(8))
    assert rep.ok, rep.witnesses
    assert len(hawaiian(8)) == 16


def test_loop_stage_degree_bound():
    assert degree(hawaiian(1).expand(1), 0) == 2


def test_split_missing_incidence_reported():
    steps = [loop("e1", 0), split("e2", 0, (0, 1), {("e1", 0): 0})]
    rep = validate(EdgeContractionSystem(steps))
    assert not rep.ok
    assert any("e1" in w for w in rep.witnesses)


def test_cycle_three_stages():
    sys = from_finite_graph(cycle_graph(3), ["e1", "e2", "e3"])
    s1, s2, s3 = (sys.expand(k) for k in (1, 2, 3))
    assert len(s1.vertices) == 1 and s1.is_loop("e1")
    assert len(s2.vertices) == 2 and len({frozenset(x) for x in s2.edges.values()}) == 1
    assert s3 == cycle_graph(3)
    assert cycle(3).expand(3) == cycle_graph(3)


def test_k4_every_order_roundtrips():
    k4 = complete_graph(4)
    for order in permutations(sorted(k4.edges)):
        assert from_finite_graph(k4, order).expand(6) == k4


def test_triple_parallel_stage_counts():
    g = triple_edge_graph()
    sys = from_finite_graph(g, ["e1", "e2", "e3"])
    counts = [len(sys.expand(k).vertices) for k in range(4)]
    assert counts == [contracted_shape(g, set(["e1", "e2", "e3"][:k]))[0] for k in range(4)]
    assert counts == [1, 1, 1, 2]


@pytest.mark.parametrize(
    "g", [cycle_graph(3), cycle_graph(5), theta_graph(), triple_edge_graph(), dumbbell_graph()], ids=str
)
def test_stages_match_contraction_oracle(g):
    for order in list(permutations(sorted(g.edges)))[:24]:
        sys = from_finite_graph(g, order)
        for k in range(len(order) + 1):
            stage = sys.expand(k)
            verts, pattern = contracted_shape(g, set(order[:k]))
            assert len(stage.vertices) == verts
            assert sorted((e, stage.is_loop(e)) for e in stage.edges) == pattern


@given(st.permutations(["e1", "e2", "e3", "e4", "e5"]))
@settings(max_examples=40, deadline=None)
def test_c5_random_order_invariants(order):
    sys = from_finite_graph(cycle_graph(5), order)
    assert validate(sys).ok
    assert sys.expand(5) == cycle_graph(5)


def test_sierpinski_depth_two_shape():
    sys = sierpinski_graphlike(2)
    assert validate(sys).ok
    final = sys.expand(len(sys))
    assert len(sys) == 12 and len(final.vertices) == 9
    assert sorted(degree(final, v) for v in final.vertices) == [2, 2, 2] + [3] * 6
    assert validate(sierpinski_graphlike(1)).ok


def test_bonding_contracts_new_edge():
    sys = hawaiian(2)
    f = sys.bonding(1)
    assert set(f.values()) == set(sys.expand(1).vertices)


def test_json_roundtrip():
    sys = build_system("sierpinski:2")
    back = EdgeContractionSystem.from_json(sys.to_json())
    assert back.to_json() == sys.to_json()
    assert len(back) == len(sys)


def test_build_system_catalog():
    assert len(build_system("hawaiian:3")) == 6
    with pytest.raises(KeyError) as info:
        build_system("nope")
    assert all(name in str(info.value) for name in builders())


def test_disconnected_graph_rejected():
    with pytest.raises(ValueError):
        from_finite_graph(FiniteMultigraph(frozenset([0, 1])))
    assert len(components(dumbbell_graph())) == 1
