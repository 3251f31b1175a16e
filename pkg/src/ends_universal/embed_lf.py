"""Embedding locally finite graphs into the blowup and into stacked cliques.

Both embeddings place the distance class ``D^n`` of the root at a level
``h(n)`` and route each edge of ``E(D^n, D^{n+1})`` as a path through the
levels in between. All choices are leftmost / lowest index, so the output is
reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Hashable, Mapping, Sequence

from .blowup import (
    UNIVERSAL_LF,
    BlowupParams,
    BlowupVertex,
    PathError,
    adjacent,
    descendants,
    is_vertex,
    monotone_path,
    subtree_dummy,
    tree_leq,
    validate_monotone,
)
from .locally_finite import (
    EndPrefix,
    LazyGraph,
    _components_beyond,
    cross_edges,
    frontier,
    inner_edges,
    stacked_cliques_adjacent,
)
from .multigraph import (
    Dummy,
    FiniteMultigraph,
    GraphError,
    label_str,
    simple_edge,
    sorted_labels,
    to_dot,
)
from .report import Report

Vertex = Hashable


class CapacityError(GraphError):
    """The target ran out of room; unreachable when h follows its recurrence."""


@dataclass(frozen=True)
class LevelFunction:
    variant: str
    values: tuple[int, ...]

    def __getitem__(self, n: int) -> int:
        return self.values[n]

    def __len__(self) -> int:
        return len(self.values)


def level_function(g: LazyGraph, variant: str, n: int) -> LevelFunction:
    """``h(0..n)``, stopping early once the distance classes run out.

    ``thm32``: h(0) = d(v), h(n) = max(h(n-1) + |D^n|, |E(D^n, D^{n+1})|).
    ``prop31``: h(0) = max(d(v), 1), h(n) = max(h(n-1) + 1, |E(D^n, D^{n+1})|, |D^n|).
    """
    if variant not in ("thm32", "prop31"):
        raise ValueError(f"unknown variant {variant!r}")
    d0 = len(g.neighbors(g.root))
    values = [d0 if variant == "thm32" else max(d0, 1)]
    for k in range(1, n + 1):
        size = len(g.layer(k))
        if not size:
            break
        cut = len(cross_edges(g, k))
        if variant == "thm32":
            values.append(max(values[-1] + size, cut))
        else:
            values.append(max(values[-1] + 1, cut, size))
    return LevelFunction(variant, tuple(values))


@dataclass(frozen=True)
class EmbeddingState:
    """Partial embedding phi_n of ``D^{<=n}`` into the blowup."""

    graph: LazyGraph = field(repr=False, compare=False)
    params: BlowupParams
    depth: int
    h: tuple[int, ...]
    vertex_map: Mapping[Vertex, BlowupVertex]
    edge_map: Mapping[tuple, tuple[BlowupVertex, ...]]
    block_assignment: Mapping[frozenset, str]
    pieces: tuple[tuple[frozenset, ...], ...]
    usage: Mapping[str, frozenset]
    log: tuple[str, ...] = ()

    def to_json_dict(self) -> dict:
        return {
            "graph": self.graph.name,
            "target": "lf-blowup",
            "profile": self.params.name,
            "depth": self.depth,
            "h": list(self.h),
            "vertex_map": {label_str(v): label_str(self.vertex_map[v]) for v in sorted_labels(self.vertex_map)},
            "edge_paths": {
                label_str(e): [label_str(u) for u in self.edge_map[e]] for e in sorted_labels(self.edge_map)
            },
            "blocks": [
                {"stage": k, "piece": [label_str(v) for v in sorted_labels(p)], "addr": self.block_assignment[p]}
                for k, stage in enumerate(self.pieces)
                for p in stage
            ],
        }


def embed(
    g: LazyGraph,
    n: int,
    level_fn: Sequence[int] | None = None,
    params: BlowupParams = UNIVERSAL_LF,
) -> EmbeddingState:
    """Construct phi_0, ..., phi_n.

    Each frontier piece goes into the leftmost unused block at level
    ``h(k+1)`` below its parent's block; the cross edges, taken in
    lexicographic order, become monotone paths avoiding the interiors of the
    paths routed before them in the same stage.
    """
    h = tuple(level_fn) if level_fn is not None else level_function(g, "thm32", n).values
    depth = min(n, len(h) - 1)
    log = []
    root_addr = "0" * h[0]
    vertex_map = {g.root: BlowupVertex(root_addr, 0)}
    root_piece = frozenset([g.root])
    assignment = {root_piece: root_addr}
    stage_pieces = [(root_piece,)]
    edge_map: dict = {}
    usage: dict[str, set] = {root_addr: {0}}

    for k in range(depth):
        lvl = h[k + 1]
        if lvl <= h[k]:
            raise CapacityError(f"h({k + 1})={lvl} does not exceed h({k})={h[k]}")
        upper = stage_pieces[k]
        fd = frontier(g, k)
        taken: set[str] = set()
        slots = {}
        placed = []
        for piece in fd.pieces:
            parent_addr = assignment[upper[piece.parent]]
            it = slots.setdefault(parent_addr, descendants(parent_addr, lvl))
            addr = next((a for a in it if a not in taken), None)
            if addr is None:
                raise CapacityError(f"stage {k + 1}: no free block below {parent_addr!r} at level {lvl}")
            taken.add(addr)
            members = sorted_labels(piece.vertices)
            if len(members) > params.s(lvl):
                raise CapacityError(
                    f"stage {k + 1}: piece of {len(members)} vertices exceeds block size {params.s(lvl)}"
                )
            for i, v in enumerate(members):
                vertex_map[v] = BlowupVertex(addr, i)
            usage[addr] = set(range(len(members)))
            assignment[piece.vertices] = addr
            placed.append(piece.vertices)
        stage_pieces.append(tuple(placed))

        for a, b in inner_edges(g, k + 1):
            edge_map[simple_edge(a, b)] = (vertex_map[a], vertex_map[b])

        routed = cross_edges(g, k)
        if len(routed) > h[k]:
            log.append(f"stage {k}: k(n)={len(routed)} exceeds h(n)={h[k]}")
        else:
            log.append(f"stage {k}: k(n)={len(routed)} <= h(n)={h[k]}")
        interiors: set = set()
        for x, y in routed:
            try:
                path = monotone_path(params, vertex_map[x], vertex_map[y], interiors)
            except PathError as exc:
                raise CapacityError(f"stage {k + 1}: routing {x!r}-{y!r} failed: {exc}") from exc
            for u in path[1:-1]:
                usage.setdefault(u.addr, set()).add(u.index)
            interiors.update(path[1:-1])
            edge_map[simple_edge(x, y)] = path

    return EmbeddingState(
        g,
        params,
        depth,
        h[: depth + 1],
        vertex_map,
        edge_map,
        assignment,
        tuple(stage_pieces),
        {a: frozenset(ix) for a, ix in usage.items()},
        tuple(log),
    )


def _edge_owner_conflicts(paths: Mapping, images: Mapping) -> list[str]:
    """Paths must be internally disjoint and avoid vertex images inside."""
    out = []
    image_of = {img: v for v, img in images.items()}
    owner: dict = {}
    for e in sorted_labels(paths):
        for u in paths[e][1:-1]:
            if u in image_of:
                out.append(f"path of {e!r} runs through the image of {image_of[u]!r}")
            if u in owner:
                out.append(f"paths of {owner[u]!r} and {e!r} share {u!r}")
            owner[u] = e
    return out


def validate_embedding(state: EmbeddingState) -> list[str]:
    """Injectivity, level discipline, one block per piece, level bands of paths, path disjointness."""
    g, p, h = state.graph, state.params, state.h
    out = []
    images = state.vertex_map
    if len(set(images.values())) != len(images):
        out.append("vertex map is not injective")
    for k in range(state.depth + 1):
        for v in sorted_labels(g.layer(k)):
            img = images.get(v)
            if img is None:
                out.append(f"{v!r} in D^{k} is not embedded")
            elif not is_vertex(p, img) or img.level != h[k]:
                out.append(f"{v!r} in D^{k} maps to {img!r}, not level {h[k]}")
        addrs = []
        for piece in state.pieces[k]:
            blocks = {images[v].addr for v in piece}
            if len(blocks) != 1:
                out.append(f"stage {k}: piece {sorted_labels(piece)!r} spread over blocks {sorted(blocks)}")
            addrs.append(state.block_assignment[piece])
        if len(set(addrs)) != len(addrs):
            out.append(f"stage {k}: two pieces share a block")
        if set().union(*state.pieces[k]) != g.layer(k):
            out.append(f"stage {k}: pieces do not cover D^{k}")
    if out:
        return out
    for e in sorted_labels(state.edge_map):
        path = state.edge_map[e]
        a, b = e
        if {path[0], path[-1]} != {images[a], images[b]}:
            out.append(f"path of {e!r} does not join the images of its ends")
        if len(set(path)) != len(path):
            out.append(f"path of {e!r} repeats a vertex")
        for u, w in zip(path, path[1:]):
            if not adjacent(p, u, w):
                out.append(f"path of {e!r}: {u!r} and {w!r} not adjacent")
        da, db = g.distance(a), g.distance(b)
        if da != db:
            out.extend(f"path of {e!r}: {w}" for w in validate_monotone(p, path))
        lo, hi = h[min(da, db)], h[max(da, db)]
        if any(not lo <= u.level <= hi for u in path):
            out.append(f"path of {e!r} leaves levels {lo}..{hi}")
    expected = set()
    for k in range(state.depth + 1):
        expected.update(inner_edges(g, k))
        if k < state.depth:
            expected.update(simple_edge(x, y) for x, y in cross_edges(g, k))
    if expected != set(state.edge_map):
        out.append("edge map does not cover exactly the edges of G[D^<=n]")
    out.extend(_edge_owner_conflicts(state.edge_map, images))
    return out


def check_extension(state: EmbeddingState) -> list[str]:
    """phi_n restricted to ``D^{<=n-1}`` equals phi_{n-1}."""
    out = []
    for k in range(state.depth):
        prev = embed(state.graph, k, level_fn=state.h, params=state.params)
        for v, img in prev.vertex_map.items():
            if state.vertex_map.get(v) != img:
                out.append(f"phi_{state.depth} moves {v!r} away from its phi_{k} image")
        for e, path in prev.edge_map.items():
            if state.edge_map.get(e) != path:
                out.append(f"phi_{state.depth} reroutes {e!r} fixed by phi_{k}")
    return out


def verify_star(state: EmbeddingState, n: int) -> Report:
    """Distinct components of ``G - D^{<n}`` land in distinct subtrees ``⌊t_C⌋``."""
    rep = Report(f"star_property[{state.graph.name}]", stages=(n, n))
    if n > state.depth:
        rep.fail(f"state depth {state.depth} is below stage {n}")
        return rep
    g = state.graph
    owner = {}
    for piece in state.pieces[n]:
        for v in piece:
            owner[v] = piece
    for comp in _components_beyond(g, n, state.depth):
        front = comp & g.layer(n)
        pieces_hit = {owner[v] for v in front}
        if len(pieces_hit) != 1:
            rep.fail(f"explored component at {sorted_labels(front)!r} meets {len(pieces_hit)} pieces")
            continue
        piece = pieces_hit.pop()
        t = state.block_assignment[piece]
        for v in comp:
            if not tree_leq(t, state.vertex_map[v].addr):
                rep.fail(f"{v!r} maps outside the subtree below {t!r}")
        for e, path in state.edge_map.items():
            if e[0] in comp and e[1] in comp:
                if any(not tree_leq(t, u.addr) for u in path):
                    rep.fail(f"path of {e!r} leaves the subtree below {t!r}")
    for piece in state.pieces[n]:
        t = state.block_assignment[piece]
        for other in state.pieces[n]:
            u = state.block_assignment[other]
            if other != piece and (tree_leq(t, u) or tree_leq(u, t)):
                rep.fail(f"components at {sorted_labels(piece)!r} and {sorted_labels(other)!r} share a subtree")
    rep.log.append(f"stage {n}: {len(state.pieces[n])} components in distinct subtrees")
    return rep


def lift_end(state: EmbeddingState, end: EndPrefix) -> tuple[Dummy, ...]:
    """Blowup dummies ``v_t`` at levels ``h(0), .., h(N)`` for an end of G.

    Entry k is the dummy of the blowup truncation at ``T^{<h(k)}`` that
    contains the image of the component ``C(D^{<k}, end)``; entry 0 sits over
    the root block.
    """
    if len(end) > state.depth:
        raise GraphError(f"end prefix of length {len(end)} exceeds embedding depth {state.depth}")
    out = [subtree_dummy(state.block_assignment[state.pieces[0][0]])]
    for k in range(1, len(end) + 1):
        rep = end.at(k).rep
        piece = next((p for p in state.pieces[k] if rep in p), None)
        if piece is None:
            raise GraphError(f"stage {k}: {end.at(k)!r} is not an explored component")
        out.append(subtree_dummy(state.block_assignment[piece]))
    return tuple(out)


def check_lift(state: EmbeddingState, lifted: Sequence[Dummy]) -> list[str]:
    """Consecutive lifted dummies are related by the blowup bonding maps."""
    out = []
    for k in range(len(lifted) - 1):
        t, u = lifted[k].rep.addr, lifted[k + 1].rep.addr
        if len(t) != state.h[k] or len(u) != state.h[k + 1] or u[: len(t)] != t:
            out.append(f"stage {k + 1}: v_{u!r} does not map to v_{t!r}")
    return out


def to_dot_embedding(state: EmbeddingState) -> str:
    palette = ["red", "blue", "darkgreen", "orange", "purple", "brown", "magenta", "teal"]
    verts, edges, colors = set(), {}, {}
    for i, e in enumerate(sorted_labels(state.edge_map)):
        path = state.edge_map[e]
        verts.update(path)
        for j, (u, w) in enumerate(zip(path, path[1:])):
            key = f"{label_str(e)}#{j}"
            edges[key] = (u, w)
            colors[key] = palette[i % len(palette)]
    verts.update(state.vertex_map.values())
    return to_dot(FiniteMultigraph(frozenset(verts), edges), name=f"embed_{state.graph.name}", edge_colors=colors)


# -- the warm-up embedding into stacked cliques ------------------------------------------


@dataclass(frozen=True)
class WarmupEmbedding:
    graph: LazyGraph = field(repr=False, compare=False)
    depth: int
    h: tuple[int, ...]
    vertex_map: Mapping[Vertex, tuple[int, int]]
    edge_map: Mapping[tuple, tuple]

    def to_json_dict(self) -> dict:
        return {
            "graph": self.graph.name,
            "target": "stacked",
            "depth": self.depth,
            "h": list(self.h),
            "vertex_map": {label_str(v): label_str(self.vertex_map[v]) for v in sorted_labels(self.vertex_map)},
            "edge_paths": {
                label_str(e): [label_str(u) for u in self.edge_map[e]] for e in sorted_labels(self.edge_map)
            },
        }


def warmup_embed(g: LazyGraph, n: int, level_fn: Sequence[int] | None = None) -> WarmupEmbedding:
    """Embed ``D^{<=n}`` into the stacked cliques, ``D^k`` into ``K_{h(k)}``.

    The j-th cross edge of a stage runs straight along index j through the
    intermediate cliques; when ``h(k+1) = h(k) + 1`` it is a single edge.
    """
    h = tuple(level_fn) if level_fn is not None else level_function(g, "prop31", n).values
    depth = min(n, len(h) - 1)
    vertex_map: dict = {}
    edge_map: dict = {}
    for k in range(depth + 1):
        members = sorted_labels(g.layer(k))
        if len(members) > h[k]:
            raise CapacityError(f"D^{k} has {len(members)} vertices but K_{h[k]} is smaller")
        for i, v in enumerate(members):
            vertex_map[v] = (h[k], i)
        for a, b in inner_edges(g, k):
            edge_map[simple_edge(a, b)] = (vertex_map[a], vertex_map[b])
    for k in range(depth):
        if h[k + 1] <= h[k]:
            raise CapacityError(f"h({k + 1}) does not exceed h({k})")
        for j, (x, y) in enumerate(cross_edges(g, k)):
            if j >= h[k] + 1:
                raise CapacityError(f"stage {k}: more than {h[k] + 1} disjoint paths needed")
            middle = tuple((m, j) for m in range(h[k] + 1, h[k + 1]))
            edge_map[simple_edge(x, y)] = (vertex_map[x], *middle, vertex_map[y])
    return WarmupEmbedding(g, depth, h[: depth + 1], vertex_map, edge_map)


def validate_warmup(emb: WarmupEmbedding) -> list[str]:
    g, h = emb.graph, emb.h
    out = []
    images = emb.vertex_map
    if len(set(images.values())) != len(images):
        out.append("vertex map is not injective")
    for k in range(emb.depth + 1):
        for v in g.layer(k):
            m, i = images[v]
            if m != h[k] or not 0 <= i < m:
                out.append(f"{v!r} in D^{k} maps to {(m, i)!r}, not into K_{h[k]}")
    for e in sorted_labels(emb.edge_map):
        path = emb.edge_map[e]
        a, b = e
        if {path[0], path[-1]} != {images[a], images[b]}:
            out.append(f"path of {e!r} does not join the images of its ends")
        for u, w in zip(path, path[1:]):
            if not stacked_cliques_adjacent(u, w):
                out.append(f"path of {e!r}: {u!r} and {w!r} not adjacent")
        lo, hi = sorted((h[g.distance(a)], h[g.distance(b)]))
        if any(not lo <= m <= hi for m, _ in path):
            out.append(f"path of {e!r} leaves cliques {lo}..{hi}")
    out.extend(_edge_owner_conflicts(emb.edge_map, images))
    return out


def check_warmup_extension(emb: WarmupEmbedding) -> list[str]:
    out = []
    for k in range(emb.depth):
        prev = warmup_embed(emb.graph, k, level_fn=emb.h)
        if any(emb.vertex_map.get(v) != img for v, img in prev.vertex_map.items()):
            out.append(f"warm-up embedding at depth {emb.depth} moves a vertex fixed at depth {k}")
        if any(emb.edge_map.get(e) != p for e, p in prev.edge_map.items()):
            out.append(f"warm-up embedding at depth {emb.depth} reroutes an edge fixed at depth {k}")
    return out


def separation_after_lift(lifted: Mapping[str, Sequence[Dummy]]) -> dict[tuple[str, str], int | None]:
    """First stage at which each pair of lifted ends differs."""
    out = {}
    for (na, a), (nb, b) in combinations(sorted(lifted.items()), 2):
        out[(na, nb)] = next((k for k, (x, y) in enumerate(zip(a, b)) if x != y), None)
    return out
