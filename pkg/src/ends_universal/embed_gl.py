"""Embedding an edge-contraction system into the graph-like blowup.

Stage n places every vertex of ``G_n`` on a tree address of level n and every
edge on a path of the blowup whose two ends sit in the blocks of its end
vertices. Passing to stage n+1, every vertex moves to a child address, every
path grows by one edge at each end, and the new edge ``e_{n+1}`` becomes a
three-vertex path ``a l b`` through an unused vertex ``l`` of the old block.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Hashable, Mapping, Sequence

from .blowup import (
    UNIVERSAL_GL,
    BlowupVertex,
    adjacent,
    block,
    degree_in_blowup,
    is_vertex,
    neighbors,
    parent,
    subtree_dummy,
)
from .embed_lf import CapacityError
from .graphlike import EdgeContractionSystem
from .multigraph import (
    Dummy,
    FiniteMultigraph,
    GraphError,
    degree,
    label_str,
    sorted_labels,
    to_dot,
)
from .report import Report

Vertex = Hashable
P = UNIVERSAL_GL


@dataclass(frozen=True)
class GLStage:
    """``g_n`` and ``p_n``; each path runs from the end at position 0 to the end at position 1."""

    n: int
    g_map: Mapping[Vertex, str]
    p_map: Mapping[Hashable, tuple[BlowupVertex, ...]]

    def used(self) -> dict[str, frozenset]:
        out: dict[str, set] = {}
        for path in self.p_map.values():
            for u in path:
                out.setdefault(u.addr, set()).add(u.index)
        return {a: frozenset(ix) for a, ix in out.items()}


@dataclass(frozen=True)
class GLEmbedding:
    system: EdgeContractionSystem
    stages: tuple[GLStage, ...]

    @property
    def horizon(self) -> int:
        return len(self.stages) - 1

    def stage(self, n: int) -> GLStage:
        if not 0 <= n <= self.horizon:
            raise GraphError(f"stage {n} outside 0..{self.horizon}")
        return self.stages[n]

    def to_json_dict(self) -> dict:
        last = self.stages[-1]
        return {
            "system": self.system.name,
            "horizon": self.horizon,
            "stages": [
                {
                    "n": s.n,
                    "g": {label_str(x): s.g_map[x] for x in sorted_labels(s.g_map)},
                    "p": {label_str(e): [label_str(u) for u in s.p_map[e]] for e in sorted_labels(s.p_map)},
                }
                for s in self.stages
            ],
            "final_edges": len(last.p_map),
        }


def _lowest_free(addr: str, taken: set) -> BlowupVertex:
    for u in block(P, addr):
        if u not in taken:
            taken.add(u)
            return u
    raise CapacityError(f"block {addr!r} has no unused vertex")


def run(sys: EdgeContractionSystem, N: int) -> GLEmbedding:
    """Carry the recursion for ``g_n, p_n`` up to stage N."""
    if not 0 <= N <= len(sys):
        raise ValueError(f"horizon {N} outside 0..{len(sys)}")
    stages = [GLStage(0, {sys.root: ""}, {})]
    order: list = []  # edges in introduction order
    for n in range(N):
        step = sys.steps[n]
        prev = stages[-1]
        after = sys.expand(n + 1)
        z = step.at
        g_next = {}
        for x, addr in prev.g_map.items():
            if x != z:
                g_next[x] = addr + "0"
        if step.kind == "loop":
            g_next[z] = prev.g_map[z] + "0"
        else:
            v, w = step.into
            g_next[v] = prev.g_map[z] + "0"
            g_next[w] = prev.g_map[z] + "1"
        taken = {u for path in prev.p_map.values() for u in path}
        p_next = {}
        for e in order:
            path = prev.p_map[e]
            x0, x1 = after.edges[e]
            head = _lowest_free(g_next[x0], taken)
            tail = _lowest_free(g_next[x1], taken)
            p_next[e] = (head, *path, tail)
        ell = _lowest_free(prev.g_map[z], taken)
        x0, x1 = after.edges[step.edge]
        a = _lowest_free(g_next[x0], taken)
        b = _lowest_free(g_next[x1], taken)
        p_next[step.edge] = (a, ell, b)
        order.append(step.edge)
        stages.append(GLStage(n + 1, g_next, p_next))
    return GLEmbedding(sys, tuple(stages))


# -- validators ------------------------------------------------------------------------


def validate_stage(emb: GLEmbedding, n: int) -> list[str]:
    """Injective placement, disjoint paths between the right blocks, path shape and capacity at stage n."""
    s = emb.stage(n)
    g = emb.system.expand(n)
    out = []
    if set(s.g_map) != set(g.vertices):
        out.append(f"stage {n}: g_{n} is not defined on exactly V(G_{n})")
    if len(set(s.g_map.values())) != len(s.g_map):
        out.append(f"stage {n}: g_{n} is not injective")
    for x, t in s.g_map.items():
        if len(t) != n or set(t) - {"0", "1"}:
            out.append(f"stage {n}: g_{n}({x!r}) = {t!r} is not an address of level {n}")
    if set(s.p_map) != set(g.edges):
        out.append(f"stage {n}: p_{n} is not defined on exactly E(G_{n})")
        return out
    owner: dict = {}
    for e in sorted_labels(s.p_map):
        path = s.p_map[e]
        x0, x1 = g.edges[e]
        if path[0].addr != s.g_map[x0] or path[-1].addr != s.g_map[x1]:
            out.append(f"stage {n}: p_{n}({e!r}) does not join K(g({x0!r})) to K(g({x1!r}))")
        for u in path:
            if not is_vertex(P, u) or u.level > n:
                out.append(f"stage {n}: p_{n}({e!r}) uses {u!r} outside the blowup up to level {n}")
            if u in owner:
                out.append(f"stage {n}: p_{n}({owner[u]!r}) and p_{n}({e!r}) share {u!r}")
            owner[u] = e
        for u, w in zip(path, path[1:]):
            if not adjacent(P, u, w):
                out.append(f"stage {n}: p_{n}({e!r}) steps from {u!r} to non-adjacent {w!r}")
        levels = [u.level for u in path]
        if any(levels.count(k) > 2 for k in set(levels)):
            out.append(f"stage {n}: p_{n}({e!r}) meets some level more than twice")
    for x, t in s.g_map.items():
        ends = sum(1 for path in s.p_map.values() for u in (path[0], path[-1]) if u.addr == t)
        bound = degree(g, x)
        if ends > bound or bound > 2 * n:
            out.append(f"stage {n}: K({t!r}) holds {ends} path ends for a vertex of degree {bound}")
    return out


def validate_transition(emb: GLEmbedding, n: int) -> list[str]:
    """Vertices move to children of their images; each path grows by one edge at both ends."""
    s, t = emb.stage(n), emb.stage(n + 1)
    f = emb.system.bonding(n)
    out = []
    for x, addr in t.g_map.items():
        if parent(addr) != s.g_map[f[x]]:
            out.append(f"stage {n + 1}: g({x!r}) = {addr!r} is not a child of g_{n}({f[x]!r})")
    for e, path in s.p_map.items():
        longer = t.p_map.get(e)
        if longer is None or len(longer) != len(path) + 2 or longer[1:-1] != path:
            out.append(f"stage {n + 1}: p({e!r}) does not extend p_{n}({e!r}) by one edge at each end")
    return out


def validate(emb: GLEmbedding) -> Report:
    rep = Report(f"graphlike_embedding[{emb.system.name}]", stages=(0, emb.horizon))
    for n in range(emb.horizon + 1):
        for w in validate_stage(emb, n):
            rep.fail(w)
        if n < emb.horizon:
            for w in validate_transition(emb, n):
                rep.fail(w)
    return rep


# -- stage maps into the blowup truncations ------------------------------------------------


@dataclass(frozen=True)
class StageMap:
    """``h_n``: vertex x goes to ``v_{g_n(x)}``; edge paths get dummies at both ends."""

    n: int
    vertex_map: Mapping[Vertex, Dummy]
    edge_map: Mapping[Hashable, tuple]


def _quotient_adjacent(n: int, a, b) -> bool:
    """Adjacency in the blowup with ``T^{>=n}`` contracted, by address arithmetic."""
    da, db = isinstance(a, Dummy), isinstance(b, Dummy)
    if da and db:
        return False
    if da or db:
        d, u = (a, b) if da else (b, a)
        t = d.rep.addr
        return len(t) == n and bool(t) and u.level == n - 1 and parent(t) == u.addr
    return a.level < n and b.level < n and adjacent(P, a, b)


def stage_map(emb: GLEmbedding, n: int) -> StageMap:
    s = emb.stage(n)
    vmap = {x: subtree_dummy(t) for x, t in s.g_map.items()}
    g = emb.system.expand(n)
    emap = {}
    for e, path in s.p_map.items():
        x0, x1 = g.edges[e]
        emap[e] = (vmap[x0], *path[1:-1], vmap[x1])
    return StageMap(n, vmap, emap)


def validate_stage_map(h: StageMap) -> list[str]:
    out = []
    if len(set(h.vertex_map.values())) != len(h.vertex_map):
        out.append(f"h_{h.n} is not injective on vertices")
    owner: dict = {}
    for e in sorted_labels(h.edge_map):
        walk = h.edge_map[e]
        for a, b in zip(walk, walk[1:]):
            if not _quotient_adjacent(h.n, a, b):
                out.append(f"h_{h.n}({e!r}) steps between non-adjacent {a!r} and {b!r}")
        for u in walk[1:-1]:
            if isinstance(u, Dummy) or u in owner:
                out.append(f"h_{h.n}({e!r}) reuses {u!r}")
            owner[u] = e
    return out


def _collapse(seq) -> tuple:
    out = []
    for x in seq:
        if not out or out[-1] != x:
            out.append(x)
    return tuple(out)


def _bond_down(n: int, u):
    """Bonding from the stage n+1 quotient of the blowup to the stage n quotient."""
    if isinstance(u, Dummy):
        return subtree_dummy(parent(u.rep.addr))
    return subtree_dummy(u.addr) if u.level == n else u


def check_commute(emb: GLEmbedding, n: int, upper: StageMap | None = None, lower: StageMap | None = None) -> Report:
    """Blowup bonding after ``h_{n+1}`` equals ``h_n`` after ``f_n``."""
    rep = Report(f"commute[{emb.system.name}]", stages=(n, n + 1))
    hi = upper or stage_map(emb, n + 1)
    lo = lower or stage_map(emb, n)
    f = emb.system.bonding(n)
    for x in sorted_labels(hi.vertex_map):
        left = _bond_down(n, hi.vertex_map[x])
        right = lo.vertex_map.get(f[x])
        if left != right:
            rep.fail(f"vertex {x!r}: bonding gives {left!r}, h_{n}(f_{n}) gives {right!r}")
    new_edge = emb.system.edge(n + 1)
    for e in sorted_labels(hi.edge_map):
        image = _collapse(_bond_down(n, u) for u in hi.edge_map[e])
        if e == new_edge:
            target = (lo.vertex_map[emb.system.steps[n].at],)
        else:
            target = lo.edge_map.get(e)
        if image != target and image[::-1] != target:
            rep.fail(f"edge {e!r}: bonding gives {image!r}, h_{n}(f_{n}) gives {target!r}")
    return rep


def double_ray_prefix(emb: GLEmbedding, e: Hashable, N: int) -> tuple[BlowupVertex, ...]:
    """``p_N(e)``, a finite piece of the double ray that ``e`` eventually becomes."""
    s = emb.stage(N)
    if e not in s.p_map:
        raise GraphError(f"edge {e!r} is not present at stage {N}")
    return s.p_map[e]


def check_double_rays(emb: GLEmbedding) -> Report:
    """Prefixes strictly nested, two vertices longer per stage, pairwise disjoint."""
    rep = Report(f"double_rays[{emb.system.name}]", stages=(0, emb.horizon))
    for n in range(1, emb.horizon + 1):
        prefixes = {e: double_ray_prefix(emb, e, n) for e in emb.stage(n).p_map}
        for e, path in prefixes.items():
            born = emb.system.steps.index(next(s for s in emb.system.steps if s.edge == e)) + 1
            if len(path) != 3 + 2 * (n - born):
                rep.fail(f"p_{n}({e!r}) has {len(path)} vertices, expected {3 + 2 * (n - born)}")
            if n > born:
                inner = double_ray_prefix(emb, e, n - 1)
                if path[1:-1] != inner:
                    rep.fail(f"p_{n - 1}({e!r}) is not nested inside p_{n}({e!r})")
        for (e1, a), (e2, b) in combinations(sorted(prefixes.items(), key=lambda kv: label_str(kv[0])), 2):
            if set(a) & set(b):
                rep.fail(f"stage {n}: prefixes of {e1!r} and {e2!r} meet")
    return rep


def vertex_threads(emb: GLEmbedding, N: int) -> dict[Vertex, tuple[Vertex, ...]]:
    """For each vertex of ``G_N`` its images ``x_0, .., x_N`` under the bonding maps."""
    out = {}
    for x in emb.stage(N).g_map:
        chain = [x]
        for k in range(N - 1, -1, -1):
            chain.append(emb.system.bonding(k)[chain[-1]])
        out[x] = tuple(reversed(chain))
    return out


def check_vertex_separation(emb: GLEmbedding, N: int) -> Report:
    rep = Report(f"vertex_separation[{emb.system.name}]", stages=(0, N))
    threads = vertex_threads(emb, N)
    for x, y in combinations(sorted_labels(threads), 2):
        stage = next(
            (
                k
                for k in range(N + 1)
                if emb.stage(k).g_map[threads[x][k]] != emb.stage(k).g_map[threads[y][k]]
            ),
            None,
        )
        if stage is None:
            rep.fail(f"threads of {x!r} and {y!r} never separate up to stage {N}")
        else:
            rep.log.append(f"{label_str(x)} / {label_str(y)} separate at stage {stage}")
    return rep


def check_target_locally_finite(emb: GLEmbedding) -> Report:
    """Every blowup vertex the embedding touches has finite degree bounded by its level."""
    rep = Report(f"target_locally_finite[{emb.system.name}]", stages=(0, emb.horizon))
    top = 0
    for path in emb.stages[-1].p_map.values():
        for u in path:
            d = degree_in_blowup(P, u)
            top = max(top, d)
            if d != len(neighbors(P, u)):
                rep.fail(f"{u!r}: degree formula {d} disagrees with its neighbour list")
    rep.log.append(f"maximum blowup degree met: {top}")
    return rep


def to_dot_embedding(emb: GLEmbedding) -> str:
    """The final stage: each path in its own color, all other touched blocks as plain vertices."""
    palette = ["red", "blue", "darkgreen", "orange", "purple", "brown", "magenta", "teal"]
    last = emb.stages[-1]
    verts, edges, colors = set(), {}, {}
    for i, e in enumerate(sorted_labels(last.p_map)):
        path = last.p_map[e]
        verts.update(path)
        for j, (u, w) in enumerate(zip(path, path[1:])):
            key = f"{label_str(e)}#{j}"
            edges[key] = (u, w)
            colors[key] = palette[i % len(palette)]
    for t in last.g_map.values():
        verts.update(block(P, t))
    return to_dot(FiniteMultigraph(frozenset(verts), edges), name=f"embed_gl_{emb.system.name}", edge_colors=colors)


def stage_sizes(emb: GLEmbedding) -> Sequence[tuple[int, int]]:
    return [(len(s.g_map), len(s.p_map)) for s in emb.stages]
