"""Blowups of the rooted binary tree.

Every node ``t`` of level ``n`` becomes a complete graph ``K(t)`` on ``s(n)``
vertices, and blocks of adjacent tree nodes are completely joined. Nothing is
materialised globally: queries are address arithmetic, and only bounded
levels are ever built as finite graphs.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable, Iterable, Iterator, NamedTuple

from .locally_finite import LazyGraph, Truncation, _binary_ends, max_vertices
from .multigraph import (
    Dummy,
    FiniteMultigraph,
    GraphError,
    simple_edge,
    sorted_labels,
)
from .report import Report

TreeAddr = str


class PathError(GraphError):
    pass


class BlowupVertex(NamedTuple):
    addr: TreeAddr
    index: int

    @property
    def level(self) -> int:
        return len(self.addr)


@dataclass(frozen=True)
class BlowupParams:
    name: str
    block_size: Callable[[int], int]

    def s(self, level: int) -> int:
        return self.block_size(level)


UNIVERSAL_LF = BlowupParams("universal_lf", lambda n: n + 1)
UNIVERSAL_GL = BlowupParams("universal_gl", lambda n: 2 * n + 1)
PROFILES = {"lf": UNIVERSAL_LF, "gl": UNIVERSAL_GL}


# -- tree addresses ------------------------------------------------------------


def parent(t: TreeAddr) -> TreeAddr:
    if not t:
        raise ValueError("the root has no parent")
    return t[:-1]


def children(t: TreeAddr) -> tuple[TreeAddr, TreeAddr]:
    return t + "0", t + "1"


def tree_leq(t: TreeAddr, u: TreeAddr) -> bool:
    """Tree order: ``t`` lies on the path from the root to ``u``."""
    return u.startswith(t)


def addresses(level: int) -> Iterator[TreeAddr]:
    """Addresses of one level, left to right."""
    for bits in product("01", repeat=level):
        yield "".join(bits)


def descendants(t: TreeAddr, level: int) -> Iterator[TreeAddr]:
    """Descendants of ``t`` at ``level``, left to right."""
    for rest in addresses(level - len(t)):
        yield t + rest


def subtree_dummy(t: TreeAddr) -> Dummy:
    """The dummy ``v_t`` standing for the component ``G[⌊t⌋]``."""
    return Dummy(BlowupVertex(t, 0))


# -- the blowup graph ------------------------------------------------------------


def is_vertex(p: BlowupParams, u) -> bool:
    if not isinstance(u, tuple) or len(u) != 2:
        return False
    addr, index = u
    return (
        isinstance(addr, str)
        and set(addr) <= {"0", "1"}
        and isinstance(index, int)
        and 0 <= index < p.s(len(addr))
    )


def block(p: BlowupParams, t: TreeAddr) -> list[BlowupVertex]:
    return [BlowupVertex(t, i) for i in range(p.s(len(t)))]


def adjacent(p: BlowupParams, u: BlowupVertex, w: BlowupVertex) -> bool:
    if u == w:
        return False
    a, b = u.addr, w.addr
    if a == b:
        return True
    return (len(b) == len(a) + 1 and b.startswith(a)) or (len(a) == len(b) + 1 and a.startswith(b))


def neighbors(p: BlowupParams, u: BlowupVertex) -> list[BlowupVertex]:
    out = [w for w in block(p, u.addr) if w != u]
    if u.addr:
        out += block(p, parent(u.addr))
    for c in children(u.addr):
        out += block(p, c)
    return out


def degree_in_blowup(p: BlowupParams, u: BlowupVertex) -> int:
    k = u.level
    up = p.s(k - 1) if k else 0
    return (p.s(k) - 1) + up + 2 * p.s(k + 1)


def level_vertex_count(p: BlowupParams, n: int) -> int:
    return sum(2**k * p.s(k) for k in range(n + 1))


def _check_cap(count: int) -> None:
    limit = max_vertices()
    if count > limit:
        raise GraphError(f"refusing to build {count} vertices (cap {limit}, see ENDS_UNIVERSAL_MAX_VERTICES)")


def _levels_edges(p: BlowupParams, levels: range) -> dict:
    edges = {}
    for k in levels:
        for t in addresses(k):
            blk = block(p, t)
            for i, u in enumerate(blk):
                for w in blk[i + 1 :]:
                    edges[(u, w)] = (u, w)
            if k + 1 in levels:
                for c in children(t):
                    for u in blk:
                        for w in block(p, c):
                            edges[(u, w)] = (u, w)
    return edges


def level_subgraph(p: BlowupParams, n: int) -> FiniteMultigraph:
    """The finite graph ``G[T^{<=n}]``."""
    if n < 0:
        raise ValueError("level must be non-negative")
    _check_cap(level_vertex_count(p, n))
    verts = [u for k in range(n + 1) for t in addresses(k) for u in block(p, t)]
    return FiniteMultigraph(frozenset(verts), _levels_edges(p, range(n + 1)))


def as_lazy(p: BlowupParams) -> LazyGraph:
    short = {"universal_lf": "lf", "universal_gl": "gl"}.get(p.name, p.name)
    return LazyGraph(
        BlowupVertex("", 0),
        lambda u: neighbors(p, u),
        name=f"blowup_{short}",
        ends=_binary_ends(lambda s: BlowupVertex(s, 0)),
    )


# -- monotone paths ---------------------------------------------------------------


def validate_monotone(p: BlowupParams, path: Iterable[BlowupVertex]) -> list[str]:
    path = list(path)
    out = []
    for u in path:
        if not is_vertex(p, u):
            out.append(f"{u!r} is not a vertex of the blowup")
    if out:
        return out
    if len(set(path)) != len(path):
        out.append("path repeats a vertex")
    levels = [u.level for u in path]
    if len(set(levels)) != len(levels):
        out.append("path meets some level twice")
    for u, w in zip(path, path[1:]):
        if not adjacent(p, u, w):
            out.append(f"{u!r} and {w!r} are not adjacent")
    ordered = sorted(path, key=lambda u: u.level)
    for u, w in zip(ordered, ordered[1:]):
        if not tree_leq(u.addr, w.addr):
            out.append(f"addresses {u.addr!r} and {w.addr!r} are not comparable")
    return out


def monotone_path(
    p: BlowupParams,
    frm: BlowupVertex,
    to: BlowupVertex,
    avoid: Iterable[BlowupVertex] = (),
) -> tuple[BlowupVertex, ...]:
    """Monotone path from ``frm`` down to ``to`` avoiding ``avoid``.

    Requires ``addr(frm) < addr(to)`` strictly in the tree order. With
    ``n = level(frm)``, ``avoid`` must lie in levels ``>= n`` and meet each
    level in at most ``n`` vertices. Each intermediate level contributes the
    lowest free index of the block on the tree path.
    """
    for u in (frm, to):
        if not is_vertex(p, u):
            raise PathError(f"{u!r} is not a vertex of the blowup")
    if frm.addr == to.addr or not tree_leq(frm.addr, to.addr):
        raise PathError(f"addresses {frm.addr!r} and {to.addr!r} are not strictly comparable")
    avoid = set(avoid)
    n = frm.level
    per_level: dict[int, int] = {}
    for x in avoid:
        if x.level < n:
            raise PathError(f"avoided vertex {x!r} lies above level {n}")
        per_level[x.level] = per_level.get(x.level, 0) + 1
    crowded = {k: c for k, c in per_level.items() if c > n}
    if crowded:
        raise PathError(f"avoid set exceeds {n} vertices on levels {sorted(crowded)}")
    if frm in avoid or to in avoid:
        raise PathError("path endpoints may not be avoided")
    path = [frm]
    for k in range(n + 1, to.level):
        t = to.addr[:k]
        free = next((u for u in block(p, t) if u not in avoid), None)
        assert free is not None, f"block {t!r} exhausted despite the per-level bound"
        path.append(free)
    path.append(to)
    return tuple(path)


# -- truncations of the blowup and of the tree --------------------------------------


def blowup_quotient(p: BlowupParams, k: int) -> Truncation:
    """Contract every component of ``G - G[T^{<k}]``; dummies are ``v_t``, t in T^k."""
    if k < 0:
        raise ValueError("cut level must be non-negative")
    _check_cap(level_vertex_count(p, k))
    real = [u for j in range(k) for t in addresses(j) for u in block(p, t)]
    edges = _levels_edges(p, range(k))
    dummies, projection = {}, {u: u for u in real}
    for t in addresses(k):
        d = subtree_dummy(t)
        members = block(p, t) + [u for c in children(t) for u in block(p, c)]
        dummies[d] = frozenset(members)
        for u in members:
            projection[u] = d
        if k:
            for u in block(p, parent(t)):
                for w in block(p, t):
                    edges[simple_edge(u, w)] = (u, d)
    graph = FiniteMultigraph(frozenset(real) | frozenset(dummies), edges)
    explored = frozenset(projection)
    return Truncation(k, graph, dummies, projection, explored)


def blowup_truncation(p: BlowupParams, n: int) -> Truncation:
    """``G_n``: contract the components of ``G - G[T^{<=n}]``; one dummy per t in T^{n+1}."""
    if n < 0:
        raise ValueError("level must be non-negative")
    return blowup_quotient(p, n + 1)


def tree_truncation(n: int) -> Truncation:
    """``T_n``: the binary tree with every component of ``T - T^{<=n}`` contracted."""
    real = [t for k in range(n + 1) for t in addresses(k)]
    edges, dummies, projection = {}, {}, {t: t for t in real}
    for t in real:
        if t:
            edges[simple_edge(parent(t), t)] = (parent(t), t)
    for t in addresses(n + 1):
        d = Dummy(t)
        members = [t, *children(t)]
        dummies[d] = frozenset(members)
        for u in members:
            projection[u] = d
        if t:
            edges[simple_edge(parent(t), t)] = (parent(t), d)
    graph = FiniteMultigraph(frozenset(real) | frozenset(dummies), edges)
    return Truncation(n + 1, graph, dummies, projection, frozenset(projection))


def check_star_bijection(p: BlowupParams, n: int) -> Report:
    """The block-collapsing map ``b_n: G_n -> T_n`` and its action on dummies."""
    rep = Report(f"star_bijection[{p.name}]", stages=(n, n))
    big, tree = blowup_truncation(p, n), tree_truncation(n)
    image = {}
    for x in sorted_labels(big.graph.vertices):
        if isinstance(x, Dummy):
            targets = {tree.projection[u.addr] for u in big.dummies[x]}
            if len(targets) != 1:
                rep.fail(f"dummy {x!r} meets several tree blocks {sorted_labels(targets)!r}")
                continue
            image[x] = targets.pop()
        else:
            image[x] = tree.projection[x.addr]
    if not rep.ok:
        return rep
    missed = tree.graph.vertices - set(image.values())
    if missed:
        rep.fail(f"b_{n} misses tree vertices {sorted_labels(missed)!r}")
    tree_adj = {frozenset(ends) for ends in tree.graph.edges.values()}
    for e, (a, b) in big.graph.edges.items():
        fa, fb = image[a], image[b]
        if fa != fb and frozenset((fa, fb)) not in tree_adj:
            rep.fail(f"edge {e!r} maps to non-adjacent {fa!r}, {fb!r}")
    big_dummies = sorted_labels(big.dummies)
    dummy_images = [image[d] for d in big_dummies]
    if any(not isinstance(y, Dummy) for y in dummy_images):
        rep.fail("some dummy of G_n maps to a real vertex of T_n")
    if len(set(dummy_images)) != len(dummy_images):
        rep.fail("b_n is not injective on dummies")
    if set(dummy_images) != set(tree.dummies):
        rep.fail("b_n does not hit every dummy of T_n")
    rep.log.append(f"|dummies(G_{n})|={len(big.dummies)} |dummies(T_{n})|={len(tree.dummies)}")
    return rep
