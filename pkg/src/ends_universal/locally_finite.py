"""Lazily explored locally finite graphs and their truncation inverse systems.

A :class:`LazyGraph` is explored by distance classes ``D^0, D^1, ...`` of its
root. Stage ``n`` of the inverse system keeps ``S_n = D^{<n}`` and contracts
every component of ``G - S_n`` to a dummy vertex, deleting new loops but
keeping parallel edges.
"""

from __future__ import annotations

import os
import threading
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Callable, Hashable, Iterable, Mapping

from .multigraph import (
    Dummy,
    FiniteMultigraph,
    GraphError,
    contract_partition,
    min_label,
    simple_edge,
    sort_key,
    sorted_labels,
)
from .report import Report

Vertex = Hashable
RayFn = Callable[[int], Vertex]

DEFAULT_MAX_VERTICES = 10**6


class AsymmetryError(GraphError):
    pass


class HorizonError(GraphError):
    """Component membership near the frontier changed when exploring deeper."""


class ExplorationLimitError(RuntimeError):
    pass


def max_vertices() -> int:
    raw = os.environ.get("ENDS_UNIVERSAL_MAX_VERTICES")
    return int(raw) if raw else DEFAULT_MAX_VERTICES


class LazyGraph:
    """A connected locally finite simple graph given by a neighbour function.

    ``ends`` optionally names some ends of the graph, each by a geodesic ray
    ``k -> vertex at distance k``; these serve as the end oracle in tests.
    """

    def __init__(
        self,
        root: Vertex,
        neighbor_fn: Callable[[Vertex], Iterable[Vertex]],
        name: str = "graph",
        ends: Mapping[str, RayFn] | None = None,
    ):
        self.root = root
        self.name = name
        self.ends: dict[str, RayFn] = dict(ends or {})
        self._neighbor_fn = neighbor_fn
        self._lock = threading.RLock()
        self._nbrs: dict = {}
        self._dist = {root: 0}
        self._layers: list[frozenset] = [frozenset([root])]
        self._memo: dict = {}

    def __repr__(self) -> str:
        return f"LazyGraph({self.name!r}, root={self.root!r})"

    @classmethod
    def from_finite(cls, g: FiniteMultigraph, root: Vertex, name: str = "finite") -> LazyGraph:
        adj = {v: sorted_labels({w for _, w in g.incident(v) if w != v}) for v in g.vertices}
        return cls(root, adj.__getitem__, name=name)

    def neighbors(self, v: Vertex) -> tuple:
        with self._lock:
            if v not in self._nbrs:
                nbrs = list(self._neighbor_fn(v))
                if v in nbrs:
                    raise GraphError(f"{self.name}: vertex {v!r} lists itself as a neighbour")
                if len(set(nbrs)) != len(nbrs):
                    raise GraphError(f"{self.name}: vertex {v!r} lists a neighbour twice")
                self._nbrs[v] = tuple(sorted_labels(nbrs))
            return self._nbrs[v]

    def _explore_to(self, k: int) -> None:
        limit = max_vertices()
        while len(self._layers) <= k:
            nxt = set()
            for v in self._layers[-1]:
                for u in self.neighbors(v):
                    if v not in self.neighbors(u):
                        raise AsymmetryError(
                            f"{self.name}: {v!r} lists neighbour {u!r} but {u!r} does not list {v!r}"
                        )
                    if u not in self._dist:
                        self._dist[u] = len(self._layers)
                        nxt.add(u)
            self._layers.append(frozenset(nxt))
            if len(self._dist) > limit:
                raise ExplorationLimitError(
                    f"{self.name}: exploration exceeded {limit} vertices "
                    "(raise ENDS_UNIVERSAL_MAX_VERTICES to allow more)"
                )

    def layers(self, k: int) -> list[frozenset]:
        """``[D^0, ..., D^k]``; trailing layers are empty for finite graphs."""
        with self._lock:
            self._explore_to(k)
            return self._layers[: k + 1]

    def layer(self, k: int) -> frozenset:
        return self.layers(k)[k] if k >= 0 else frozenset()

    def ball(self, k: int) -> frozenset:
        """``D^{<=k}``."""
        if k < 0:
            return frozenset()
        return frozenset().union(*self.layers(k))

    def distance(self, v: Vertex) -> int:
        with self._lock:
            if v not in self._dist:
                raise GraphError(f"{self.name}: vertex {v!r} has not been explored")
            return self._dist[v]

    def induced(self, vertices: Iterable[Vertex]) -> FiniteMultigraph:
        vs = frozenset(vertices)
        edges = {}
        for v in vs:
            for u in self.neighbors(v):
                if u in vs:
                    edges[simple_edge(u, v)] = simple_edge(u, v)
        return FiniteMultigraph(vs, edges)

    def memo(self, key: Any, compute: Callable[[], Any]) -> Any:
        with self._lock:
            if key not in self._memo:
                self._memo[key] = compute()
            return self._memo[key]


# -- distance-class structure ----------------------------------------------


@dataclass(frozen=True)
class GraphPrefix:
    depth: int
    layers: tuple[frozenset, ...]
    graph: FiniteMultigraph


@dataclass(frozen=True)
class FrontierPiece:
    vertices: frozenset
    parent: int


@dataclass(frozen=True)
class FrontierDecomposition:
    stage: int
    pieces: tuple[FrontierPiece, ...]


def prefix(g: LazyGraph, n: int) -> GraphPrefix:
    if n < 0:
        raise ValueError("depth must be non-negative")
    layers = g.layers(n + 1)
    return GraphPrefix(n, tuple(layers[: n + 1]), g.induced(g.ball(n)))


def cross_edges(g: LazyGraph, n: int) -> list[tuple]:
    """``E(D^n, D^{n+1})`` as ``(x, y)`` pairs with x in D^n, in lexicographic order."""
    nxt = g.layer(n + 1)
    pairs = [(x, y) for x in g.layer(n) for y in g.neighbors(x) if y in nxt]
    return sorted(pairs, key=lambda p: (sort_key(p[0]), sort_key(p[1])))


def inner_edges(g: LazyGraph, n: int) -> list[tuple]:
    """Edges with both ends in ``D^n``, as canonical pairs."""
    layer = g.layer(n)
    return sorted_labels({simple_edge(x, y) for x in layer for y in g.neighbors(x) if y in layer})


def _components_beyond(g: LazyGraph, k: int, horizon: int) -> list[frozenset]:
    """Components of the explored graph induced on ``D^k .. D^horizon``."""
    region = set().union(*g.layers(horizon)[k:]) if horizon >= k else set()
    parent = {v: v for v in region}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for v in region:
        for u in g.neighbors(v):
            if u in region:
                ru, rv = find(u), find(v)
                if ru != rv:
                    parent[ru] = rv
    groups: dict = {}
    for v in region:
        groups.setdefault(find(v), set()).add(v)
    return sorted((frozenset(c) for c in groups.values()), key=lambda c: sort_key(min_label(c)))


def _restricted_partition(blocks: Iterable[frozenset], keep: frozenset) -> set[frozenset]:
    return {b & keep for b in blocks if b & keep}


def component_blocks(g: LazyGraph, k: int) -> list[frozenset]:
    """Components of ``G - D^{<k}`` restricted to ``D^k | D^{k+1}``.

    The partition is computed on the explored graph up to ``D^{k+1}`` and must
    not change when one more layer is explored; otherwise HorizonError.
    """

    def compute():
        window = g.layer(k) | g.layer(k + 1)
        shallow = _components_beyond(g, k, k + 1)
        deep = _restricted_partition(_components_beyond(g, k, k + 2), window)
        if set(shallow) != deep:
            raise HorizonError(
                f"{g.name}: components of G - D^<{k} near the frontier merge beyond depth {k + 1}"
            )
        return shallow

    return g.memo(("blocks", k), compute)


def pieces(g: LazyGraph, k: int) -> list[frozenset]:
    """``C ∩ D^k`` for the components C of ``G - D^{<k}``, by smallest vertex."""
    layer = g.layer(k)
    return [b & layer for b in component_blocks(g, k) if b & layer]


def frontier(g: LazyGraph, n: int) -> FrontierDecomposition:
    if n < 0:
        raise ValueError("stage must be non-negative")
    upper = pieces(g, n)
    index = {v: i for i, h in enumerate(upper) for v in h}
    out = []
    for h in pieces(g, n + 1):
        parents = {index[u] for v in h for u in g.neighbors(v) if u in index}
        if len(parents) != 1:
            raise HorizonError(f"{g.name}: piece {sorted_labels(h)!r} attaches to {len(parents)} parent pieces")
        out.append(FrontierPiece(h, parents.pop()))
    return FrontierDecomposition(n + 1, tuple(out))


# -- truncations -------------------------------------------------------------


@dataclass(frozen=True)
class Truncation:
    stage: int
    graph: FiniteMultigraph
    dummies: Mapping[Dummy, frozenset]
    projection: Mapping[Vertex, Vertex]
    explored: frozenset = field(repr=False)

    @property
    def real(self) -> frozenset:
        return self.graph.vertices - frozenset(self.dummies)

    def to_json_dict(self) -> dict:
        from .multigraph import to_json_dict

        return to_json_dict(self.graph, self.dummies)


def truncation(g: LazyGraph, n: int) -> Truncation:
    """Stage ``n`` graph ``G_n`` with ``S_n = D^{<n}`` (``n >= 1``)."""
    if n < 1:
        raise ValueError("truncation stage must be at least 1")

    def compute():
        kept = g.ball(n - 1)
        blocks = component_blocks(g, n)
        frontier_layer = g.layer(n)
        explored = g.ball(n + 1)
        labels = sorted_labels(kept)
        all_blocks = [frozenset([v]) for v in labels]
        dummies = {}
        for b in blocks:
            d = Dummy(min_label(b & frontier_layer))
            dummies[d] = b
            all_blocks.append(b)
            labels.append(d)
        quotient, qmap = contract_partition(g.induced(explored), all_blocks, labels)
        return Truncation(n, quotient, dummies, dict(qmap.block_of), explored)

    return g.memo(("truncation", n), compute)


@dataclass(frozen=True)
class BondingMap:
    """Map ``G_{n+1} -> G_n``; edges not in ``G_n`` collapse to a vertex."""

    stage: int
    vertex_map: Mapping[Vertex, Vertex]
    edge_map: Mapping[Any, Any]
    collapsed: Mapping[Any, Vertex]


def bonding(g: LazyGraph, n: int) -> BondingMap:
    def compute():
        upper, lower = truncation(g, n + 1), truncation(g, n)
        vmap = {}
        for x in upper.graph.vertices:
            vmap[x] = lower.projection[x.rep if isinstance(x, Dummy) else x]
        emap, collapsed = {}, {}
        for e, (a, _) in upper.graph.edges.items():
            if e in lower.graph.edges:
                emap[e] = e
            else:
                collapsed[e] = vmap[a]
        return BondingMap(n, vmap, emap, collapsed)

    return g.memo(("bonding", n), compute)


def check_truncation(g: LazyGraph, t: Truncation) -> list[str]:
    n = t.stage
    out = []
    loops = [e for e in t.graph.edges if t.graph.is_loop(e)]
    if loops:
        out.append(f"stage {n}: loops present {sorted_labels(loops)!r}")
    if t.real != g.ball(n - 1):
        out.append(f"stage {n}: real vertices differ from D^<{n}")
    expected = len(g.induced(g.ball(n - 1)).edges) + len(cross_edges(g, n - 1))
    if len(t.graph.edges) != expected:
        out.append(f"stage {n}: {len(t.graph.edges)} edges, expected {expected} (parallel edges lost?)")
    if len(t.dummies) != len(pieces(g, n)):
        out.append(f"stage {n}: {len(t.dummies)} dummies for {len(pieces(g, n))} components")
    return out


def check_bonding(upper: Truncation, lower: Truncation, bmap: BondingMap) -> list[str]:
    n = lower.stage
    out = []
    vmap = bmap.vertex_map
    for x in sorted_labels(upper.graph.vertices):
        if x not in vmap:
            out.append(f"stage {n + 1}->{n}: vertex {x!r} unmapped")
        elif vmap[x] not in lower.graph.vertices:
            out.append(f"stage {n + 1}->{n}: {x!r} maps outside G_{n}")
    if out:
        return out
    missed = lower.graph.vertices - set(vmap.values())
    if missed:
        out.append(f"stage {n + 1}->{n}: not surjective, missed {sorted_labels(missed)!r}")
    for x in sorted_labels(lower.real):
        if vmap.get(x) != x:
            out.append(f"stage {n + 1}->{n}: real vertex {x!r} moved to {vmap.get(x)!r}")
    for e in sorted_labels(upper.graph.edges):
        a, b = upper.graph.edges[e]
        if e in bmap.edge_map:
            target = bmap.edge_map[e]
            if target not in lower.graph.edges:
                out.append(f"stage {n + 1}->{n}: edge {e!r} maps to non-edge {target!r}")
            elif sorted_labels(lower.graph.edges[target]) != sorted_labels((vmap[a], vmap[b])):
                out.append(f"stage {n + 1}->{n}: edge {e!r} not compatible with its ends")
        elif e in bmap.collapsed:
            if not vmap[a] == vmap[b] == bmap.collapsed[e]:
                out.append(f"stage {n + 1}->{n}: collapsed edge {e!r} has ends in different blocks")
        else:
            out.append(f"stage {n + 1}->{n}: edge {e!r} unmapped")
    for e in sorted_labels(lower.graph.edges):
        if bmap.edge_map.get(e) != e:
            out.append(f"stage {n + 1}->{n}: edge {e!r} of G_{n} is not fixed")
    for d, block in upper.dummies.items():
        image = vmap[d]
        seen = block & lower.explored
        if image not in lower.dummies or not seen or not seen <= lower.dummies[image]:
            out.append(f"stage {n + 1}->{n}: block of {d!r} not contained in block of {image!r}")
    for x in upper.real - lower.real:
        image = vmap[x]
        if image not in lower.dummies or x not in lower.dummies[image]:
            out.append(f"stage {n + 1}->{n}: {x!r} not inside the block of {image!r}")
    return out


# -- ends --------------------------------------------------------------------


@dataclass(frozen=True)
class EndPrefix:
    """Dummies ``d_1 .. d_N`` of one end, ``d_k`` at stage k."""

    dummies: tuple[Dummy, ...]

    def at(self, k: int) -> Dummy:
        return self.dummies[k - 1]

    def __len__(self) -> int:
        return len(self.dummies)


def end_prefix(g: LazyGraph, end: str | RayFn, n: int) -> EndPrefix:
    ray = g.ends[end] if isinstance(end, str) else end
    out = []
    for k in range(1, n + 1):
        v = ray(k)
        if v not in g.layer(k):
            raise GraphError(f"{g.name}: ray vertex {v!r} is not at distance {k}")
        out.append(truncation(g, k).projection[v])
    return EndPrefix(tuple(out))


def check_end_prefix(g: LazyGraph, ep: EndPrefix) -> list[str]:
    out = []
    for k in range(1, len(ep)):
        image = bonding(g, k).vertex_map.get(ep.at(k + 1))
        if image != ep.at(k):
            out.append(f"stage {k + 1}->{k}: {ep.at(k + 1)!r} maps to {image!r}, not {ep.at(k)!r}")
    return out


def separation_stage(a: EndPrefix, b: EndPrefix) -> int | None:
    for k in range(1, min(len(a), len(b)) + 1):
        if a.at(k) != b.at(k):
            return k
    return None


def check_inverse_system(g: LazyGraph, n: int) -> Report:
    """Finite-stage content of ``|G| = lim G_n`` for stages ``1..n``."""
    rep = Report(f"inverse_system[{g.name}]", stages=(1, n))
    for k in range(1, n + 1):
        t = truncation(g, k)
        rep.witnesses.extend(check_truncation(g, t))
        rep.log.append(
            f"stage {k}: |V|={len(t.graph.vertices)} |E|={len(t.graph.edges)} dummies={len(t.dummies)}"
        )
    for k in range(1, n):
        rep.witnesses.extend(check_bonding(truncation(g, k + 1), truncation(g, k), bonding(g, k)))
    prefixes = {name: end_prefix(g, name, n) for name in sorted(g.ends)}
    for name, ep in prefixes.items():
        rep.witnesses.extend(f"end {name}: {w}" for w in check_end_prefix(g, ep))
    for (na, a), (nb, b) in combinations(prefixes.items(), 2):
        k = separation_stage(a, b)
        if k is None:
            rep.fail(f"ends {na} and {nb} not separated by stage {n}")
        else:
            rep.log.append(f"ends {na}/{nb} separated at stage {k}")
    return rep


# -- builder corpus ------------------------------------------------------------


def ray() -> LazyGraph:
    return LazyGraph(0, lambda v: [v + 1] if v == 0 else [v - 1, v + 1], "ray", {"ray": lambda k: k})


def double_ray() -> LazyGraph:
    return LazyGraph(
        0, lambda v: [v - 1, v + 1], "double_ray", {"+": lambda k: k, "-": lambda k: -k}
    )


def _binary_ends(wrap: Callable[[str], Vertex]) -> dict[str, RayFn]:
    patterns = {"0^w": "0", "01^w": None, "(10)^w": "10", "1^w": "1"}
    ends: dict[str, RayFn] = {}
    for name, unit in patterns.items():
        if unit is None:
            ends[name] = lambda k, wrap=wrap: wrap(("0" + "1" * k)[:k])
        else:
            ends[name] = lambda k, unit=unit, wrap=wrap: wrap((unit * k)[:k])
    return ends


def binary_tree() -> LazyGraph:
    def nbrs(t: str):
        out = [t + "0", t + "1"]
        return out + [t[:-1]] if t else out

    return LazyGraph("", nbrs, "binary_tree", _binary_ends(lambda s: s))


def quadrant_grid() -> LazyGraph:
    def nbrs(v):
        i, j = v
        out = [(i + 1, j), (i, j + 1)]
        if i:
            out.append((i - 1, j))
        if j:
            out.append((i, j - 1))
        return out

    return LazyGraph((0, 0), nbrs, "quadrant_grid", {"axis": lambda k: (k, 0)})


def ladder() -> LazyGraph:
    def nbrs(v):
        i, side = v
        out = [(i + 1, side), (i, 1 - side)]
        return out + [(i - 1, side)] if i else out

    return LazyGraph((0, 0), nbrs, "ladder", {"rail": lambda k: (k, 0)})


def stacked_cliques() -> LazyGraph:
    """Complete graphs K_1, K_2, ... with successive cliques completely joined.

    Vertex ``(m, i)`` is the i-th vertex of ``K_m``.
    """

    def nbrs(v):
        m, i = v
        out = [(m, j) for j in range(m) if j != i]
        if m > 1:
            out += [(m - 1, j) for j in range(m - 1)]
        return out + [(m + 1, j) for j in range(m + 1)]

    return LazyGraph((1, 0), nbrs, "stacked_cliques", {"up": lambda k: (k + 1, 0)})


def stacked_cliques_adjacent(u, v) -> bool:
    (m, i), (k, j) = u, v
    if not (0 <= i < m and 0 <= j < k):
        return False
    return abs(m - k) == 1 or (m == k and i != j)


def single_vertex() -> LazyGraph:
    return LazyGraph(0, lambda v: [], "single_vertex")


def star(leaves: int = 3) -> LazyGraph:
    def nbrs(v):
        return list(range(1, leaves + 1)) if v == 0 else [0]

    return LazyGraph(0, nbrs, f"star{leaves}")


def blowup_lf() -> LazyGraph:
    from .blowup import UNIVERSAL_LF, as_lazy

    return as_lazy(UNIVERSAL_LF)


def blowup_gl() -> LazyGraph:
    from .blowup import UNIVERSAL_GL, as_lazy

    return as_lazy(UNIVERSAL_GL)


def builder_catalog() -> dict[str, Callable[[], LazyGraph]]:
    return {
        "ray": ray,
        "double_ray": double_ray,
        "binary_tree": binary_tree,
        "quadrant_grid": quadrant_grid,
        "ladder": ladder,
        "stacked_cliques": stacked_cliques,
        "blowup_lf": blowup_lf,
        "blowup_gl": blowup_gl,
        "single_vertex": single_vertex,
        "star": star,
    }


def build(name: str) -> LazyGraph:
    catalog = builder_catalog()
    if name not in catalog:
        raise KeyError(f"unknown graph {name!r}; available: {', '.join(sorted(catalog))}")
    return catalog[name]()
