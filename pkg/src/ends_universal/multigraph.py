"""Finite multigraphs with opaque labels, loops and parallel edges.

Edges keep their labels through every contraction, so stage-to-stage
comparisons are plain label equality rather than isomorphism tests.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType
from typing import Any, Hashable, Iterable, Mapping, Sequence

Label = Hashable


class GraphError(ValueError):
    """Raised on malformed graphs or invalid arguments to graph operations."""


@dataclass(frozen=True, order=False)
class Dummy:
    """Quotient vertex standing for a contracted component.

    ``rep`` is the smallest vertex of the component it stands for.
    """

    rep: Any

    def __repr__(self) -> str:
        return f"Dummy({self.rep!r})"


def sort_key(x: Any) -> tuple:
    """Total order over the label types used in this package."""
    if isinstance(x, bool):
        return (0, int(x))
    if isinstance(x, int):
        return (0, x)
    if isinstance(x, str):
        return (1, x)
    if isinstance(x, tuple):
        return (2, tuple(sort_key(y) for y in x))
    if isinstance(x, Dummy):
        return (3, sort_key(x.rep))
    if isinstance(x, frozenset):
        return (4, tuple(sorted(sort_key(y) for y in x)))
    return (9, type(x).__name__, repr(x))


def sorted_labels(xs: Iterable[Any]) -> list:
    return sorted(xs, key=sort_key)


def min_label(xs: Iterable[Any]) -> Any:
    return min(xs, key=sort_key)


def simple_edge(u: Any, v: Any) -> tuple:
    """Canonical label of the edge uv in a simple graph."""
    return (u, v) if sort_key(u) <= sort_key(v) else (v, u)


def label_str(x: Any) -> str:
    """Readable string for a label, used by the JSON and DOT writers."""
    if isinstance(x, str):
        return x
    if isinstance(x, Dummy):
        return f"[{label_str(x.rep)}]"
    if hasattr(x, "addr") and hasattr(x, "index"):
        return f"{x.addr or 'ε'}:{x.index}"
    if isinstance(x, tuple):
        return "(" + ",".join(label_str(y) for y in x) + ")"
    return str(x)


@dataclass(frozen=True, eq=False)
class FiniteMultigraph:
    """A finite multigraph.

    ``edges`` maps each edge label to its ordered endpoint pair; a loop
    repeats its vertex. The order of the pair only names the two endpoint
    incidences (``e#0``, ``e#1``); equality treats edges as unordered.
    """

    vertices: frozenset
    edges: Mapping[Label, tuple] = field(default_factory=dict)

    def __post_init__(self) -> None:
        verts = frozenset(self.vertices)
        edges = {}
        for e, ends in dict(self.edges).items():
            ends = tuple(ends)
            if len(ends) != 2:
                raise GraphError(f"edge {e!r} must have exactly two ends, got {ends!r}")
            for x in ends:
                if x not in verts:
                    raise GraphError(f"edge {e!r} has endpoint {x!r} outside the vertex set")
            edges[e] = ends
        clash = verts.intersection(edges)
        if clash:
            raise GraphError(f"labels used both as vertex and edge: {sorted_labels(clash)!r}")
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", MappingProxyType(edges))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FiniteMultigraph):
            return NotImplemented
        return self.vertices == other.vertices and self._canonical_edges == other._canonical_edges

    def __hash__(self) -> int:
        return hash((self.vertices, frozenset(self._canonical_edges.items())))

    def __repr__(self) -> str:
        return f"FiniteMultigraph(|V|={len(self.vertices)}, |E|={len(self.edges)})"

    @cached_property
    def _canonical_edges(self) -> dict:
        return {e: tuple(sorted(ends, key=sort_key)) for e, ends in self.edges.items()}

    @cached_property
    def _incidence(self) -> dict:
        inc: dict = {v: [] for v in self.vertices}
        for e, (a, b) in self.edges.items():
            inc[a].append((e, b))
            if a != b:
                inc[b].append((e, a))
        return inc

    def incident(self, v: Label) -> list:
        """``(edge, other end)`` pairs at ``v``; a loop is listed once."""
        if v not in self.vertices:
            raise GraphError(f"unknown vertex {v!r}")
        return list(self._incidence[v])

    def neighbors(self, v: Label) -> set:
        return {w for _, w in self.incident(v)}

    def is_loop(self, e: Label) -> bool:
        a, b = self.edges[e]
        return a == b

    def without_edges(self, drop: Iterable[Label]) -> FiniteMultigraph:
        drop = set(drop)
        return FiniteMultigraph(self.vertices, {e: ends for e, ends in self.edges.items() if e not in drop})

    def relabel(self, mapping: Mapping[Label, Label]) -> FiniteMultigraph:
        """Rename vertices; labels missing from ``mapping`` are kept."""
        f = lambda x: mapping.get(x, x)  # noqa: E731
        verts = {f(v) for v in self.vertices}
        if len(verts) != len(self.vertices):
            raise GraphError("vertex relabelling is not injective")
        return FiniteMultigraph(verts, {e: (f(a), f(b)) for e, (a, b) in self.edges.items()})


@dataclass(frozen=True)
class QuotientMap:
    block_of: Mapping[Label, Label]
    kept_edges: frozenset
    dropped_loops: frozenset


def components(g: FiniteMultigraph) -> list[frozenset]:
    """Connected components, ordered by their smallest vertex."""
    seen: set = set()
    out = []
    for start in sorted_labels(g.vertices):
        if start in seen:
            continue
        comp = {start}
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for _, w in g._incidence[v]:
                if w not in comp:
                    comp.add(w)
                    queue.append(w)
        seen |= comp
        out.append(frozenset(comp))
    return out


def is_connected(g: FiniteMultigraph) -> bool:
    return len(components(g)) <= 1


def bfs_layers(g: FiniteMultigraph, root: Label) -> list[frozenset]:
    """Distance classes of ``root``: layer k holds the vertices at distance k."""
    if root not in g.vertices:
        raise GraphError(f"root {root!r} is not a vertex")
    dist = {root: 0}
    layers = [[root]]
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for _, w in g._incidence[v]:
            if w not in dist:
                dist[w] = dist[v] + 1
                if dist[w] == len(layers):
                    layers.append([])
                layers[dist[w]].append(w)
                queue.append(w)
    if len(dist) != len(g.vertices):
        unreached = min_label(g.vertices - dist.keys())
        raise GraphError(f"graph is disconnected: {unreached!r} is unreachable from {root!r}")
    return [frozenset(layer) for layer in layers]


def edge_cut(g: FiniteMultigraph, a: Iterable[Label], b: Iterable[Label]) -> frozenset:
    """Edges with one end in ``a`` and the other in ``b``."""
    a, b = set(a), set(b)
    if a & b:
        raise GraphError(f"vertex sets overlap in {sorted_labels(a & b)!r}")
    for x in a | b:
        if x not in g.vertices:
            raise GraphError(f"unknown vertex {x!r}")
    return frozenset(
        e for e, (x, y) in g.edges.items() if (x in a and y in b) or (x in b and y in a)
    )


def degree(g: FiniteMultigraph, v: Label) -> int:
    """Number of edge-end incidences at ``v``; a loop counts twice."""
    if v not in g.vertices:
        raise GraphError(f"unknown vertex {v!r}")
    return sum(2 if w == v else 1 for _, w in g._incidence[v])


def contract_partition(
    g: FiniteMultigraph,
    blocks: Iterable[Iterable[Label]],
    labels: Sequence[Label] | None = None,
) -> tuple[FiniteMultigraph, QuotientMap]:
    """Contract each block to a vertex, deleting the loops this creates.

    Parallel edges between distinct blocks survive with their labels. A
    block is named by its smallest vertex unless ``labels`` gives names.
    """
    blocks = [frozenset(b) for b in blocks]
    block_of: dict = {}
    for i, blk in enumerate(blocks):
        if not blk:
            raise GraphError("empty block in partition")
        for v in blk:
            if v not in g.vertices:
                raise GraphError(f"block contains unknown vertex {v!r}")
            if v in block_of:
                raise GraphError(f"vertex {v!r} lies in two blocks")
            block_of[v] = i
    if len(block_of) != len(g.vertices):
        missing = min_label(g.vertices - block_of.keys())
        raise GraphError(f"blocks do not cover vertex {missing!r}")
    if labels is None:
        names = [min_label(b) for b in blocks]
    else:
        names = list(labels)
        if len(names) != len(blocks) or len(set(names)) != len(names):
            raise GraphError("block labels must be distinct, one per block")
    name_of = {v: names[i] for v, i in block_of.items()}
    kept, dropped = {}, set()
    for e, (a, b) in g.edges.items():
        if block_of[a] == block_of[b]:
            dropped.add(e)
        else:
            kept[e] = (name_of[a], name_of[b])
    quotient = FiniteMultigraph(frozenset(names), kept)
    return quotient, QuotientMap(MappingProxyType(name_of), frozenset(kept), frozenset(dropped))


def contract_edge(
    g: FiniteMultigraph, e: Label, merged: Label | None = None
) -> tuple[FiniteMultigraph, QuotientMap]:
    """Contract the single edge ``e``, keeping every loop that results.

    The merged vertex is named ``merged`` if given, else the smaller of the
    two endpoints. Contracting a loop simply deletes it.
    """
    if e not in g.edges:
        raise GraphError(f"unknown edge {e!r}")
    a, b = g.edges[e]
    if merged is None:
        merged = min_label((a, b))
    others = g.vertices - {a, b}
    if merged in others or (merged in g.edges and merged != e):
        raise GraphError(f"merged label {merged!r} is already in use")
    f = {v: v for v in others}
    f[a] = f[b] = merged
    edges = {d: (f[x], f[y]) for d, (x, y) in g.edges.items() if d != e}
    quotient = FiniteMultigraph(others | {merged}, edges)
    return quotient, QuotientMap(MappingProxyType(f), frozenset(edges), frozenset({e}))


# -- serialisation ---------------------------------------------------------


def to_json_dict(g: FiniteMultigraph, dummies: Iterable[Label] = ()) -> dict:
    out: dict = {
        "vertices": [label_str(v) for v in sorted_labels(g.vertices)],
        "edges": [
            {"id": label_str(e), "ends": [label_str(x) for x in g.edges[e]]}
            for e in sorted_labels(g.edges)
        ],
    }
    dummies = sorted_labels(dummies)
    if dummies:
        out["dummies"] = [label_str(d) for d in dummies]
    return out


def to_json(g: FiniteMultigraph, dummies: Iterable[Label] = ()) -> str:
    return json.dumps(to_json_dict(g, dummies), indent=2, ensure_ascii=False)


def from_json_dict(data: Mapping[str, Any]) -> FiniteMultigraph:
    try:
        verts = [str(v) for v in data["vertices"]]
        edges = {}
        for item in data.get("edges", []):
            ends = [str(x) for x in item["ends"]]
            if str(item["id"]) in edges:
                raise GraphError(f"duplicate edge id {item['id']!r}")
            edges[str(item["id"])] = tuple(ends)
    except (KeyError, TypeError) as exc:
        raise GraphError(f"malformed graph JSON: {exc}") from exc
    if len(set(verts)) != len(verts):
        raise GraphError("duplicate vertex label in graph JSON")
    return FiniteMultigraph(frozenset(verts), edges)


def from_json(text: str) -> FiniteMultigraph:
    return from_json_dict(json.loads(text))


def _dot_id(x: Any) -> str:
    return json.dumps(label_str(x), ensure_ascii=False)


def to_dot(
    g: FiniteMultigraph,
    name: str = "G",
    dummies: Iterable[Label] = (),
    edge_colors: Mapping[Label, str] | None = None,
) -> str:
    """Graphviz source; every edge, parallel or loop, gets its own statement."""
    dummies = set(dummies)
    edge_colors = edge_colors or {}
    lines = [f"graph {json.dumps(name)} {{"]
    for v in sorted_labels(g.vertices):
        attrs = ' [shape=box, style=dashed]' if v in dummies else ""
        lines.append(f"  {_dot_id(v)}{attrs};")
    for e in sorted_labels(g.edges):
        a, b = g.edges[e]
        attrs = [f"label={_dot_id(e)}"]
        if e in edge_colors:
            attrs.append(f"color={json.dumps(edge_colors[e])}")
        lines.append(f"  {_dot_id(a)} -- {_dot_id(b)} [{', '.join(attrs)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
