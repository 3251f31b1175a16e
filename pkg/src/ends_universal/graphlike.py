"""Graph-like continua as single-edge uncontraction sequences.

Stage 0 is one vertex with no edges; stage n+1 adds the edge ``e_{n+1}``,
either as a loop or by splitting a vertex in two. Contracting ``e_{n+1}`` in
stage n+1 (keeping loops) gives back stage n label for label.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Callable, Hashable, Mapping, Sequence

from .multigraph import (
    FiniteMultigraph,
    GraphError,
    components,
    contract_edge,
    contract_partition,
    degree,
    is_connected,
    label_str,
    sorted_labels,
)
from .report import Report

Vertex = Hashable
Incidence = tuple  # (edge label, endpoint position 0 or 1)


class SystemError_(GraphError):
    pass


@dataclass(frozen=True)
class UncontractionStep:
    """Add ``edge`` at vertex ``at``.

    A loop step attaches a loop at ``at``. A split step replaces ``at`` by
    ``into = (v, w)``, moves each incidence at ``at`` to v or w according to
    ``assign``, and joins v to w by the new edge (ends stored as ``(v, w)``).
    """

    edge: Hashable
    kind: str
    at: Vertex
    into: tuple | None = None
    assign: Mapping[Incidence, Vertex] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("loop", "split"):
            raise SystemError_(f"unknown step kind {self.kind!r}")
        if self.kind == "split":
            if self.into is None or len(self.into) != 2 or self.into[0] == self.into[1]:
                raise SystemError_(f"split of {self.at!r} needs two distinct target vertices")


def loop(edge, at) -> UncontractionStep:
    return UncontractionStep(edge, "loop", at)


def split(edge, at, into, assign) -> UncontractionStep:
    return UncontractionStep(edge, "split", at, tuple(into), dict(assign))


def apply_step(g: FiniteMultigraph, step: UncontractionStep) -> FiniteMultigraph:
    z = step.at
    if z not in g.vertices:
        raise SystemError_(f"step {step.edge!r}: vertex {z!r} does not exist")
    if step.edge in g.edges or step.edge in g.vertices:
        raise SystemError_(f"step {step.edge!r}: label already in use")
    if step.kind == "loop":
        edges = dict(g.edges)
        edges[step.edge] = (z, z)
        return FiniteMultigraph(g.vertices, edges)
    v, w = step.into
    rest = g.vertices - {z}
    for x in (v, w):
        if x in rest or x in g.edges or x == step.edge:
            raise SystemError_(f"step {step.edge!r}: split target {x!r} is already in use")
    needed = {(e, i) for e, ends in g.edges.items() for i, x in enumerate(ends) if x == z}
    missing = needed - set(step.assign)
    if missing:
        raise SystemError_(
            f"step {step.edge!r}: incidences {sorted_labels(missing)!r} at {z!r} are not assigned"
        )
    extra = set(step.assign) - needed
    if extra:
        raise SystemError_(f"step {step.edge!r}: assignment names foreign incidences {sorted_labels(extra)!r}")
    bad = {t for t in step.assign.values() if t not in (v, w)}
    if bad:
        raise SystemError_(f"step {step.edge!r}: incidences assigned to {sorted_labels(bad)!r}")
    edges = {}
    for e, ends in g.edges.items():
        edges[e] = tuple(step.assign[(e, i)] if x == z else x for i, x in enumerate(ends))
    edges[step.edge] = (v, w)
    return FiniteMultigraph(rest | {v, w}, edges)


class EdgeContractionSystem:
    """An inverse sequence of finite multigraphs with single-edge bonding maps."""

    def __init__(self, steps: Sequence[UncontractionStep], root: Vertex = 0, name: str = "system"):
        self.steps = tuple(steps)
        self.root = root
        self.name = name
        self._lock = threading.Lock()
        self._stages: list[FiniteMultigraph] = [FiniteMultigraph(frozenset([root]), {})]

    def __len__(self) -> int:
        return len(self.steps)

    def __repr__(self) -> str:
        return f"EdgeContractionSystem({self.name!r}, {len(self.steps)} steps)"

    def edge(self, n: int) -> Hashable:
        """Label of ``e_n`` (1-based)."""
        return self.steps[n - 1].edge

    def expand(self, n: int) -> FiniteMultigraph:
        if not 0 <= n <= len(self.steps):
            raise ValueError(f"stage {n} outside 0..{len(self.steps)}")
        with self._lock:
            while len(self._stages) <= n:
                k = len(self._stages)
                self._stages.append(apply_step(self._stages[-1], self.steps[k - 1]))
            return self._stages[n]

    def bonding(self, n: int) -> Mapping[Vertex, Vertex]:
        """Vertex part of ``f_n: G_{n+1} -> G_n``."""
        step = self.steps[n]
        _, q = contract_edge(self.expand(n + 1), step.edge, merged=step.at)
        return q.block_of

    def to_json_dict(self) -> dict:
        steps = []
        for s in self.steps:
            item: dict[str, Any] = {"edge": label_str(s.edge), "kind": s.kind, "at": label_str(s.at)}
            if s.kind == "split":
                item["into"] = [label_str(x) for x in s.into]
                item["assign"] = {
                    f"{label_str(e)}#{i}": label_str(x) for (e, i), x in sorted_labels(s.assign.items())
                }
            steps.append(item)
        return {"name": self.name, "root": label_str(self.root), "steps": steps}

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, ensure_ascii=False)

    @classmethod
    def from_json_dict(cls, data: Mapping[str, Any]) -> EdgeContractionSystem:
        try:
            raw = list(data["steps"])
            steps = []
            for item in raw:
                if item["kind"] == "loop":
                    steps.append(loop(str(item["edge"]), str(item["at"])))
                else:
                    assign = {}
                    for key, target in item.get("assign", {}).items():
                        e, _, pos = str(key).rpartition("#")
                        assign[(e, int(pos))] = str(target)
                    steps.append(split(str(item["edge"]), str(item["at"]), [str(x) for x in item["into"]], assign))
        except (KeyError, TypeError, ValueError) as exc:
            raise SystemError_(f"malformed system JSON: {exc}") from exc
        root = data.get("root")
        if root is None:
            root = steps[0].at if steps else "z"
        return cls(steps, root=str(root), name=str(data.get("name", "system")))

    @classmethod
    def from_json(cls, text: str) -> EdgeContractionSystem:
        return cls.from_json_dict(json.loads(text))


def validate(sys: EdgeContractionSystem, n: int | None = None) -> Report:
    """Check every stage ``k <= n`` against the normal form."""
    n = len(sys) if n is None else min(n, len(sys))
    rep = Report(f"validate[{sys.name}]", stages=(0, n))
    stages = []
    for k in range(n + 1):
        try:
            stages.append(sys.expand(k))
        except GraphError as exc:
            rep.fail(f"stage {k}: {exc}")
            break
    for k, g in enumerate(stages):
        expected = {sys.edge(i) for i in range(1, k + 1)}
        if set(g.edges) != expected:
            rep.fail(f"stage {k}: edge set {sorted_labels(g.edges)!r} is not e_1..e_{k}")
        if len(g.vertices) > k + 1:
            rep.fail(f"stage {k}: {len(g.vertices)} vertices exceed {k + 1}")
        if not is_connected(g):
            rep.fail(f"stage {k}: disconnected")
        for v in sorted_labels(g.vertices):
            if degree(g, v) > 2 * k:
                rep.fail(f"stage {k}: degree of {v!r} is {degree(g, v)} > {2 * k}")
        for e in sorted_labels(g.edges):
            parts = len(components(g.without_edges([e])))
            if parts > 2:
                rep.fail(f"stage {k}: removing {e!r} leaves {parts} components")
        if k:
            step = sys.steps[k - 1]
            try:
                back, _ = contract_edge(g, step.edge, merged=step.at)
            except GraphError as exc:
                rep.fail(f"stage {k}: contracting {step.edge!r} failed: {exc}")
                continue
            if back != stages[k - 1]:
                rep.fail(f"stage {k}: G_{k}/{step.edge!r} differs from G_{k - 1}")
        rep.log.append(f"stage {k}: |V|={len(g.vertices)} |E|={len(g.edges)}")
    return rep


# -- finite-graph oracle -------------------------------------------------------------


def contraction_stages(g: FiniteMultigraph, edge_order: Sequence) -> list[FiniteMultigraph]:
    """Stage k: contract each component of g minus ``e_1..e_k``, keeping e_1..e_k."""
    out = []
    for k in range(len(edge_order) + 1):
        rest = g.without_edges(edge_order[:k])
        quotient, qmap = contract_partition(rest, components(rest))
        label_of = qmap.block_of
        edges = {e: (label_of[g.edges[e][0]], label_of[g.edges[e][1]]) for e in edge_order[:k]}
        out.append(FiniteMultigraph(quotient.vertices, edges))
    return out


def from_finite_graph(
    g: FiniteMultigraph, edge_order: Sequence | None = None, name: str = "finite"
) -> EdgeContractionSystem:
    """Edge-contraction system whose last stage is ``g`` itself."""
    if not g.vertices or not is_connected(g):
        raise GraphError("from_finite_graph needs a non-empty connected graph")
    order = list(edge_order) if edge_order is not None else sorted_labels(g.edges)
    if sorted_labels(order) != sorted_labels(g.edges) or len(set(order)) != len(order):
        raise GraphError("edge_order must enumerate every edge exactly once")
    stages = contraction_stages(g, order)
    steps = []
    for k, e in enumerate(order):
        before, after = stages[k], stages[k + 1]
        a, b = after.edges[e]
        z = _merged_vertex(before, after, e)
        if a == b:
            steps.append(loop(e, a))
            continue
        assign = {}
        for d, ends in before.edges.items():
            for i, x in enumerate(ends):
                if x == z:
                    assign[(d, i)] = after.edges[d][i]
        steps.append(split(e, z, (a, b), assign))
    (root,) = stages[0].vertices
    return EdgeContractionSystem(steps, root=root, name=name)


def _merged_vertex(before: FiniteMultigraph, after: FiniteMultigraph, e) -> Vertex:
    a, b = after.edges[e]
    if a == b:
        return a
    (z,) = before.vertices - (after.vertices - {a, b})
    return z


# -- builders ------------------------------------------------------------------------------


def hawaiian(circles: int) -> EdgeContractionSystem:
    """Hawaiian earring, each circle made of two arcs between the base point 0
    and its own far point.

    Stage 2k-1 adds the k-th circle as a loop ``e_{2k-1}`` at 0; stage 2k
    splits it, sending ``e_{2k-1}#1`` to the new far point k.
    """
    steps = []
    for k in range(1, circles + 1):
        first, second = f"e{2 * k - 1}", f"e{2 * k}"
        steps.append(loop(first, 0))
        assign = {(first, 0): 0, (first, 1): k}
        for j in range(1, k):
            assign[(f"e{2 * j - 1}", 0)] = 0
            assign[(f"e{2 * j}", 0)] = 0
        steps.append(split(second, 0, (0, k), assign))
    return EdgeContractionSystem(steps, root=0, name=f"hawaiian:{circles}")


def sierpinski_graphlike(depth: int) -> EdgeContractionSystem:
    """Graph-like Sierpinski triangle (open hexagons removed).

    Each triangular blob is refined by uncontracting the three middle-third
    segments joining its corner sub-triangles: the first is a loop, the next
    two split off corner 1 and then corner 2. Blobs are refined level by
    level in label order; an incidence at corner c of a blob moves to the
    sub-triangle at corner c.
    """
    steps: list[UncontractionStep] = []
    corner_of: dict[Incidence, int] = {}
    blobs = [0]
    count = 1
    serial = 0
    g = FiniteMultigraph(frozenset([0]), {})
    for _ in range(depth):
        next_blobs = []
        for z in blobs:
            names = []
            for pair in ((0, 1), (1, 2), (0, 2)):
                serial += 1
                names.append((f"s{serial}", pair))
            (m01, _), (m12, _), (m02, _) = names
            at_z = [(e, i) for e, ends in g.edges.items() for i, x in enumerate(ends) if x == z]
            # m01 as a loop at z: end 0 at sub-triangle 0 (its corner 1), end 1 at sub-triangle 1 (corner 0)
            st = loop(m01, z)
            steps.append(st)
            g = apply_step(g, st)
            corner_of[(m01, 0)], corner_of[(m01, 1)] = 1, 0
            sub = {(m01, 0): 0, (m01, 1): 1}
            for inc in at_z:
                sub[inc] = corner_of[inc]
            # sub-triangle 1 splits off along m12 = (z, w1) with z holding {0, 2}
            w1 = count
            count += 1
            assign = {inc: (w1 if part == 1 else z) for inc, part in sub.items()}
            st = split(m12, z, (z, w1), assign)
            steps.append(st)
            g = apply_step(g, st)
            sub[(m12, 0)], sub[(m12, 1)] = 2, 1
            corner_of[(m12, 0)], corner_of[(m12, 1)] = 1, 2
            # sub-triangle 2 splits off along m02 = (z, w2)
            w2 = count
            count += 1
            assign = {inc: (w2 if part == 2 else z) for inc, part in sub.items() if part != 1}
            st = split(m02, z, (z, w2), assign)
            steps.append(st)
            g = apply_step(g, st)
            corner_of[(m02, 0)], corner_of[(m02, 1)] = 2, 0
            next_blobs += [z, w1, w2]
        blobs = sorted(next_blobs)
    return EdgeContractionSystem(steps, root=0, name=f"sierpinski:{depth}")


def cycle_graph(n: int) -> FiniteMultigraph:
    return FiniteMultigraph(frozenset(range(n)), {f"e{i + 1}": (i, (i + 1) % n) for i in range(n)})


def theta_graph() -> FiniteMultigraph:
    """Two branch vertices 0, 1 joined by paths of lengths 1, 2 and 2."""
    return FiniteMultigraph(
        frozenset(range(4)),
        {"e1": (0, 1), "e2": (0, 2), "e3": (2, 1), "e4": (0, 3), "e5": (3, 1)},
    )


def triple_edge_graph() -> FiniteMultigraph:
    """Two vertices joined by three parallel edges."""
    return FiniteMultigraph(frozenset([0, 1]), {"e1": (0, 1), "e2": (0, 1), "e3": (0, 1)})


def dumbbell_graph() -> FiniteMultigraph:
    """Two loops joined by a bar."""
    return FiniteMultigraph(frozenset([0, 1]), {"e1": (0, 0), "e2": (0, 1), "e3": (1, 1)})


def complete_graph(n: int) -> FiniteMultigraph:
    edges = {}
    for i, (a, b) in enumerate(combinations(range(n), 2), start=1):
        edges[f"e{i}"] = (a, b)
    return FiniteMultigraph(frozenset(range(n)), edges)


def _natural(e: str):
    return int(e[1:]) if e[1:].isdigit() else e


def _finite(g: FiniteMultigraph, name: str) -> EdgeContractionSystem:
    return from_finite_graph(g, sorted(g.edges, key=_natural), name=name)


def cycle(n: int) -> EdgeContractionSystem:
    return _finite(cycle_graph(n), f"cycle:{n}")


def theta() -> EdgeContractionSystem:
    return _finite(theta_graph(), "theta")


def builders() -> dict[str, Callable[..., EdgeContractionSystem]]:
    return {
        "hawaiian": hawaiian,
        "sierpinski": sierpinski_graphlike,
        "cycle": cycle,
        "theta": theta,
        "k4": lambda: _finite(complete_graph(4), "k4"),
        "triple_edge": lambda: _finite(triple_edge_graph(), "triple_edge"),
        "dumbbell": lambda: _finite(dumbbell_graph(), "dumbbell"),
    }


def build_system(token: str) -> EdgeContractionSystem:
    """Build from ``name`` or ``name:N`` (e.g. ``hawaiian:8``)."""
    name, _, arg = token.partition(":")
    table = builders()
    if name not in table:
        raise KeyError(f"unknown system {name!r}; available: {', '.join(sorted(table))}")
    if arg:
        try:
            return table[name](int(arg))
        except TypeError:
            raise KeyError(f"system {name!r} takes no parameter") from None
    defaults = {"hawaiian": 8, "sierpinski": 2, "cycle": 5}
    return table[name](defaults[name]) if name in defaults else table[name]()
