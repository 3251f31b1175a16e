"""Named verification suites returning JSON-serializable reports."""

from __future__ import annotations

from itertools import combinations
from typing import Callable, Sequence

from . import embed_gl, embed_lf
from .blowup import PROFILES, blowup_truncation, check_star_bijection
from .graphlike import EdgeContractionSystem, build_system
from .graphlike import validate as validate_system
from .locally_finite import LazyGraph, build, check_inverse_system, end_prefix
from .multigraph import GraphError
from .report import Report


def _graph(graph: str | LazyGraph) -> LazyGraph:
    return build(graph) if isinstance(graph, str) else graph


def _system(system: str | EdgeContractionSystem) -> EdgeContractionSystem:
    return build_system(system) if isinstance(system, str) else system


def suite_inverse_system(graph: str | LazyGraph, N: int) -> Report:
    g = _graph(graph)
    rep = Report(f"suite_inverse_system[{g.name}]", stages=(1, N))
    rep.merge(check_inverse_system(g, N))
    return rep


def suite_thm32(graph: str | LazyGraph, N: int, level_fn: Sequence[int] | None = None) -> Report:
    """Blowup embedding: placement, disjoint routing, extension, separation of components and ends."""
    g = _graph(graph)
    rep = Report(f"suite_thm32[{g.name}]", stages=(0, N))
    expected = embed_lf.level_function(g, "thm32", N).values
    if level_fn is None:
        level_fn = expected
    elif tuple(level_fn[: len(expected)]) != expected:
        rep.log.append(f"level function overridden: {list(level_fn)} instead of {list(expected)}")
    try:
        state = embed_lf.embed(g, N, level_fn=level_fn)
    except embed_lf.CapacityError as exc:
        rep.fail(f"construction failed: {exc}")
        return rep
    rep.log.append(f"h = {list(state.h)}")
    rep.log.extend(state.log)
    for line in state.log:
        if "exceeds" in line:
            rep.fail(line)
    rep.witnesses.extend(embed_lf.validate_embedding(state))
    rep.witnesses.extend(embed_lf.check_extension(state))
    for k in range(state.depth + 1):
        rep.merge(embed_lf.verify_star(state, k))
    if state.depth >= 1 and g.ends:
        lifted = {name: embed_lf.lift_end(state, end_prefix(g, name, state.depth)) for name in sorted(g.ends)}
        for name, chain in lifted.items():
            rep.witnesses.extend(f"end {name}: {w}" for w in embed_lf.check_lift(state, chain))
        for (na, a), (nb, b) in combinations(lifted.items(), 2):
            if a[-1] == b[-1]:
                rep.fail(f"lifted ends {na} and {nb} coincide at stage {state.depth}")
    return rep


def suite_prop31(graph: str | LazyGraph, N: int) -> Report:
    """Warm-up embedding into the stacked cliques."""
    g = _graph(graph)
    rep = Report(f"suite_prop31[{g.name}]", stages=(0, N))
    try:
        emb = embed_lf.warmup_embed(g, N)
    except embed_lf.CapacityError as exc:
        rep.fail(f"construction failed: {exc}")
        return rep
    rep.log.append(f"h = {list(emb.h)}")
    rep.witnesses.extend(embed_lf.validate_warmup(emb))
    rep.witnesses.extend(embed_lf.check_warmup_extension(emb))
    return rep


def suite_thm42(
    system: str | EdgeContractionSystem,
    N: int | None = None,
    emb: embed_gl.GLEmbedding | None = None,
) -> Report:
    """Graph-like embedding: placement, disjoint growing paths, stage maps and commuting squares."""
    sys = emb.system if emb is not None else _system(system)
    N = len(sys) if N is None else N
    rep = Report(f"suite_thm42[{sys.name}]", stages=(0, N))
    rep.merge(validate_system(sys, N))
    if not rep.ok:
        return rep
    if emb is None:
        try:
            emb = embed_gl.run(sys, N)
        except embed_lf.CapacityError as exc:
            rep.fail(f"construction failed: {exc}")
            return rep
    rep.merge(embed_gl.validate(emb))
    maps = [embed_gl.stage_map(emb, n) for n in range(emb.horizon + 1)]
    for h in maps:
        rep.witnesses.extend(embed_gl.validate_stage_map(h))
    for n in range(emb.horizon):
        rep.merge(embed_gl.check_commute(emb, n, maps[n + 1], maps[n]))
    rep.merge(embed_gl.check_double_rays(emb))
    rep.merge(embed_gl.check_vertex_separation(emb, emb.horizon))
    rep.merge(embed_gl.check_target_locally_finite(emb))
    return rep


def suite_star(profile: str, N: int) -> Report:
    """Dummies of the blowup truncations against those of the tree truncations."""
    if profile not in PROFILES:
        raise GraphError(f"unknown profile {profile!r}; available: {', '.join(sorted(PROFILES))}")
    p = PROFILES[profile]
    rep = Report(f"suite_star[{profile}]", stages=(0, N))
    for n in range(N + 1):
        rep.merge(check_star_bijection(p, n))
        count = len(blowup_truncation(p, n).dummies)
        if count != 2 ** (n + 1):
            rep.fail(f"stage {n}: {count} dummies, expected {2 ** (n + 1)}")
    return rep


GRAPH_SUITES: dict[str, Callable[..., Report]] = {
    "inverse": suite_inverse_system,
    "thm32": suite_thm32,
    "prop31": suite_prop31,
}
SYSTEM_SUITES: dict[str, Callable[..., Report]] = {"thm42": suite_thm42}
PROFILE_SUITES: dict[str, Callable[..., Report]] = {"star": suite_star}


def suite_names() -> list[str]:
    return sorted([*GRAPH_SUITES, *SYSTEM_SUITES, *PROFILE_SUITES])
