"""Command-line entry point: generate, truncate, embed, verify and export."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from . import embed_gl, embed_lf, verify
from .blowup import PROFILES, blowup_quotient, level_subgraph
from .graphlike import EdgeContractionSystem, build_system
from .locally_finite import build, truncation
from .multigraph import GraphError, to_dot, to_json


class UsageError(Exception):
    pass


def _dump(data: dict) -> str:
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _emit(text: str, out: str | None) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _graph(name: str):
    try:
        return build(name)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None


def _system(token: str) -> EdgeContractionSystem:
    try:
        return build_system(token)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    except ValueError:
        raise UsageError(f"bad system parameter in {token!r}") from None


def _profile(name: str):
    if name not in PROFILES:
        raise UsageError(f"unknown profile {name!r}; available: {', '.join(sorted(PROFILES))}")
    return PROFILES[name]


def _nonneg(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return value


def cmd_gen(args) -> int:
    if args.kind == "blowup":
        g = level_subgraph(_profile(args.profile), args.depth)
        name = f"blowup_{args.profile}_{args.depth}"
    elif args.kind == "graph":
        if not args.name:
            raise UsageError("gen graph needs --name")
        lazy = _graph(args.name)
        g = lazy.induced(lazy.ball(args.depth))
        name = f"{args.name}_{args.depth}"
    else:
        if not args.name:
            raise UsageError("gen system needs --name")
        sysm = _system(args.name)
        if args.format == "json":
            _emit(sysm.to_json(), args.out)
            return 0
        g = sysm.expand(len(sysm))
        name = sysm.name.replace(":", "_")
    _emit(to_dot(g, name=name) if args.format == "dot" else to_json(g), args.out)
    return 0


def cmd_truncate(args) -> int:
    if bool(args.graph) == bool(args.profile):
        raise UsageError("truncate needs exactly one of --graph or --profile")
    if args.graph:
        if args.stage < 1:
            raise UsageError("graph truncations start at stage 1")
        t = truncation(_graph(args.graph), args.stage)
        name = f"{args.graph}_trunc_{args.stage}"
    else:
        t = blowup_quotient(_profile(args.profile), args.stage)
        name = f"blowup_{args.profile}_trunc_{args.stage}"
    if args.format == "dot":
        _emit(to_dot(t.graph, name=name, dummies=t.dummies), args.out)
    else:
        _emit(to_json(t.graph, t.dummies), args.out)
    return 0


def cmd_embed(args) -> int:
    g = _graph(args.graph)
    if args.target == "stacked":
        emb = embed_lf.warmup_embed(g, args.depth)
        if args.emit == "dot":
            raise UsageError("dot output is only available for the lf-blowup target")
        _emit(_dump(emb.to_json_dict()), args.out)
        return 0 if not embed_lf.validate_warmup(emb) else 1
    state = embed_lf.embed(g, args.depth)
    if args.emit == "dot":
        _emit(embed_lf.to_dot_embedding(state), args.out)
    else:
        _emit(_dump(state.to_json_dict()), args.out)
    return 0 if not embed_lf.validate_embedding(state) else 1


def cmd_embed_gl(args) -> int:
    sysm = _system(args.system)
    horizon = len(sysm) if args.horizon is None else args.horizon
    if horizon > len(sysm):
        raise UsageError(f"system {sysm.name} has only {len(sysm)} stages")
    emb = embed_gl.run(sysm, horizon)
    if args.emit == "dot":
        _emit(embed_gl.to_dot_embedding(emb), args.out)
    else:
        _emit(_dump(emb.to_json_dict()), args.out)
    return 0 if embed_gl.validate(emb).ok else 1


def cmd_verify(args) -> int:
    suite = args.suite
    if suite in verify.GRAPH_SUITES:
        if not args.graph:
            raise UsageError(f"suite {suite} needs --graph")
        rep = verify.GRAPH_SUITES[suite](_graph(args.graph), args.depth if args.depth is not None else 4)
    elif suite in verify.SYSTEM_SUITES:
        if not args.system:
            raise UsageError(f"suite {suite} needs --system")
        rep = verify.SYSTEM_SUITES[suite](_system(args.system), args.depth)
    elif suite in verify.PROFILE_SUITES:
        rep = verify.PROFILE_SUITES[suite](args.profile or "lf", args.depth if args.depth is not None else 6)
    else:
        raise UsageError(f"unknown suite {suite!r}; available: {', '.join(verify.suite_names())}")
    _emit(rep.to_json(), args.out)
    print(str(rep).splitlines()[0], file=sys.stderr)
    return 0 if rep.ok else 1


def cmd_export(args) -> int:
    sysm = _system(args.system)
    stage = len(sysm) if args.stage is None else args.stage
    if stage > len(sysm):
        raise UsageError(f"system {sysm.name} has only {len(sysm)} stages")
    g = sysm.expand(stage)
    text = to_dot(g, name=f"{sysm.name.replace(':', '_')}_{stage}") if args.format == "dot" else to_json(g)
    _emit(text, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ends-universal", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a finite blowup level graph, graph ball or system")
    p.add_argument("kind", choices=["blowup", "graph", "system"])
    p.add_argument("--profile", default="lf")
    p.add_argument("--name", help="graph or system name")
    p.add_argument("--depth", type=_nonneg, default=2)
    p.add_argument("--format", choices=["dot", "json"], default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("truncate", help="truncation of a graph or a blowup")
    p.add_argument("--graph")
    p.add_argument("--profile")
    p.add_argument("--stage", type=_nonneg, required=True)
    p.add_argument("--format", choices=["dot", "json"], default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_truncate)

    p = sub.add_parser("embed", help="embed a locally finite graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--depth", type=_nonneg, required=True)
    p.add_argument("--target", choices=["lf-blowup", "stacked"], default="lf-blowup")
    p.add_argument("--emit", choices=["json", "dot"], default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("embed-gl", help="embed an edge-contraction system")
    p.add_argument("--system", required=True)
    p.add_argument("--horizon", type=_nonneg)
    p.add_argument("--emit", choices=["json", "dot"], default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_embed_gl)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", required=True)
    p.add_argument("--graph")
    p.add_argument("--system")
    p.add_argument("--profile")
    p.add_argument("--depth", type=_nonneg)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("export", help="export one stage of a system")
    p.add_argument("--system", required=True)
    p.add_argument("--stage", type=_nonneg)
    p.add_argument("--format", choices=["dot", "json"], default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_export)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (GraphError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
