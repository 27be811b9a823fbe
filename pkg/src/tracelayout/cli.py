"""Command line interface.

Four modes: render (one scene as SVG), animate (a whole trace as a
bundle), validate (spec diagnostics) and states (the ordered trace
axis). Parse, validation and layout problems exit with 1, I/O problems
with 2. Identical invocations write byte-identical artifacts.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from .engine import Scene, layout_scene
from .errors import TraceLayoutError
from .export import build_bundle, scene_to_json, scene_to_svg
from .instance import Instance, parse_instance_xml, state_order
from .layoutspec import LayoutSpec, parse_spec, validate_spec
from .projection import project
from .transitions import diff_scenes, plan_animated, plan_basic, plan_connection_update

ASSETS_ENV_VAR = "TRACE_LAYOUT_ASSETS"

MANAGERS = {
    "basic": plan_basic,
    "animation": plan_animated,
    "connection": plan_connection_update,
}


@dataclass
class RunConfig:
    mode: str  # render, animate, validate or states
    trace_path: str
    spec_path: str | None = None
    project_sig: str | None = None
    state_atom: str | None = None
    manager: str = "animation"
    duration_ms: float = 1000.0
    fps: float = 30.0
    seed: int | None = None
    draw_base_edges: bool = False
    out_path: str | None = None
    format: str = "svg"  # render output: svg or json


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _read_text(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _write_out(out_path: str | None, data: bytes) -> None:
    if out_path is None or out_path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        Path(out_path).write_bytes(data)


def _asset_dirs(spec_path: str | None) -> list[Path]:
    dirs = []
    env = os.environ.get(ASSETS_ENV_VAR, "")
    for part in env.split(os.pathsep):
        if part:
            dirs.append(Path(part))
    if spec_path is not None:
        dirs.append(Path(spec_path).resolve().parent)
    dirs.append(Path.cwd())
    return dirs


def _collect_assets(
    scenes: list[Scene], spec_path: str | None
) -> tuple[dict[str, bytes], list[str]]:
    names = sorted({n.img for s in scenes for n in s.nodes if n.img is not None})
    dirs = _asset_dirs(spec_path)
    found: dict[str, bytes] = {}
    missing: list[str] = []
    for name in names:
        for directory in dirs:
            candidate = directory / name
            if candidate.is_file():
                found[name] = candidate.read_bytes()
                break
        else:
            missing.append(name)
    return found, missing


def _resolve_atom(instance: Instance, sig_ref: str, wanted: str | None):
    """Pick the projection atom: the requested one, or the first in order."""
    order = state_order(instance, sig_ref)
    if not order.atoms:
        raise TraceLayoutError(f"sig {sig_ref!r} has no atoms to project over")
    if wanted is None:
        return order.atoms[0]
    for atom in order.atoms:
        if atom.label == wanted or atom.display == wanted:
            return atom
    raise TraceLayoutError(f"no atom {wanted!r} in sig {sig_ref!r}")


def _load(config: RunConfig) -> tuple[Instance, LayoutSpec | None]:
    instance = parse_instance_xml(_read_text(config.trace_path))
    spec = None
    if config.spec_path is not None:
        spec = parse_spec(_read_text(config.spec_path))
        if config.seed is not None:
            spec = LayoutSpec(
                entries=spec.entries,
                defaults=spec.defaults,
                canvas=spec.canvas,
                spacing=spec.spacing,
                seed=config.seed,
            )
    return instance, spec


def _check_spec(spec: LayoutSpec, instance: Instance, quiet: bool = False) -> bool:
    diagnostics = validate_spec(spec, instance)
    ok = True
    for diagnostic in diagnostics:
        if diagnostic.severity == "error":
            ok = False
        if not quiet or diagnostic.severity == "error":
            print(str(diagnostic), file=sys.stderr)
    return ok


def run(config: RunConfig) -> int:
    """Execute one invocation; returns the process exit code."""
    try:
        instance, spec = _load(config)
    except OSError as exc:
        return _fail(str(exc), 2)
    except TraceLayoutError as exc:
        return _fail(str(exc), 1)

    try:
        if config.mode == "states":
            if config.project_sig is None:
                return _fail("states mode needs --project", 2)
            for atom in state_order(instance, config.project_sig).atoms:
                print(atom.display)
            return 0

        if spec is None:
            return _fail(f"{config.mode} mode needs --spec", 2)

        if config.mode == "validate":
            return 0 if _check_spec(spec, instance) else 1

        if config.mode == "render":
            if not _check_spec(spec, instance):
                return 1
            if config.project_sig is not None:
                atom = _resolve_atom(instance, config.project_sig, config.state_atom)
                source = project(instance, config.project_sig, atom.label)
            else:
                source = instance
            scene = layout_scene(source, spec, draw_base_edges=config.draw_base_edges)
            for warning in scene.warnings:
                print(f"warning: {warning}", file=sys.stderr)
            if config.format == "json":
                _write_out(config.out_path, scene_to_json(scene))
                return 0
            assets, missing = _collect_assets([scene], config.spec_path)
            svg_warnings: list[str] = []
            svg = scene_to_svg(scene, assets=assets, warnings=svg_warnings)
            for warning in svg_warnings:
                print(f"warning: {warning}", file=sys.stderr)
            _write_out(config.out_path, svg.encode("utf-8"))
            return 0

        if config.mode == "animate":
            if config.project_sig is None:
                return _fail("animate mode needs --project", 2)
            if not _check_spec(spec, instance):
                return 1
            planner = MANAGERS[config.manager]
            scenes = []
            for atom in state_order(instance, config.project_sig).atoms:
                source = project(instance, config.project_sig, atom.label)
                scenes.append(layout_scene(source, spec, draw_base_edges=config.draw_base_edges))
            for scene in scenes:
                for warning in scene.warnings:
                    print(f"warning: {warning}", file=sys.stderr)
            plans = []
            for prev, nxt in zip(scenes, scenes[1:]):
                delta = diff_scenes(prev, nxt)
                if config.manager == "basic":
                    plans.append(planner(delta, prev, nxt))
                else:
                    plans.append(planner(delta, prev, nxt, config.duration_ms, config.fps))
            assets, missing = _collect_assets(scenes, config.spec_path)
            for name in missing:
                print(f"warning: image {name!r} not found on the asset path", file=sys.stderr)
            _write_out(config.out_path, build_bundle(scenes, plans, assets))
            return 0

        return _fail(f"unknown mode {config.mode!r}", 2)
    except OSError as exc:
        return _fail(str(exc), 2)
    except TraceLayoutError as exc:
        return _fail(str(exc), 1)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tracelayout",
        description="Lay out Alloy Analyzer traces as diagrams and animations.",
    )
    sub = parser.add_subparsers(dest="mode", required=True)

    def common(p: argparse.ArgumentParser, spec_required: bool = True) -> None:
        p.add_argument("--trace", required=True, help="Analyzer instance XML file")
        if spec_required:
            p.add_argument("--spec", required=True, help="layout specification JSON file")
        p.add_argument("--project", help="sig to project over")
        p.add_argument("--atom", help="atom of the projected sig")
        p.add_argument("--seed", type=int, help="override the layout seed")
        p.add_argument("--draw-base-edges", action="store_true",
                       help="also draw anchor and ordering relations as edges")
        p.add_argument("--out", help="output file (default: stdout)")

    render = sub.add_parser("render", help="lay out one scene and write SVG")
    common(render)
    render.add_argument("--format", choices=("svg", "json"), default="svg",
                        help="scene output format")

    animate = sub.add_parser("animate", help="lay out every state and write a bundle")
    common(animate)
    animate.add_argument("--manager", choices=sorted(MANAGERS), default="animation",
                         help="transition manager")
    animate.add_argument("--duration", type=float, default=1000.0,
                         help="transition duration in milliseconds")
    animate.add_argument("--fps", type=float, default=30.0, help="keyframe rate")

    validate = sub.add_parser("validate", help="check a spec against an instance")
    common(validate)

    states = sub.add_parser("states", help="print the ordered atoms of a sig")
    common(states, spec_required=False)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    config = RunConfig(
        mode=args.mode,
        trace_path=args.trace,
        spec_path=getattr(args, "spec", None),
        project_sig=args.project,
        state_atom=args.atom,
        manager=getattr(args, "manager", "animation"),
        duration_ms=getattr(args, "duration", 1000.0),
        fps=getattr(args, "fps", 30.0),
        seed=args.seed,
        draw_base_edges=args.draw_base_edges,
        out_path=args.out,
        format=getattr(args, "format", "svg"),
    )
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
