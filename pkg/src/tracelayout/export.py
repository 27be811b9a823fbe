"""Serialization of scenes and plans: canonical JSON, SVG and bundles.

Canonical JSON keeps artifacts byte-stable: object keys are sorted,
continuous quantities (coordinates, sizes, opacities, times) are written
as fixed-point strings with two decimals, output is UTF-8 and ends with
a newline. Serializing, parsing and serializing again yields identical
bytes.
"""

from __future__ import annotations

import base64
import json
import math
from xml.sax.saxutils import escape, quoteattr

from .engine import Scene
from .errors import BundleError
from .transitions import TransitionPlan

BUNDLE_VERSION = "1"

_IMAGE_MIME = {
    "png": "image/png",
    "jpg": "image/jpeg",
    "jpeg": "image/jpeg",
    "gif": "image/gif",
    "svg": "image/svg+xml",
}


def _fixed(value: float) -> str:
    rounded = round(value + 0.0, 2)
    if rounded == 0.0:
        rounded = 0.0
    return f"{rounded:.2f}"


def canonical_json(obj) -> bytes:
    text = json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return text.encode("utf-8") + b"\n"


def scene_to_jsonable(scene: Scene) -> dict:
    doc: dict = {
        "canvas": {
            "x": _fixed(scene.canvas.x),
            "y": _fixed(scene.canvas.y),
            "width": _fixed(scene.canvas.width),
            "height": _fixed(scene.canvas.height),
        },
        "nodes": [],
        "edges": [],
    }
    if scene.state_label is not None:
        doc["stateLabel"] = scene.state_label
    for node in scene.nodes:
        entry = {
            "atom": node.atom,
            "label": node.display,
            "sig": node.sig,
            "x": _fixed(node.x),
            "y": _fixed(node.y),
            "width": _fixed(node.width),
            "height": _fixed(node.height),
            "shape": node.shape,
            "manager": node.manager,
        }
        if node.background is not None:
            entry["background"] = node.background
        if node.img is not None:
            entry["img"] = node.img
        if node.marks:
            entry["marks"] = sorted(node.marks)
        doc["nodes"].append(entry)
    for edge in scene.edges:
        doc["edges"].append(
            {
                "field": edge.field,
                "src": edge.src,
                "dst": edge.dst,
                "x1": _fixed(edge.x1),
                "y1": _fixed(edge.y1),
                "x2": _fixed(edge.x2),
                "y2": _fixed(edge.y2),
            }
        )
    return doc


def scene_to_json(scene: Scene) -> bytes:
    """Canonical JSON bytes for one scene."""
    return canonical_json(scene_to_jsonable(scene))


def plan_to_jsonable(plan: TransitionPlan) -> dict:
    keyframes = []
    for frame in plan.keyframes:
        nodes = {}
        for label in sorted(frame.nodes):
            state = frame.nodes[label]
            entry = {
                "x": _fixed(state.x),
                "y": _fixed(state.y),
                "width": _fixed(state.width),
                "height": _fixed(state.height),
                "opacity": _fixed(state.opacity),
                "shape": state.shape,
            }
            if state.background is not None:
                entry["background"] = state.background
            if state.img is not None:
                entry["img"] = state.img
            nodes[label] = entry
        edges = {}
        for key in sorted(frame.edges):
            state = frame.edges[key]
            edges[key] = {
                "x1": _fixed(state.x1),
                "y1": _fixed(state.y1),
                "x2": _fixed(state.x2),
                "y2": _fixed(state.y2),
                "opacity": _fixed(state.opacity),
            }
        keyframes.append({"tMs": _fixed(frame.t_ms), "nodes": nodes, "edges": edges})
    return {
        "manager": plan.manager,
        "durationMs": _fixed(plan.duration_ms),
        "fps": _fixed(plan.fps),
        "keyframes": keyframes,
    }


def build_bundle(
    scenes: list[Scene],
    plans: list[TransitionPlan],
    assets: dict[str, bytes] | None = None,
) -> bytes:
    """Self-contained trace bundle: states, scenes, plans and image data.

    Requires exactly one plan per consecutive scene pair. Referenced
    images missing from the asset map are listed under missingAssets.
    """
    expected = max(len(scenes) - 1, 0)
    if len(plans) != expected:
        raise BundleError(f"bundle needs {expected} plans for {len(scenes)} scenes, got {len(plans)}")
    states = []
    for i, scene in enumerate(scenes):
        if scene.state_label is None:
            raise BundleError(f"scene {i} has no state label; bundles need projected scenes")
        states.append(scene.state_label)

    assets = assets or {}
    referenced = sorted(
        {node.img for scene in scenes for node in scene.nodes if node.img is not None}
    )
    doc = {
        "version": BUNDLE_VERSION,
        "states": states,
        "scenes": [scene_to_jsonable(s) for s in scenes],
        "plans": [plan_to_jsonable(p) for p in plans],
        "assets": {
            name: base64.b64encode(content).decode("ascii")
            for name, content in sorted(assets.items())
        },
        "missingAssets": [name for name in referenced if name not in assets],
    }
    return canonical_json(doc)


def parse_bundle(data: bytes) -> dict:
    """Load and check a bundle document."""
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise BundleError(f"bundle is not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or doc.get("version") != BUNDLE_VERSION:
        raise BundleError(
            f"unsupported bundle version {doc.get('version')!r}, expected {BUNDLE_VERSION!r}"
            if isinstance(doc, dict)
            else "bundle root must be an object"
        )
    scenes = doc.get("scenes", [])
    plans = doc.get("plans", [])
    expected = max(len(scenes) - 1, 0)
    if len(plans) != expected:
        raise BundleError(f"bundle has {len(plans)} plans for {len(scenes)} scenes")
    return doc


# ---------------------------------------------------------------------------
# SVG


def _trim_endpoint(
    x1: float, y1: float, x2: float, y2: float, half_w: float, half_h: float
) -> tuple[float, float]:
    """Pull the far endpoint back to the border of the destination box."""
    dx, dy = x2 - x1, y2 - y1
    if dx == 0 and dy == 0:
        return x2, y2
    scale = max(
        abs(dx) / half_w if half_w > 0 else 0.0,
        abs(dy) / half_h if half_h > 0 else 0.0,
    )
    if scale <= 1.0:
        return x2, y2
    length = math.hypot(dx, dy)
    back = length / scale
    return x2 - dx / length * back, y2 - dy / length * back


def _shape_markup(node, fill: str) -> str:
    x0 = node.x - node.width / 2.0
    y0 = node.y - node.height / 2.0
    w, h = node.width, node.height
    style = f'fill={quoteattr(fill)} stroke="#333333"'
    if node.shape == "ellipse":
        return (
            f'<ellipse cx="{node.x:g}" cy="{node.y:g}" rx="{w / 2:g}" ry="{h / 2:g}" {style}/>'
        )
    if node.shape == "triangle":
        points = f"{node.x:g},{y0:g} {x0 + w:g},{y0 + h:g} {x0:g},{y0 + h:g}"
        return f'<polygon points="{points}" {style}/>'
    if node.shape == "parallelogram":
        slant = min(w / 4.0, h)
        points = (
            f"{x0 + slant:g},{y0:g} {x0 + w:g},{y0:g} "
            f"{x0 + w - slant:g},{y0 + h:g} {x0:g},{y0 + h:g}"
        )
        return f'<polygon points="{points}" {style}/>'
    return f'<rect x="{x0:g}" y="{y0:g}" width="{w:g}" height="{h:g}" rx="2" {style}/>'


def scene_to_svg(
    scene: Scene,
    assets: dict[str, bytes] | None = None,
    warnings: list[str] | None = None,
) -> str:
    """Render a scene as a standalone SVG 1.1 document.

    Edges draw below nodes. A node with an image style embeds the image
    when its file content is available in ``assets``, and falls back to
    a placeholder rectangle (recording a warning) when it is not.
    """
    assets = assets or {}
    out: list[str] = []
    w, h = scene.canvas.width, scene.canvas.height
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{w:g}" height="{h:g}" viewBox="{scene.canvas.x:g} {scene.canvas.y:g} {w:g} {h:g}">'
    )
    out.append(
        '<defs><marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" '
        'markerWidth="7" markerHeight="7" orient="auto-start-reverse">'
        '<path d="M 0 0 L 10 5 L 0 10 z" fill="#444444"/></marker></defs>'
    )
    out.append(f'<rect x="{scene.canvas.x:g}" y="{scene.canvas.y:g}" width="{w:g}" height="{h:g}" fill="#fcfcfc"/>')
    if scene.state_label is not None:
        out.append(
            f'<text x="{scene.canvas.x + 8:g}" y="{scene.canvas.y + 16:g}" '
            f'font-family="sans-serif" font-size="12" fill="#666666">'
            f"{escape(scene.state_label.replace('$', ''))}</text>"
        )

    node_by_label = scene.node_map()
    for edge in scene.edges:
        dst = node_by_label.get(edge.dst)
        x2, y2 = edge.x2, edge.y2
        if dst is not None:
            x2, y2 = _trim_endpoint(edge.x1, edge.y1, edge.x2, edge.y2, dst.width / 2, dst.height / 2)
        out.append(
            f'<line x1="{edge.x1:g}" y1="{edge.y1:g}" x2="{x2:g}" y2="{y2:g}" '
            f'stroke="#444444" stroke-width="1.2" marker-end="url(#arrow)"/>'
        )
        mx, my = (edge.x1 + edge.x2) / 2.0, (edge.y1 + edge.y2) / 2.0
        label = edge.field.rsplit("/", 1)[-1]
        out.append(
            f'<text x="{mx:g}" y="{my - 3:g}" font-family="sans-serif" font-size="10" '
            f'fill="#555555" text-anchor="middle">{escape(label)}</text>'
        )

    for node in scene.nodes:
        if node.img is not None:
            content = assets.get(node.img)
            if content is None:
                if warnings is not None:
                    warnings.append(f"image {node.img!r} not found, drawing a placeholder")
                out.append(f"<!-- missing image {escape(node.img)} -->")
                out.append(_shape_markup(node, "#eeeeee"))
            else:
                ext = node.img.rsplit(".", 1)[-1].lower()
                mime = _IMAGE_MIME.get(ext, "application/octet-stream")
                data = base64.b64encode(content).decode("ascii")
                x0 = node.x - node.width / 2.0
                y0 = node.y - node.height / 2.0
                out.append(
                    f'<image x="{x0:g}" y="{y0:g}" width="{node.width:g}" height="{node.height:g}" '
                    f'href="data:{mime};base64,{data}"/>'
                )
        else:
            fill = node.background if node.background is not None else "#dddddd"
            out.append(_shape_markup(node, fill))
        text = node.display
        if node.marks:
            text += " [" + ", ".join(m.rsplit("/", 1)[-1] for m in sorted(node.marks)) + "]"
        out.append(
            f'<text x="{node.x:g}" y="{node.y + node.height / 2 + 11:g}" '
            f'font-family="sans-serif" font-size="10" fill="#333333" '
            f'text-anchor="middle">{escape(text)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
