"""Differences between consecutive scenes and animated transition plans.

Elements keep their identity across states through the atom label, so a
diff is a straight comparison of the two node maps and the two edge
sets. Three planners turn a diff into keyframes: Basic jumps straight to
the next scene, Animation moves elements linearly while everything that
appears or disappears fades, and ConnectionUpdate keeps surviving
elements where they are and slides retargeted edge endpoints instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .engine import Scene, SceneNode
from .errors import TransitionError

MOVE_TOLERANCE = 0.01

NAMED_COLORS = {
    "white": (255, 255, 255),
    "black": (0, 0, 0),
    "red": (255, 0, 0),
    "green": (0, 128, 0),
    "blue": (0, 0, 255),
    "yellow": (255, 255, 0),
    "orange": (255, 165, 0),
    "purple": (128, 0, 128),
    "gray": (128, 128, 128),
    "grey": (128, 128, 128),
}


@dataclass(frozen=True)
class EdgeKey:
    field: str
    src: str
    dst: str

    def text(self) -> str:
        return f"{self.field}|{self.src}|{self.dst}"


@dataclass
class SceneDelta:
    added: set[str] = field(default_factory=set)
    removed: set[str] = field(default_factory=set)
    moved: dict[str, tuple[tuple[float, float], tuple[float, float]]] = field(default_factory=dict)
    restyled: dict[str, tuple[tuple, tuple]] = field(default_factory=dict)
    edges_added: set[EdgeKey] = field(default_factory=set)
    edges_removed: set[EdgeKey] = field(default_factory=set)
    edges_retargeted: dict[EdgeKey, str] = field(default_factory=dict)
    # edges_retargeted maps the old edge to its new destination

    def is_empty(self) -> bool:
        return not (
            self.added
            or self.removed
            or self.moved
            or self.restyled
            or self.edges_added
            or self.edges_removed
            or self.edges_retargeted
        )


@dataclass
class NodeState:
    x: float
    y: float
    opacity: float
    width: float
    height: float
    shape: str
    background: str | None
    img: str | None


@dataclass
class EdgeState:
    x1: float
    y1: float
    x2: float
    y2: float
    opacity: float


@dataclass
class Keyframe:
    t_ms: float
    nodes: dict[str, NodeState]
    edges: dict[str, EdgeState]


@dataclass
class TransitionPlan:
    manager: str  # Basic, Animation or ConnectionUpdate
    duration_ms: float
    fps: float
    keyframes: list[Keyframe]


def diff_scenes(prev: Scene, next_scene: Scene) -> SceneDelta:
    """Compare two scenes node by node and edge by edge.

    A node counts as moved when either coordinate changes by more than
    0.01 px. An edge that keeps its field and source but points at a new
    target is a retarget rather than a remove/add pair.
    """
    delta = SceneDelta()
    prev_nodes = prev.node_map()
    next_nodes = next_scene.node_map()
    delta.added = set(next_nodes) - set(prev_nodes)
    delta.removed = set(prev_nodes) - set(next_nodes)
    for label in set(prev_nodes) & set(next_nodes):
        a, b = prev_nodes[label], next_nodes[label]
        if abs(a.x - b.x) > MOVE_TOLERANCE or abs(a.y - b.y) > MOVE_TOLERANCE:
            delta.moved[label] = ((a.x, a.y), (b.x, b.y))
        if a.style_key() != b.style_key():
            delta.restyled[label] = (a.style_key(), b.style_key())

    prev_edges = {EdgeKey(e.field, e.src, e.dst) for e in prev.edges}
    next_edges = {EdgeKey(e.field, e.src, e.dst) for e in next_scene.edges}
    gone = prev_edges - next_edges
    new = next_edges - prev_edges
    gone_by_src: dict[tuple[str, str], list[str]] = {}
    new_by_src: dict[tuple[str, str], list[str]] = {}
    for key in gone:
        gone_by_src.setdefault((key.field, key.src), []).append(key.dst)
    for key in new:
        new_by_src.setdefault((key.field, key.src), []).append(key.dst)
    for origin in sorted(set(gone_by_src) & set(new_by_src)):
        old_dsts = sorted(gone_by_src[origin])
        new_dsts = sorted(new_by_src[origin])
        for old_dst, new_dst in zip(old_dsts, new_dsts):
            delta.edges_retargeted[EdgeKey(origin[0], origin[1], old_dst)] = new_dst
            gone.discard(EdgeKey(origin[0], origin[1], old_dst))
            new.discard(EdgeKey(origin[0], origin[1], new_dst))
    delta.edges_removed = gone
    delta.edges_added = new
    return delta


def _lerp(a: float, b: float, f: float) -> float:
    if f <= 0.0:
        return a
    if f >= 1.0:
        return b
    return a + (b - a) * f


def _parse_color(value: str | None) -> tuple[int, int, int] | None:
    if value is None:
        return None
    text = value.strip().lower()
    if text in NAMED_COLORS:
        return NAMED_COLORS[text]
    if text.startswith("#"):
        digits = text[1:]
        if len(digits) == 3:
            digits = "".join(c * 2 for c in digits)
        if len(digits) == 6:
            try:
                return tuple(int(digits[i : i + 2], 16) for i in (0, 2, 4))
            except ValueError:
                return None
    return None


def _lerp_color(a: str | None, b: str | None, f: float) -> str | None:
    if f <= 0.0:
        return a
    if f >= 1.0:
        return b
    ca, cb = _parse_color(a), _parse_color(b)
    if ca is None or cb is None:
        return a  # not interpolable, switch at the end
    mixed = tuple(round(_lerp(ca[i], cb[i], f)) for i in range(3))
    return "#{:02x}{:02x}{:02x}".format(*mixed)


def _keyframe_fractions(duration_ms: float, fps: float) -> list[float]:
    if duration_ms <= 0 or fps <= 0:
        raise TransitionError("duration and fps must be positive")
    count = math.ceil(duration_ms * fps / 1000.0) + 1
    return [k / (count - 1) for k in range(count)]


def _node_state(node: SceneNode, opacity: float = 1.0) -> NodeState:
    return NodeState(
        x=node.x,
        y=node.y,
        opacity=opacity,
        width=node.width,
        height=node.height,
        shape=node.shape,
        background=node.background,
        img=node.img,
    )


def _blend_node(a: SceneNode, b: SceneNode, f: float, x: float, y: float) -> NodeState:
    return NodeState(
        x=x,
        y=y,
        opacity=1.0,
        width=_lerp(a.width, b.width, f),
        height=_lerp(a.height, b.height, f),
        shape=a.shape if f < 1.0 else b.shape,
        background=_lerp_color(a.background, b.background, f),
        img=a.img if f < 1.0 else b.img,
    )


def plan_basic(delta: SceneDelta, prev: Scene, next_scene: Scene) -> TransitionPlan:
    """A single keyframe that shows the next scene outright."""
    nodes = {n.atom: _node_state(n) for n in next_scene.nodes}
    edges = {
        EdgeKey(e.field, e.src, e.dst).text(): EdgeState(e.x1, e.y1, e.x2, e.y2, 1.0)
        for e in next_scene.edges
    }
    return TransitionPlan(
        manager="Basic",
        duration_ms=0.0,
        fps=0.0,
        keyframes=[Keyframe(t_ms=0.0, nodes=nodes, edges=edges)],
    )


def _random_guard(
    labels: set[str], prev: Scene, next_scene: Scene, manager: str
) -> None:
    prev_nodes = prev.node_map()
    next_nodes = next_scene.node_map()
    for label in sorted(labels):
        for nodes in (prev_nodes, next_nodes):
            node = nodes.get(label)
            if node is not None and node.manager == "Random":
                raise TransitionError(
                    f"{manager} cannot animate {label}: its container uses Random layout"
                )


def _position_retargets(
    delta: SceneDelta,
) -> dict[EdgeKey, tuple[str, str]]:
    """Retargets keyed by their new edge identity."""
    return {
        EdgeKey(old.field, old.src, new_dst): (old.dst, new_dst)
        for old, new_dst in delta.edges_retargeted.items()
    }


def plan_animated(
    delta: SceneDelta,
    prev: Scene,
    next_scene: Scene,
    duration_ms: float = 1000.0,
    fps: float = 30.0,
) -> TransitionPlan:
    """Linear motion for moved elements, fades for everything else.

    Rejected when a moved element or a retargeted edge endpoint was laid
    out by Random in either scene, because positions carry no meaning
    there. Absolute placements animate normally.
    """
    affected = set(delta.moved)
    for old, new_dst in delta.edges_retargeted.items():
        affected.update({old.src, old.dst, new_dst})
    _random_guard(affected, prev, next_scene, "Animation")

    prev_nodes = prev.node_map()
    next_nodes = next_scene.node_map()
    retargets = _position_retargets(delta)
    prev_edges = {EdgeKey(e.field, e.src, e.dst) for e in prev.edges}
    next_edges = {EdgeKey(e.field, e.src, e.dst) for e in next_scene.edges}

    keyframes = []
    for f in _keyframe_fractions(duration_ms, fps):
        nodes: dict[str, NodeState] = {}
        for label in sorted(set(prev_nodes) | set(next_nodes)):
            if label in delta.added:
                nodes[label] = _node_state(next_nodes[label], opacity=f)
            elif label in delta.removed:
                nodes[label] = _node_state(prev_nodes[label], opacity=1.0 - f)
            else:
                a, b = prev_nodes[label], next_nodes[label]
                x = _lerp(a.x, b.x, f)
                y = _lerp(a.y, b.y, f)
                nodes[label] = _blend_node(a, b, f, x, y)

        def at(label: str, fallback: SceneNode) -> tuple[float, float]:
            state = nodes.get(label)
            if state is not None:
                return state.x, state.y
            return fallback.x, fallback.y

        edges: dict[str, EdgeState] = {}
        for key in sorted(next_edges | prev_edges, key=EdgeKey.text):
            if key in retargets:
                old_dst, new_dst = retargets[key]
                sx, sy = at(key.src, next_nodes[key.src])
                ox, oy = at(old_dst, prev_nodes[old_dst])
                nx, ny = at(new_dst, next_nodes[new_dst])
                edges[key.text()] = EdgeState(
                    sx, sy, _lerp(ox, nx, f), _lerp(oy, ny, f), 1.0
                )
            elif key in next_edges and key in prev_edges:
                sx, sy = at(key.src, next_nodes[key.src])
                dx, dy = at(key.dst, next_nodes[key.dst])
                edges[key.text()] = EdgeState(sx, sy, dx, dy, 1.0)
            elif key in next_edges:
                sx, sy = at(key.src, next_nodes[key.src])
                dx, dy = at(key.dst, next_nodes[key.dst])
                edges[key.text()] = EdgeState(sx, sy, dx, dy, f)
            else:
                if key in delta.edges_retargeted:
                    continue  # the retargeted edge already covers it
                sx, sy = at(key.src, prev_nodes[key.src])
                dx, dy = at(key.dst, prev_nodes[key.dst])
                edges[key.text()] = EdgeState(sx, sy, dx, dy, 1.0 - f)
        keyframes.append(Keyframe(t_ms=duration_ms * f, nodes=nodes, edges=edges))
    return TransitionPlan(
        manager="Animation", duration_ms=duration_ms, fps=fps, keyframes=keyframes
    )


def plan_connection_update(
    delta: SceneDelta,
    prev: Scene,
    next_scene: Scene,
    duration_ms: float = 1000.0,
    fps: float = 30.0,
) -> TransitionPlan:
    """Keep surviving elements in place and move their connections.

    Nodes present in both scenes stay frozen at their previous
    positions; retargeted edges slide their far endpoint from the old
    target to the new one. Appearing and disappearing content fades as
    in the animated plan.
    """
    affected = set()
    for old, new_dst in delta.edges_retargeted.items():
        affected.update({old.src, old.dst, new_dst})
    _random_guard(affected, prev, next_scene, "ConnectionUpdate")

    prev_nodes = prev.node_map()
    next_nodes = next_scene.node_map()
    retargets = _position_retargets(delta)
    prev_edges = {EdgeKey(e.field, e.src, e.dst) for e in prev.edges}
    next_edges = {EdgeKey(e.field, e.src, e.dst) for e in next_scene.edges}

    def anchor_of(label: str) -> tuple[float, float]:
        node = prev_nodes.get(label) or next_nodes.get(label)
        return node.x, node.y

    keyframes = []
    for f in _keyframe_fractions(duration_ms, fps):
        nodes: dict[str, NodeState] = {}
        for label in sorted(set(prev_nodes) | set(next_nodes)):
            if label in delta.added:
                nodes[label] = _node_state(next_nodes[label], opacity=f)
            elif label in delta.removed:
                nodes[label] = _node_state(prev_nodes[label], opacity=1.0 - f)
            else:
                a, b = prev_nodes[label], next_nodes[label]
                nodes[label] = _blend_node(a, b, f, a.x, a.y)

        edges: dict[str, EdgeState] = {}
        for key in sorted(next_edges | prev_edges, key=EdgeKey.text):
            if key in retargets:
                old_dst, new_dst = retargets[key]
                sx, sy = anchor_of(key.src)
                ox, oy = anchor_of(old_dst)
                nx, ny = anchor_of(new_dst)
                edges[key.text()] = EdgeState(
                    sx, sy, _lerp(ox, nx, f), _lerp(oy, ny, f), 1.0
                )
            elif key in next_edges and key in prev_edges:
                sx, sy = anchor_of(key.src)
                dx, dy = anchor_of(key.dst)
                edges[key.text()] = EdgeState(sx, sy, dx, dy, 1.0)
            elif key in next_edges:
                sx, sy = anchor_of(key.src)
                dx, dy = anchor_of(key.dst)
                edges[key.text()] = EdgeState(sx, sy, dx, dy, f)
            else:
                if key in delta.edges_retargeted:
                    continue
                sx, sy = anchor_of(key.src)
                dx, dy = anchor_of(key.dst)
                edges[key.text()] = EdgeState(sx, sy, dx, dy, 1.0 - f)
        keyframes.append(Keyframe(t_ms=duration_ms * f, nodes=nodes, edges=edges))
    return TransitionPlan(
        manager="ConnectionUpdate", duration_ms=duration_ms, fps=fps, keyframes=keyframes
    )
