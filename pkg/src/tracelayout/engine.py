"""Anchor-based layout of a (possibly projected) instance into a scene.

Every sig entry in the layout spec produces one or more containers. A
container groups the elements that share an anchor atom, reached through
the entry's base relation. Containers form a dependency graph (an
element cannot be placed before its anchor) and are laid out in
topological order.

Geometry model:

* Root containers using Linear claim a band along the canvas edge named
  by their direction param and lay their elements along that edge, in
  canonical order away from the origin corner. Other root managers share
  the central region left over after bands are claimed.
* An anchored container occupies a rectangle derived from its anchor's
  partition: horizontal Linear (E/W) and Grid take the band directly
  above the anchor element, vertical Linear (N/S) stacks away from it,
  Tree hangs below it, Circular orbits the anchor, Random scatters over
  the anchor's partition.
* Elements whose base relation yields no anchor in the current
  projection fall back to Random containers in the orphan region at the
  canvas bottom, as do sigs with no spec entry.

All arithmetic is double precision; emitted scene coordinates are
rounded to 0.01 px.
"""

from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass, field

from .errors import LayoutError
from .geometry import DIRECTION_VECTORS, Rect, Slice, boxes_disjoint, round_coord
from .instance import Atom, FieldDecl, Instance, SigDecl, element_order, ordering_field
from .layoutspec import LayoutSpec, SigSpec, decode_params, style_for, validate_spec
from .projection import ProjectedInstance

DEFAULT_ELEM_WIDTH = 64.0
DEFAULT_ELEM_HEIGHT = 32.0
RANDOM_MAX_ATTEMPTS = 1000


@dataclass
class LayoutContext:
    space: Rect  # the container's available space
    spacing: float
    elem_width: float
    elem_height: float
    seed: int = 0


@dataclass
class Placement:
    atom: Atom
    x: float
    y: float
    width: float
    height: float
    partition: Rect | Slice | None = None


@dataclass
class Container:
    key: str
    sig: str  # qualified sig name
    manager: str
    elements: list[Atom]
    entry: SigSpec | None = None
    anchor: Atom | None = None
    anchor_mate: Atom | None = None  # second anchor, Magnet only
    anchor_pos: tuple[float, float] | None = None
    orphan: bool = False


@dataclass(frozen=True)
class SceneNode:
    atom: str
    display: str
    sig: str
    x: float
    y: float
    width: float
    height: float
    shape: str = "rect"
    background: str | None = None
    img: str | None = None
    manager: str = "Random"
    marks: tuple[str, ...] = ()

    def style_key(self) -> tuple:
        return (self.shape, self.background, self.img, self.width, self.height)


@dataclass(frozen=True)
class SceneEdge:
    field: str
    src: str
    dst: str
    x1: float
    y1: float
    x2: float
    y2: float


@dataclass
class Scene:
    state_label: str | None
    canvas: Rect
    nodes: list[SceneNode]
    edges: list[SceneEdge]
    warnings: list[str] = field(default_factory=list)

    def node_map(self) -> dict[str, SceneNode]:
        return {n.atom: n for n in self.nodes}


@dataclass
class _View:
    base: Instance
    fields: dict[str, FieldDecl]
    sigs: dict[str, SigDecl]
    state_label: str | None
    marks: dict[str, set[str]]


def _as_view(source: Instance | ProjectedInstance) -> _View:
    if isinstance(source, ProjectedInstance):
        return _View(
            base=source.base,
            fields=source.fields,
            sigs=source.visible_sigs,
            state_label=source.projected_atom.label,
            marks=source.marks,
        )
    return _View(base=source, fields=source.fields, sigs=source.sigs, state_label=None, marks={})


def _resolve_view_field(view: _View, ref: str) -> FieldDecl | None:
    if ref in view.fields:
        return view.fields[ref]
    matches = [f for f in view.fields.values() if f.display == ref or f.label == ref]
    if len(matches) == 1:
        return matches[0]
    return None


# ---------------------------------------------------------------------------
# Anchor graph


def _column_for_sig(instance: Instance, fdecl: FieldDecl, sig_name: str) -> int | None:
    for i, column in enumerate(fdecl.column_sigs):
        if instance.sig_matches(column, sig_name) or instance.sig_matches(sig_name, column):
            return i
    return None


def _canonical_index(instance: Instance, cache: dict[str, dict[str, int]], sig_name: str) -> dict[str, int]:
    if sig_name not in cache:
        order = element_order(instance, sig_name)
        cache[sig_name] = {atom.label: i for i, atom in enumerate(order)}
    return cache[sig_name]


def _anchor_candidates(
    view: _View,
    fdecl: FieldDecl,
    element: Atom,
    elem_col: int,
    canon: dict[str, dict[str, int]],
) -> list[str]:
    """Anchor atom labels for one element, most relevant first.

    For relations of arity three or more the trailing column acts as the
    tie breaker (for a trace relation it is the state column), so the
    tuple with the earliest trailing atom wins.
    """
    rows = [row for row in fdecl.tuples if row[elem_col] == element.label]
    if not rows:
        return []
    other_cols = [i for i in range(fdecl.arity) if i != elem_col]
    anchor_col = other_cols[0]

    def row_key(row: tuple[str, ...]):
        parts = []
        for col in reversed(other_cols):
            sig_name = fdecl.column_sigs[col]
            index = _canonical_index(view.base, canon, sig_name)
            parts.append(index.get(row[col], len(index)))
            parts.append(row[col])
        return tuple(parts)

    ordered = sorted(rows, key=row_key)
    seen: list[str] = []
    for row in ordered:
        label = row[anchor_col]
        if label not in seen:
            seen.append(label)
    return seen


def build_anchor_graph(
    source: Instance | ProjectedInstance, spec: LayoutSpec
) -> list[Container]:
    """Group elements into containers and order them topologically.

    Raises LayoutError when spec entries anchor each other in a cycle.
    """
    view = _as_view(source)
    instance = view.base
    canon: dict[str, dict[str, int]] = {}

    entries: dict[str, SigSpec] = {}
    entry_order: list[str] = []
    for entry in spec.entries:
        decl = instance.resolve_sig(entry.sig)
        if decl.name not in view.sigs or decl.builtin:
            continue
        entries[decl.name] = entry
        entry_order.append(decl.name)

    orphan_sigs = [
        name
        for name, decl in view.sigs.items()
        if not decl.builtin and decl.atoms and name not in entries
    ]
    laid_out = set(entry_order) | set(orphan_sigs)

    # Sig-level dependencies: a configured sig waits for the sigs its base
    # relation anchors it to.
    deps: dict[str, set[str]] = {name: set() for name in laid_out}
    for name, entry in entries.items():
        if entry.base == "root":
            continue
        fdecl = _resolve_view_field(view, entry.base)
        if fdecl is None:
            continue
        elem_col = _column_for_sig(instance, fdecl, name)
        if elem_col is None:
            continue
        for i, column in enumerate(fdecl.column_sigs):
            if i == elem_col or column == name:
                continue
            if column in laid_out:
                deps[name].add(column)

    ordered_sigs: list[str] = []
    ready = [name for name in entry_order + orphan_sigs if not deps[name]]
    pending = {name: set(d) for name, d in deps.items() if d}
    while ready:
        current = ready.pop(0)
        ordered_sigs.append(current)
        newly_ready = []
        for name, waiting in list(pending.items()):
            waiting.discard(current)
            if not waiting:
                del pending[name]
                newly_ready.append(name)
        # Preserve spec entry order among sigs that become ready together.
        newly_ready.sort(key=lambda n: (entry_order + orphan_sigs).index(n))
        ready.extend(newly_ready)
    if pending:
        cycle = " -> ".join(sorted(pending))
        raise LayoutError(f"anchor cycle between sigs: {cycle}")

    containers: list[Container] = []
    for sig_name in ordered_sigs:
        decl = view.sigs[sig_name]
        elements = element_order(instance, sig_name)
        if not elements:
            continue
        entry = entries.get(sig_name)
        if entry is None:
            containers.append(
                Container(
                    key=f"{decl.display}@orphans",
                    sig=sig_name,
                    manager="Random",
                    elements=elements,
                    orphan=True,
                )
            )
            continue
        if entry.base == "root":
            containers.append(
                Container(
                    key=f"{decl.display}@root",
                    sig=sig_name,
                    manager=entry.layout,
                    elements=elements,
                    entry=entry,
                )
            )
            continue

        fdecl = _resolve_view_field(view, entry.base)
        elem_col = None if fdecl is None else _column_for_sig(instance, fdecl, sig_name)
        anchored: dict[tuple[str, ...], list[Atom]] = {}
        orphans: list[Atom] = []
        for element in elements:
            if fdecl is None or elem_col is None or fdecl.arity < 2:
                orphans.append(element)
                continue
            candidates = _anchor_candidates(view, fdecl, element, elem_col, canon)
            needed = 2 if entry.layout == "Magnet" else 1
            if len(candidates) < needed:
                orphans.append(element)
                continue
            key = tuple(candidates[:needed])
            anchored.setdefault(key, []).append(element)

        def anchor_sort(labels: tuple[str, ...]):
            parts = []
            for label in labels:
                atom = instance.atoms[label]
                index = _canonical_index(instance, canon, atom.sig)
                parts.append((atom.sig, index.get(label, 0), label))
            return tuple(parts)

        for key in sorted(anchored, key=anchor_sort):
            members = anchored[key]
            anchor_atom = instance.atoms[key[0]]
            mate = instance.atoms[key[1]] if len(key) > 1 else None
            suffix = "+".join(a.replace("$", "") for a in key)
            containers.append(
                Container(
                    key=f"{decl.display}@{suffix}",
                    sig=sig_name,
                    manager=entry.layout,
                    elements=members,
                    entry=entry,
                    anchor=anchor_atom,
                    anchor_mate=mate,
                )
            )
        if orphans:
            containers.append(
                Container(
                    key=f"{decl.display}@orphans",
                    sig=sig_name,
                    manager="Random",
                    elements=orphans,
                    entry=entry,
                    orphan=True,
                )
            )
    return containers


# ---------------------------------------------------------------------------
# Layout managers


def layout_linear(container: Container, direction: str, ctx: LayoutContext) -> list[Placement]:
    """Place elements at equal steps from the container's anchor position.

    The available extent along the direction axis is divided into one
    partition per element and each element sits at its partition center.
    The cross axis coordinate is the anchor's.
    """
    if direction not in DIRECTION_VECTORS:
        raise LayoutError(f"Linear direction must be one of N, S, E, W, got {direction!r}")
    if not container.elements:
        return []
    if container.anchor_pos is None:
        raise LayoutError(f"container {container.key!r} has no anchor position")
    ax, ay = container.anchor_pos
    dx, dy = DIRECTION_VECTORS[direction]
    horizontal = dx != 0.0
    extent = ctx.space.width if horizontal else ctx.space.height
    step = extent / len(container.elements)
    placements = []
    for i, atom in enumerate(container.elements):
        along = step * i + step / 2.0
        if horizontal:
            x, y = ax + dx * along, ay
            left = min(ax + dx * step * i, ax + dx * step * (i + 1))
            partition = Rect(left, ctx.space.y, step, ctx.space.height)
        else:
            x, y = ax, ay + dy * along
            top = min(ay + dy * step * i, ay + dy * step * (i + 1))
            partition = Rect(ctx.space.x, top, ctx.space.width, step)
        placements.append(Placement(atom, x, y, ctx.elem_width, ctx.elem_height, partition))
    return placements


def layout_grid(container: Container, columns: int, ctx: LayoutContext) -> list[Placement]:
    """Fill rows of the given width, first element right of the anchor point."""
    if columns < 1:
        raise LayoutError(f"Grid column count must be positive, got {columns}")
    if not container.elements:
        return []
    if container.anchor_pos is None:
        raise LayoutError(f"container {container.key!r} has no anchor position")
    ax, ay = container.anchor_pos
    rows = math.ceil(len(container.elements) / columns)
    cell_w = ctx.space.width / columns
    cell_h = ctx.space.height / rows
    placements = []
    for i, atom in enumerate(container.elements):
        row, col = divmod(i, columns)
        cell = Rect(ax + cell_w * col, ay + cell_h * row, cell_w, cell_h)
        cx, cy = cell.center
        placements.append(Placement(atom, cx, cy, ctx.elem_width, ctx.elem_height, cell))
    return placements


def layout_circular(
    container: Container, radius: float | None, ctx: LayoutContext
) -> list[Placement]:
    """Place elements on a circle, clockwise from 12 o'clock in equal slices."""
    if not container.elements:
        return []
    if container.anchor_pos is None:
        raise LayoutError(f"container {container.key!r} has no anchor position")
    if radius is not None and radius <= 0:
        raise LayoutError(f"Circular radius must be positive, got {radius}")
    cx, cy = container.anchor_pos
    count = len(container.elements)
    if radius is None:
        margin = max(ctx.elem_width, ctx.elem_height) / 2.0
        fit = min(cx - ctx.space.x, ctx.space.x2 - cx, cy - ctx.space.y, ctx.space.y2 - cy) - margin
        radius = ctx.spacing * count
        if fit > 0:
            radius = min(radius, fit)
        radius = max(radius, 1.0)
    span = 360.0 / count
    reach = radius + max(ctx.elem_width, ctx.elem_height)
    placements = []
    for i, atom in enumerate(container.elements):
        theta = math.radians(span * i)
        x = cx + radius * math.sin(theta)
        y = cy - radius * math.cos(theta)
        partition = Slice(cx, cy, reach, span * i - span / 2.0, span * i + span / 2.0)
        placements.append(Placement(atom, x, y, ctx.elem_width, ctx.elem_height, partition))
    return placements


def bfs_layer_count(children: int, count: int) -> int:
    """Layers a breadth-first fill of a complete n-ary tree occupies."""
    layers = 0
    total = 0
    width = 1
    while total < count:
        total += width
        width *= children
        layers += 1
    return layers


def tree_layer_formula(children: int, count: int) -> int:
    """The closed-form layer count, ceil(log_children((children-1)*count))."""
    target = (children - 1) * count
    layers = 0
    power = 1
    while power < target:
        power *= children
        layers += 1
    return layers


def layout_tree(container: Container, children: int, ctx: LayoutContext) -> list[Placement]:
    """Fill a complete n-ary tree breadth first, root at the top center.

    Element i's children are elements children*i+1 .. children*i+children,
    so each new element attaches to the first earlier element that still
    has room. Every layer is a horizontal strip; a node is centered in
    its slice of the parent's horizontal partition.
    """
    if children < 2:
        raise LayoutError(f"Tree needs at least 2 children per node, got {children}")
    if not container.elements:
        return []
    count = len(container.elements)
    layers = bfs_layer_count(children, count)
    strip = ctx.space.height / layers
    spans: list[tuple[float, float]] = [(ctx.space.x, ctx.space.x2)]
    depths = [0]
    for i in range(1, count):
        parent = (i - 1) // children
        slot = (i - 1) % children
        px0, px1 = spans[parent]
        width = (px1 - px0) / children
        spans.append((px0 + slot * width, px0 + (slot + 1) * width))
        depths.append(depths[parent] + 1)
    placements = []
    for i, atom in enumerate(container.elements):
        x0, x1 = spans[i]
        top = ctx.space.y + strip * depths[i]
        partition = Rect(x0, top, x1 - x0, strip)
        placements.append(
            Placement(atom, (x0 + x1) / 2.0, top + strip / 2.0, ctx.elem_width, ctx.elem_height, partition)
        )
    return placements


def layout_magnet(
    atom: Atom,
    anchor_a: tuple[float, float],
    anchor_b: tuple[float, float],
    strength_a: float,
    strength_b: float,
    *,
    width: float = DEFAULT_ELEM_WIDTH,
    height: float = DEFAULT_ELEM_HEIGHT,
    spacing: float = 0.0,
    stack_index: int = 0,
    stack_count: int = 1,
) -> Placement:
    """Place one element on the segment between two anchors.

    The element divides the segment in proportion to the pull of each
    anchor: distance to an anchor shrinks as that anchor's strength
    grows, and equal strengths meet at the midpoint. Elements with
    identical anchors and strengths stack perpendicular to the segment,
    spaced by ``spacing`` and centered on it.
    """
    if strength_a <= 0 or strength_b <= 0:
        raise LayoutError(
            f"Magnet strengths must be positive, got {strength_a} and {strength_b}"
        )
    ax, ay = anchor_a
    bx, by = anchor_b
    if ax == bx and ay == by:
        raise LayoutError("Magnet anchors coincide")
    fraction = strength_b / (strength_a + strength_b)
    x = ax + fraction * (bx - ax)
    y = ay + fraction * (by - ay)
    if stack_count > 1:
        length = math.hypot(bx - ax, by - ay)
        perp_x = -(by - ay) / length
        perp_y = (bx - ax) / length
        offset = spacing * (stack_index - (stack_count - 1) / 2.0)
        x += perp_x * offset
        y += perp_y * offset
    return Placement(atom, x, y, width, height, None)


def _random_rng(seed: int, container_key: str, atom_label: str) -> random.Random:
    digest = hashlib.sha256(f"{seed}|{container_key}|{atom_label}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def layout_random(container: Container, ctx: LayoutContext) -> list[Placement]:
    """Scatter elements without overlap, deterministically per seed.

    Each element draws positions from its own generator, seeded by the
    context seed, the container key and the atom label, until its
    bounding box (inflated by spacing) is disjoint from the boxes placed
    so far. After 1000 failed attempts the element falls back to the
    first free cell of a grid over the space.
    """
    if not container.elements:
        return []
    space = ctx.space
    half_w, half_h = ctx.elem_width / 2.0, ctx.elem_height / 2.0
    x_min, x_max = space.x + half_w, space.x2 - half_w
    y_min, y_max = space.y + half_h, space.y2 - half_h
    if x_min > x_max:
        x_min = x_max = space.center[0]
    if y_min > y_max:
        y_min = y_max = space.center[1]

    def free(x: float, y: float) -> bool:
        return all(
            boxes_disjoint(x, y, ctx.elem_width, ctx.elem_height, px, py, pw, ph, gap=ctx.spacing)
            for px, py, pw, ph in boxes
        )

    boxes: list[tuple[float, float, float, float]] = []
    placements = []
    cell_w = ctx.elem_width + ctx.spacing
    cell_h = ctx.elem_height + ctx.spacing
    per_row = max(int(space.width // cell_w), 1)
    for atom in container.elements:
        rng = _random_rng(ctx.seed, container.key, atom.label)
        position = None
        for _ in range(RANDOM_MAX_ATTEMPTS):
            x = rng.uniform(x_min, x_max)
            y = rng.uniform(y_min, y_max)
            if free(x, y):
                position = (x, y)
                break
        if position is None:
            cell = 0
            while True:
                row, col = divmod(cell, per_row)
                x = space.x + cell_w * col + cell_w / 2.0
                y = space.y + cell_h * row + cell_h / 2.0
                if free(x, y):
                    position = (x, y)
                    break
                cell += 1
        boxes.append((position[0], position[1], ctx.elem_width, ctx.elem_height))
        placements.append(
            Placement(atom, position[0], position[1], ctx.elem_width, ctx.elem_height, None)
        )
    return placements


def layout_absolute(
    container: Container, point: tuple[float, float] | None, ctx: LayoutContext
) -> list[Placement]:
    """Place every element at one fixed point (the canvas origin by default)."""
    x, y = point if point is not None else (0.0, 0.0)
    return [
        Placement(atom, x, y, ctx.elem_width, ctx.elem_height, None)
        for atom in container.elements
    ]


# ---------------------------------------------------------------------------
# Scene assembly


def _partition_rect(placement: Placement, spacing: float) -> Rect:
    partition = placement.partition
    if isinstance(partition, Rect):
        return partition
    if isinstance(partition, Slice):
        return Rect(
            partition.cx - partition.radius,
            partition.cy - partition.radius,
            partition.radius * 2.0,
            partition.radius * 2.0,
        )
    return Rect(
        placement.x - placement.width / 2.0 - spacing,
        placement.y - placement.height / 2.0 - spacing,
        placement.width + 2.0 * spacing,
        placement.height + 2.0 * spacing,
    )


def _fit_rect(rect: Rect, canvas: Rect) -> Rect:
    """Shift a rectangle the minimal distance needed to sit on the canvas."""
    x, y = rect.x, rect.y
    if rect.width <= canvas.width:
        x = min(max(x, canvas.x), canvas.x2 - rect.width)
    else:
        x = canvas.x
    if rect.height <= canvas.height:
        y = min(max(y, canvas.y), canvas.y2 - rect.height)
    else:
        y = canvas.y
    return Rect(x, y, rect.width, rect.height)


def _edge_band(
    canvas: Rect, claims: dict[str, float], direction: str, thickness: float
) -> tuple[Rect, tuple[float, float], str]:
    """Claim a band along a canvas edge; returns (band, anchor point, run direction)."""
    offset = claims[direction]
    claims[direction] = offset + thickness
    if direction == "S":
        band = Rect(canvas.x, canvas.y2 - offset - thickness, canvas.width, thickness)
        return band, (band.x, band.center[1]), "E"
    if direction == "N":
        band = Rect(canvas.x, canvas.y + offset, canvas.width, thickness)
        return band, (band.x, band.center[1]), "E"
    if direction == "E":
        band = Rect(canvas.x2 - offset - thickness, canvas.y, thickness, canvas.height)
        return band, (band.center[0], band.y), "S"
    band = Rect(canvas.x + offset, canvas.y, thickness, canvas.height)
    return band, (band.center[0], band.y), "S"


def _element_size(spec: LayoutSpec, entry: SigSpec | None) -> tuple[float, float]:
    style = style_for(spec, entry)
    return (
        style.width if style.width is not None else DEFAULT_ELEM_WIDTH,
        style.height if style.height is not None else DEFAULT_ELEM_HEIGHT,
    )


def _strength_lookup(
    view: _View, entry: SigSpec, selector, element: Atom, warnings: list[str]
) -> float:
    """A magnet strength param is either a constant or a relation name."""
    if isinstance(selector, float):
        return selector
    fdecl = _resolve_view_field(view, selector)
    if fdecl is not None:
        elem_col = _column_for_sig(view.base, fdecl, element.sig)
        if elem_col is not None:
            for row in fdecl.tuples:
                if row[elem_col] != element.label:
                    continue
                for i, value in enumerate(row):
                    if i == elem_col:
                        continue
                    try:
                        return float(view.base.atoms[value].display)
                    except ValueError:
                        continue
    warnings.append(
        f"no usable strength for {element.label} via {selector!r}, defaulting to 1"
    )
    return 1.0


def layout_scene(
    source: Instance | ProjectedInstance,
    spec: LayoutSpec,
    draw_base_edges: bool = False,
) -> Scene:
    """Lay out one scene: validate, anchor, place, then collect edges.

    Binary fields become edges unless they are base relations or ordering
    fields, which the layout already expresses through adjacency
    (draw_base_edges restores them). Fields of higher arity never draw.
    """
    view = _as_view(source)
    diagnostics = validate_spec(spec, view.base)
    errors = [str(d) for d in diagnostics if d.severity == "error"]
    if errors:
        raise LayoutError("; ".join(errors))

    containers = build_anchor_graph(source, spec)
    canvas = Rect(0.0, 0.0, spec.canvas[0], spec.canvas[1])
    warnings: list[str] = []

    # First pass: root Linear containers claim edge bands in order.
    claims = {"N": 0.0, "S": 0.0, "E": 0.0, "W": 0.0}
    frames: dict[str, tuple[Rect, tuple[float, float], str]] = {}
    for container in containers:
        if container.entry is None or container.anchor is not None or container.orphan:
            continue
        if container.manager != "Linear":
            continue
        direction = decode_params(container.entry)
        elem_w, elem_h = _element_size(spec, container.entry)
        thickness = (
            elem_h + 2.0 * spec.spacing if direction in ("N", "S") else elem_w + 2.0 * spec.spacing
        )
        frames[container.key] = _edge_band(canvas, claims, direction, thickness)
    central = Rect(
        canvas.x + claims["W"],
        canvas.y + claims["N"],
        max(canvas.width - claims["W"] - claims["E"], 1.0),
        max(canvas.height - claims["N"] - claims["S"], 1.0),
    )

    placements: dict[str, Placement] = {}
    node_container: dict[str, Container] = {}
    ordered_placements: list[tuple[Container, Placement]] = []
    orphan_offset = 0.0

    def place(container: Container, ctx: LayoutContext, items: list[Placement]) -> None:
        for placement in items:
            placements[placement.atom.label] = placement
            node_container[placement.atom.label] = container
            ordered_placements.append((container, placement))

    for container in containers:
        entry = container.entry
        elem_w, elem_h = _element_size(spec, entry)
        band_h = elem_h + 2.0 * spec.spacing

        anchor_placement = None
        if container.anchor is not None:
            anchor_placement = placements.get(container.anchor.label)
            mate_missing = (
                container.anchor_mate is not None
                and container.anchor_mate.label not in placements
            )
            if anchor_placement is None or mate_missing:
                warnings.append(
                    f"anchor of container {container.key!r} is not placed, "
                    "falling back to random placement"
                )
                container = Container(
                    key=container.key,
                    sig=container.sig,
                    manager="Random",
                    elements=container.elements,
                    entry=entry,
                    orphan=True,
                )

        manager = container.manager
        if container.orphan or (entry is None):
            height = band_h
            space = Rect(central.x, central.y2 - orphan_offset - height, central.width, height)
            orphan_offset += height
            ctx = LayoutContext(_fit_rect(space, canvas), spec.spacing, elem_w, elem_h, spec.seed)
            place(container, ctx, layout_random(container, ctx))
            continue

        params = decode_params(entry)

        if container.anchor is None:
            # Root container.
            if manager == "Linear":
                space, anchor_pos, run = frames[container.key]
                container.anchor_pos = anchor_pos
                ctx = LayoutContext(space, spec.spacing, elem_w, elem_h, spec.seed)
                place(container, ctx, layout_linear(container, run, ctx))
            elif manager == "Grid":
                container.anchor_pos = (central.x, central.y)
                ctx = LayoutContext(central, spec.spacing, elem_w, elem_h, spec.seed)
                place(container, ctx, layout_grid(container, params, ctx))
            elif manager == "Circular":
                container.anchor_pos = central.center
                ctx = LayoutContext(central, spec.spacing, elem_w, elem_h, spec.seed)
                place(container, ctx, layout_circular(container, params, ctx))
            elif manager == "Tree":
                container.anchor_pos = (central.center[0], central.y)
                ctx = LayoutContext(central, spec.spacing, elem_w, elem_h, spec.seed)
                place(container, ctx, layout_tree(container, params, ctx))
            elif manager == "Magnet":
                raise LayoutError(
                    f"Magnet container {container.key!r} needs an anchor relation, not root"
                )
            elif manager == "Absolute":
                ctx = LayoutContext(central, spec.spacing, elem_w, elem_h, spec.seed)
                place(container, ctx, layout_absolute(container, params, ctx))
            else:
                ctx = LayoutContext(central, spec.spacing, elem_w, elem_h, spec.seed)
                place(container, ctx, layout_random(container, ctx))
            continue

        anchor = anchor_placement
        anchor_part = _partition_rect(anchor, spec.spacing)
        a_top = anchor.y - anchor.height / 2.0
        a_bottom = anchor.y + anchor.height / 2.0
        count = len(container.elements)

        if manager == "Linear":
            direction = params
            if direction in ("E", "W"):
                space = _fit_rect(
                    Rect(anchor_part.x, a_top - band_h, anchor_part.width, band_h), canvas
                )
                container.anchor_pos = (
                    space.x if direction == "E" else space.x2,
                    space.center[1],
                )
            else:
                extent = band_h * count
                if direction == "N":
                    space = _fit_rect(
                        Rect(anchor_part.x, a_top - extent, anchor_part.width, extent), canvas
                    )
                    container.anchor_pos = (anchor.x, space.y2)
                else:
                    space = _fit_rect(
                        Rect(anchor_part.x, a_bottom, anchor_part.width, extent), canvas
                    )
                    container.anchor_pos = (anchor.x, space.y)
            ctx = LayoutContext(space, spec.spacing, elem_w, elem_h, spec.seed)
            place(container, ctx, layout_linear(container, direction, ctx))
        elif manager == "Grid":
            rows = math.ceil(count / params)
            space = _fit_rect(
                Rect(anchor_part.x, a_top - band_h * rows, anchor_part.width, band_h * rows),
                canvas,
            )
            container.anchor_pos = (space.x, space.y)
            ctx = LayoutContext(space, spec.spacing, elem_w, elem_h, spec.seed)
            place(container, ctx, layout_grid(container, params, ctx))
        elif manager == "Circular":
            container.anchor_pos = (anchor.x, anchor.y)
            ctx = LayoutContext(canvas, spec.spacing, elem_w, elem_h, spec.seed)
            place(container, ctx, layout_circular(container, params, ctx))
        elif manager == "Tree":
            layers = bfs_layer_count(params, count)
            space = _fit_rect(
                Rect(anchor_part.x, a_bottom, anchor_part.width, band_h * layers), canvas
            )
            container.anchor_pos = (space.center[0], space.y)
            ctx = LayoutContext(space, spec.spacing, elem_w, elem_h, spec.seed)
            place(container, ctx, layout_tree(container, params, ctx))
        elif manager == "Magnet":
            mate = placements[container.anchor_mate.label]
            anchor_xy = (anchor.x, anchor.y)
            mate_xy = (mate.x, mate.y)
            groups: dict[tuple[float, float], list[Atom]] = {}
            strengths: dict[str, tuple[float, float]] = {}
            for element in container.elements:
                pull_a = _strength_lookup(view, entry, params[0], element, warnings)
                pull_b = _strength_lookup(view, entry, params[1], element, warnings)
                strengths[element.label] = (pull_a, pull_b)
                groups.setdefault((pull_a, pull_b), []).append(element)
            ctx = LayoutContext(canvas, spec.spacing, elem_w, elem_h, spec.seed)
            items = []
            for element in container.elements:
                pull_a, pull_b = strengths[element.label]
                peers = groups[(pull_a, pull_b)]
                items.append(
                    layout_magnet(
                        element,
                        anchor_xy,
                        mate_xy,
                        pull_a,
                        pull_b,
                        width=elem_w,
                        height=elem_h,
                        spacing=spec.spacing,
                        stack_index=peers.index(element),
                        stack_count=len(peers),
                    )
                )
            place(container, ctx, items)
        elif manager == "Absolute":
            ctx = LayoutContext(canvas, spec.spacing, elem_w, elem_h, spec.seed)
            place(container, ctx, layout_absolute(container, params, ctx))
        else:
            space = _fit_rect(anchor_part, canvas)
            ctx = LayoutContext(space, spec.spacing, elem_w, elem_h, spec.seed)
            place(container, ctx, layout_random(container, ctx))

    # Collect marks per atom (unary remainders of projected fields).
    marks_by_atom: dict[str, list[str]] = {}
    for name in sorted(view.marks):
        for label in view.marks[name]:
            marks_by_atom.setdefault(label, []).append(name)

    nodes = []
    for container, placement in ordered_placements:
        style = style_for(spec, container.entry)
        nodes.append(
            SceneNode(
                atom=placement.atom.label,
                display=placement.atom.display,
                sig=view.base.sigs[container.sig].display,
                x=round_coord(placement.x),
                y=round_coord(placement.y),
                width=round_coord(placement.width),
                height=round_coord(placement.height),
                shape=style.shape or "rect",
                background=style.background,
                img=style.img,
                manager=container.manager,
                marks=tuple(marks_by_atom.get(placement.atom.label, ())),
            )
        )

    suppressed = set()
    if not draw_base_edges:
        for entry in spec.entries:
            if entry.base != "root":
                fdecl = _resolve_view_field(view, entry.base)
                if fdecl is not None:
                    suppressed.add(fdecl.name)
        for sig_name in view.sigs:
            fdecl = ordering_field(view.base, sig_name)
            if fdecl is not None:
                suppressed.add(fdecl.name)

    node_by_label = {n.atom: n for n in nodes}
    edges = []
    for name in sorted(view.fields):
        fdecl = view.fields[name]
        if fdecl.arity != 2 or name in suppressed:
            continue
        for src, dst in sorted(set(fdecl.tuples)):
            if src not in node_by_label or dst not in node_by_label:
                continue
            a, b = node_by_label[src], node_by_label[dst]
            edges.append(SceneEdge(field=name, src=src, dst=dst, x1=a.x, y1=a.y, x2=b.x, y2=b.y))
    edges.sort(key=lambda e: (e.field, e.src, e.dst))

    return Scene(
        state_label=view.state_label,
        canvas=canvas,
        nodes=nodes,
        edges=edges,
        warnings=warnings,
    )
