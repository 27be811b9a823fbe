"""Parsing and validation of the JSON layout specification.

The document is an array of per-sig entries. An optional leading object
with no "sig" key carries document-wide settings (canvas size, spacing,
seed, default style). Each entry binds one sig to a layout manager, an
anchor relation (or the literal "root"), manager parameters, and a
style.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import InstanceIntegrityError, SpecError
from .instance import Instance

LAYOUT_NAMES = ("Linear", "Grid", "Circular", "Tree", "Magnet", "Random", "Absolute")
SHAPE_NAMES = ("rect", "ellipse", "triangle", "parallelogram")
DIRECTION_NAMES = ("N", "S", "E", "W")

DEFAULT_CANVAS = (1024.0, 768.0)
DEFAULT_SPACING = 16.0
DEFAULT_SEED = 0


@dataclass(frozen=True)
class StyleSpec:
    img: str | None = None
    background: str | None = None
    shape: str | None = None
    width: float | None = None
    height: float | None = None

    def merged_over(self, base: StyleSpec) -> StyleSpec:
        """This style with unset entries filled in from a base style."""
        return StyleSpec(
            img=self.img if self.img is not None else base.img,
            background=self.background if self.background is not None else base.background,
            shape=self.shape if self.shape is not None else base.shape,
            width=self.width if self.width is not None else base.width,
            height=self.height if self.height is not None else base.height,
        )


@dataclass(frozen=True)
class SigSpec:
    sig: str
    layout: str
    base: str = "root"
    params: tuple[str, ...] = ()
    style: StyleSpec = StyleSpec()
    index: int = 0  # position in the document, for diagnostics


@dataclass(frozen=True)
class LayoutSpec:
    entries: tuple[SigSpec, ...]
    defaults: StyleSpec = StyleSpec()
    canvas: tuple[float, float] = DEFAULT_CANVAS
    spacing: float = DEFAULT_SPACING
    seed: int = DEFAULT_SEED


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" or "warning"
    message: str
    entry_index: int | None = None

    def __str__(self) -> str:
        where = f"entry {self.entry_index}: " if self.entry_index is not None else ""
        return f"{self.severity}: {where}{self.message}"


def _as_param(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        raise SpecError(f"param {value!r} must be a string or number")
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    raise SpecError(f"param {value!r} must be a string or number")


def _parse_style(obj, where: str) -> StyleSpec:
    if not isinstance(obj, dict):
        raise SpecError(f"{where}: style must be an object")
    known = {"img", "background", "shape", "width", "height"}
    unknown = sorted(set(obj) - known)
    if unknown:
        raise SpecError(f"{where}: unknown style keys {unknown}")
    img = obj.get("img")
    background = obj.get("background")
    shape = obj.get("shape")
    for key, value in (("img", img), ("background", background), ("shape", shape)):
        if value is not None and not isinstance(value, str):
            raise SpecError(f"{where}: style {key} must be a string")
    if shape is not None and shape not in SHAPE_NAMES:
        raise SpecError(f"{where}: shape {shape!r} not one of {list(SHAPE_NAMES)}")
    width = obj.get("width")
    height = obj.get("height")
    for key, value in (("width", width), ("height", height)):
        if value is not None and (not isinstance(value, (int, float)) or isinstance(value, bool) or value <= 0):
            raise SpecError(f"{where}: style {key} must be a positive number")
    return StyleSpec(
        img=img,
        background=background,
        shape=shape,
        width=float(width) if width is not None else None,
        height=float(height) if height is not None else None,
    )


def _parse_globals(obj) -> tuple[tuple[float, float], float, int, StyleSpec]:
    known = {"canvas", "spacing", "seed", "defaults"}
    unknown = sorted(set(obj) - known)
    if unknown:
        raise SpecError(f"global object: unknown keys {unknown}")
    canvas = DEFAULT_CANVAS
    if "canvas" in obj:
        raw = obj["canvas"]
        if isinstance(raw, dict) and set(raw) == {"width", "height"}:
            raw = [raw["width"], raw["height"]]
        if (
            not isinstance(raw, (list, tuple))
            or len(raw) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in raw)
            or raw[0] <= 0
            or raw[1] <= 0
        ):
            raise SpecError("global object: canvas must give positive width and height")
        canvas = (float(raw[0]), float(raw[1]))
    spacing = DEFAULT_SPACING
    if "spacing" in obj:
        raw = obj["spacing"]
        if not isinstance(raw, (int, float)) or isinstance(raw, bool) or raw <= 0:
            raise SpecError("global object: spacing must be a positive number")
        spacing = float(raw)
    seed = DEFAULT_SEED
    if "seed" in obj:
        raw = obj["seed"]
        if not isinstance(raw, int) or isinstance(raw, bool):
            raise SpecError("global object: seed must be an integer")
        seed = raw
    defaults = StyleSpec()
    if "defaults" in obj:
        defaults = _parse_style(obj["defaults"], "global defaults")
    return canvas, spacing, seed, defaults


def parse_spec(text: str) -> LayoutSpec:
    """Parse the JSON layout specification document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"layout spec is not valid JSON: {exc}") from None
    if not isinstance(doc, list):
        raise SpecError("layout spec root must be an array of entries")

    canvas, spacing, seed, defaults = DEFAULT_CANVAS, DEFAULT_SPACING, DEFAULT_SEED, StyleSpec()
    items = list(doc)
    if items and isinstance(items[0], dict) and "sig" not in items[0]:
        canvas, spacing, seed, defaults = _parse_globals(items[0])
        items = items[1:]

    entries: list[SigSpec] = []
    seen_sigs: set[str] = set()
    for position, raw in enumerate(items):
        where = f"entry {position}"
        if not isinstance(raw, dict):
            raise SpecError(f"{where}: must be an object")
        known = {"sig", "layout", "base", "params", "style"}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise SpecError(f"{where}: unknown keys {unknown}")
        sig = raw.get("sig")
        if not isinstance(sig, str) or not sig:
            raise SpecError(f"{where}: sig must be a non-empty string")
        if sig in seen_sigs:
            raise SpecError(f"{where}: duplicate entry for sig {sig!r}")
        seen_sigs.add(sig)
        layout = raw.get("layout")
        if layout not in LAYOUT_NAMES:
            raise SpecError(
                f"{where}: unknown layout {layout!r}, valid names are {list(LAYOUT_NAMES)}"
            )
        base = raw.get("base", "root")
        if not isinstance(base, str) or not base:
            raise SpecError(f"{where}: base must be a relation name or \"root\"")
        raw_params = raw.get("params", [])
        if not isinstance(raw_params, list):
            raise SpecError(f"{where}: params must be an array")
        params = tuple(_as_param(p) for p in raw_params)
        style = _parse_style(raw.get("style", {}), where)
        entries.append(
            SigSpec(sig=sig, layout=layout, base=base, params=params, style=style, index=position)
        )

    return LayoutSpec(
        entries=tuple(entries), defaults=defaults, canvas=canvas, spacing=spacing, seed=seed
    )


def _float_param(value: str) -> float | None:
    try:
        return float(value)
    except ValueError:
        return None


def decode_params(entry: SigSpec):
    """Decode an entry's params into the manager's typed arguments.

    Raises SpecError with a message suitable for diagnostics.
    """
    layout, params = entry.layout, entry.params
    if layout == "Linear":
        if len(params) != 1 or params[0] not in DIRECTION_NAMES:
            raise SpecError(
                f"Linear takes one direction param from {list(DIRECTION_NAMES)}, got {list(params)}"
            )
        return params[0]
    if layout == "Grid":
        if len(params) != 1 or not params[0].isdigit() or int(params[0]) < 1:
            raise SpecError(f"Grid takes one positive column count, got {list(params)}")
        return int(params[0])
    if layout == "Tree":
        if len(params) != 1 or not params[0].isdigit() or int(params[0]) < 2:
            raise SpecError(f"Tree takes one children count of at least 2, got {list(params)}")
        return int(params[0])
    if layout == "Circular":
        if not params:
            return None
        radius = _float_param(params[0]) if len(params) == 1 else None
        if radius is None or radius <= 0:
            raise SpecError(f"Circular takes an optional positive radius, got {list(params)}")
        return radius
    if layout == "Magnet":
        if len(params) != 2:
            raise SpecError(f"Magnet takes two strength params, got {list(params)}")
        decoded = []
        for p in params:
            number = _float_param(p)
            if number is not None:
                if number <= 0:
                    raise SpecError(f"Magnet strength {p!r} must be positive")
                decoded.append(number)
            else:
                decoded.append(p)  # a relation name, resolved per element
        return tuple(decoded)
    if layout in ("Random", "Absolute"):
        if not params:
            return None
        if len(params) == 2:
            x, y = _float_param(params[0]), _float_param(params[1])
            if x is not None and y is not None:
                return (x, y)
        raise SpecError(f"{layout} takes an optional coordinate pair, got {list(params)}")
    raise SpecError(f"unknown layout {layout!r}")


def _base_connects(instance: Instance, base: str, sig_name: str) -> bool:
    try:
        fdecl = instance.resolve_field(base)
    except InstanceIntegrityError:
        return False
    if fdecl.arity < 2:
        return False
    return any(
        instance.sig_matches(column, sig_name) or instance.sig_matches(sig_name, column)
        for column in fdecl.column_sigs
    )


def validate_spec(spec: LayoutSpec, instance: Instance) -> list[Diagnostic]:
    """Check a parsed spec against an instance.

    Returns diagnostics sorted by entry index; errors make the spec
    unusable for layout, warnings do not.
    """
    diagnostics: list[Diagnostic] = []
    resolved: dict[str, int] = {}
    anchor_of: dict[str, str] = {}

    for entry in spec.entries:
        try:
            decl = instance.resolve_sig(entry.sig)
        except InstanceIntegrityError as exc:
            diagnostics.append(Diagnostic("error", str(exc), entry.index))
            continue
        if decl.name in resolved:
            diagnostics.append(
                Diagnostic(
                    "error",
                    f"sig {decl.name!r} already configured by entry {resolved[decl.name]}",
                    entry.index,
                )
            )
            continue
        resolved[decl.name] = entry.index

        try:
            decode_params(entry)
        except SpecError as exc:
            diagnostics.append(Diagnostic("error", str(exc), entry.index))

        if entry.layout == "Magnet":
            for p in entry.params:
                if _float_param(p) is None and not _base_connects(instance, p, decl.name):
                    diagnostics.append(
                        Diagnostic(
                            "error",
                            f"Magnet strength relation {p!r} does not involve sig {decl.name!r}",
                            entry.index,
                        )
                    )

        if entry.base != "root":
            if not _base_connects(instance, entry.base, decl.name):
                diagnostics.append(
                    Diagnostic(
                        "error",
                        f"base relation {entry.base!r} does not involve sig {decl.name!r}",
                        entry.index,
                    )
                )
            else:
                fdecl = instance.resolve_field(entry.base)
                others = [
                    c for c in fdecl.column_sigs
                    if not (instance.sig_matches(c, decl.name) or instance.sig_matches(decl.name, c))
                ]
                if others:
                    anchor_of[decl.name] = others[0]

    # Anchor cycles make a topological layout impossible; report them here
    # so callers do not have to attempt a layout to find out.
    for start in anchor_of:
        seen = [start]
        current = anchor_of.get(start)
        while current is not None:
            if current == start:
                cycle = " -> ".join(seen + [start])
                diagnostics.append(
                    Diagnostic("error", f"anchor cycle: {cycle}", resolved.get(start))
                )
                break
            if current in seen:
                break
            seen.append(current)
            current = anchor_of.get(current)

    configured = set(resolved)
    for name, decl in instance.sigs.items():
        if decl.builtin or not decl.atoms or name in configured:
            continue
        diagnostics.append(
            Diagnostic(
                "warning",
                f"sig {name!r} has no layout entry and defaults to Random placement",
            )
        )

    def sort_key(d: Diagnostic):
        return (d.entry_index is None, d.entry_index or 0, d.severity, d.message)

    return sorted(diagnostics, key=sort_key)


def style_for(spec: LayoutSpec, entry: SigSpec | None) -> StyleSpec:
    """Effective style of an entry, with document defaults filled in."""
    if entry is None:
        return spec.defaults
    return entry.style.merged_over(spec.defaults)
