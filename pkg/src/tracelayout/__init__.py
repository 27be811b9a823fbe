"""Deterministic diagram layouts and transitions for Alloy Analyzer traces."""

from .engine import (
    Container,
    LayoutContext,
    Placement,
    Scene,
    SceneEdge,
    SceneNode,
    build_anchor_graph,
    layout_absolute,
    layout_circular,
    layout_grid,
    layout_linear,
    layout_magnet,
    layout_random,
    layout_scene,
    layout_tree,
)
from .errors import (
    BundleError,
    InstanceIntegrityError,
    InstanceParseError,
    LayoutError,
    OrderingError,
    ProjectionError,
    SpecError,
    TraceLayoutError,
    TransitionError,
)
from .export import build_bundle, canonical_json, parse_bundle, scene_to_json, scene_to_svg
from .instance import (
    Atom,
    FieldDecl,
    Instance,
    SigDecl,
    StateOrder,
    element_order,
    instance_to_xml,
    parse_instance_xml,
    state_order,
)
from .layoutspec import (
    Diagnostic,
    LayoutSpec,
    SigSpec,
    StyleSpec,
    parse_spec,
    validate_spec,
)
from .projection import ProjectedInstance, project, projection_columns
from .transitions import (
    Keyframe,
    SceneDelta,
    TransitionPlan,
    diff_scenes,
    plan_animated,
    plan_basic,
    plan_connection_update,
)

__version__ = "0.1.0"
