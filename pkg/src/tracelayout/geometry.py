"""Small 2D primitives used by the layout engine.

Coordinates follow screen conventions: x grows east, y grows south,
so "north" means decreasing y.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# Unit vectors per compass direction, screen coordinates.
DIRECTION_VECTORS = {
    "N": (0.0, -1.0),
    "S": (0.0, 1.0),
    "E": (1.0, 0.0),
    "W": (-1.0, 0.0),
}


@dataclass(frozen=True)
class Rect:
    x: float
    y: float
    width: float
    height: float

    @property
    def x2(self) -> float:
        return self.x + self.width

    @property
    def y2(self) -> float:
        return self.y + self.height

    @property
    def center(self) -> tuple[float, float]:
        return (self.x + self.width / 2.0, self.y + self.height / 2.0)

    def contains(self, px: float, py: float, tol: float = 1e-6) -> bool:
        return (
            self.x - tol <= px <= self.x2 + tol
            and self.y - tol <= py <= self.y2 + tol
        )

    def inset(self, amount: float) -> Rect:
        return Rect(
            self.x + amount,
            self.y + amount,
            max(self.width - 2.0 * amount, 0.0),
            max(self.height - 2.0 * amount, 0.0),
        )


@dataclass(frozen=True)
class Slice:
    """Angular partition of a circle, degrees measured clockwise from 12 o'clock."""

    cx: float
    cy: float
    radius: float
    start_deg: float
    end_deg: float

    @property
    def span_deg(self) -> float:
        return self.end_deg - self.start_deg

    def contains(self, px: float, py: float, tol: float = 1e-6) -> bool:
        dx = px - self.cx
        dy = py - self.cy
        if math.hypot(dx, dy) > self.radius + tol:
            return False
        # atan2 with (dx, -dy) yields a clockwise angle from 12 o'clock.
        angle = math.degrees(math.atan2(dx, -dy)) % 360.0
        start = self.start_deg % 360.0
        span = self.span_deg
        offset = (angle - start) % 360.0
        return offset <= span + tol or offset >= 360.0 - tol


def boxes_disjoint(
    ax: float, ay: float, aw: float, ah: float,
    bx: float, by: float, bw: float, bh: float,
    gap: float = 0.0,
) -> bool:
    """True when two center-based boxes do not overlap, with a required gap."""
    return (
        abs(ax - bx) >= (aw + bw) / 2.0 + gap
        or abs(ay - by) >= (ah + bh) / 2.0 + gap
    )


def round_coord(value: float) -> float:
    """Round to the 0.01 px grid used by emitted scenes."""
    rounded = round(value + 0.0, 2)
    return 0.0 if rounded == 0.0 else rounded
