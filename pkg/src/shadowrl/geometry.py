"""Exact 2D primitives for the arena: segment intersection, clamping, distances."""

import math
from dataclasses import dataclass

from shadowrl.errors import ShadowRLError


class GeometryError(ShadowRLError, ValueError):
    """Raised for invalid geometric input (non-finite or degenerate)."""
    pass


@dataclass(frozen=True, slots=True)
class Point2:
    """A point in arena coordinates."""
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise GeometryError(f"Point coordinates must be finite, got ({self.x}, {self.y})")


@dataclass(frozen=True, slots=True)
class Segment2:
    """A closed line segment between two distinct endpoints."""
    p: Point2
    q: Point2

    def __post_init__(self):
        if self.p == self.q:
            raise GeometryError(f"Degenerate segment at ({self.p.x}, {self.p.y})")


def _orientation(a: Point2, b: Point2, c: Point2) -> int:
    """Sign of the cross product (b - a) x (c - a): 1 ccw, -1 cw, 0 collinear."""
    cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
    if cross > 0:
        return 1
    if cross < 0:
        return -1
    return 0


def _on_segment(a: Point2, b: Point2, c: Point2) -> bool:
    """Whether c, known to be collinear with a-b, lies inside the bounding box of a-b."""
    return (
        min(a.x, b.x) <= c.x <= max(a.x, b.x)
        and min(a.y, b.y) <= c.y <= max(a.y, b.y)
    )


def segments_intersect(a: Segment2, b: Segment2) -> bool:
    """Whether two closed segments share at least one point.

    Endpoint contact and collinear overlap both count as intersection.
    """
    o1 = _orientation(a.p, a.q, b.p)
    o2 = _orientation(a.p, a.q, b.q)
    o3 = _orientation(b.p, b.q, a.p)
    o4 = _orientation(b.p, b.q, a.q)

    if o1 != o2 and o3 != o4:
        return True

    if o1 == 0 and _on_segment(a.p, a.q, b.p):
        return True
    if o2 == 0 and _on_segment(a.p, a.q, b.q):
        return True
    if o3 == 0 and _on_segment(b.p, b.q, a.p):
        return True
    if o4 == 0 and _on_segment(b.p, b.q, a.q):
        return True
    return False


def clamp_to_arena(p: Point2, lo: float, hi: float) -> Point2:
    """Clamp each coordinate of p into [lo, hi]."""
    if not lo < hi:
        raise GeometryError(f"Arena bounds must satisfy lo < hi, got lo={lo}, hi={hi}")
    return Point2(min(max(p.x, lo), hi), min(max(p.y, lo), hi))


def distance(p: Point2, q: Point2) -> float:
    """Euclidean distance between two points."""
    return math.hypot(p.x - q.x, p.y - q.y)


def point_segment_distance(p: Point2, s: Segment2) -> float:
    """Distance from a point to the closest point of a closed segment."""
    dx = s.q.x - s.p.x
    dy = s.q.y - s.p.y
    t = ((p.x - s.p.x) * dx + (p.y - s.p.y) * dy) / (dx * dx + dy * dy)
    t = min(max(t, 0.0), 1.0)
    return math.hypot(p.x - (s.p.x + t * dx), p.y - (s.p.y + t * dy))
