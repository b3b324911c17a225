"""Pydantic model for a reach-avoid problem instance.

A scenario is the agent start, the goal and an optional obstacle segment.
Scenarios serialize to a single 9-field text record so test sets can be
frozen to disk and shared across runs.
"""

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from shadowrl.errors import ShadowRLError
from shadowrl.geometry import GeometryError, Point2, Segment2

ARENA_LO = 0.0
ARENA_HI = 10.0
ARENA_MID = 5.0

# Stands in for missing obstacle endpoints; lies outside the arena.
NO_OBSTACLE_SENTINEL = -1.0

RECORD_FIELDS = 9


class ScenarioFormatError(ShadowRLError):
    """Raised when a scenario record cannot be parsed."""
    pass


def _in_arena(p: Point2) -> bool:
    return ARENA_LO <= p.x <= ARENA_HI and ARENA_LO <= p.y <= ARENA_HI


class Scenario(BaseModel):
    """A random reach-avoid problem instance.

    Attributes:
        start: Agent initial position, on the left half of the arena.
        goal: Goal position, on the right half of the arena.
        obstacle: Optional obstacle segment.
    """
    model_config = ConfigDict(frozen=True)

    start: Point2 = Field(..., description="Agent start position")
    goal: Point2 = Field(..., description="Goal position")
    obstacle: Optional[Segment2] = Field(None, description="Obstacle segment, if any")

    @model_validator(mode="after")
    def _check_layout(self) -> "Scenario":
        points = [self.start, self.goal]
        if self.obstacle is not None:
            points.extend([self.obstacle.p, self.obstacle.q])
        for p in points:
            if not _in_arena(p):
                raise ValueError(f"Point ({p.x}, {p.y}) lies outside the arena")
        if not self.start.x < ARENA_MID:
            raise ValueError(f"Start must lie on the left half, got x={self.start.x}")
        if not self.goal.x > ARENA_MID:
            raise ValueError(f"Goal must lie on the right half, got x={self.goal.x}")
        return self

    @property
    def has_obstacle(self) -> bool:
        return self.obstacle is not None

    def to_record(self) -> str:
        """Serialize to `start_x start_y goal_x goal_y has_obstacle p_x p_y q_x q_y`.

        Floats are written with repr so a record round-trips bit-exactly.
        """
        if self.obstacle is None:
            tail = [0] + [NO_OBSTACLE_SENTINEL] * 4
        else:
            o = self.obstacle
            tail = [1, o.p.x, o.p.y, o.q.x, o.q.y]
        values = [self.start.x, self.start.y, self.goal.x, self.goal.y] + tail
        return " ".join(repr(v) for v in values)

    @classmethod
    def from_record(cls, line: str) -> "Scenario":
        """Parse a record produced by `to_record`.

        Raises:
            ScenarioFormatError: If the record is malformed or invalid.
        """
        parts = line.split()
        if len(parts) != RECORD_FIELDS:
            raise ScenarioFormatError(
                f"Scenario record needs {RECORD_FIELDS} fields, got {len(parts)}: {line!r}"
            )
        try:
            sx, sy, gx, gy = (float(v) for v in parts[:4])
            has_obstacle = int(parts[4])
            px, py, qx, qy = (float(v) for v in parts[5:])
        except ValueError as e:
            raise ScenarioFormatError(f"Unparseable scenario record {line!r}: {e}") from e

        if has_obstacle not in (0, 1):
            raise ScenarioFormatError(f"has_obstacle must be 0 or 1, got {has_obstacle}")

        try:
            obstacle = Segment2(Point2(px, py), Point2(qx, qy)) if has_obstacle else None
            return cls(start=Point2(sx, sy), goal=Point2(gx, gy), obstacle=obstacle)
        except (GeometryError, ValueError) as e:
            raise ScenarioFormatError(f"Invalid scenario record {line!r}: {e}") from e
