"""Angle/step conversions and trapezoidal motion planning for the positioner.

Two rotation axes (base and arm) at 0.01 deg/step plus an optional linear
rail at 0.04 mm/step. All functions are pure; configs are immutable.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

try:
    from scanrig._ramp import COMPILED as RAMP_COMPILED, step_delays_us
except ImportError:  # extension not built; pure-Python kernel
    from scanrig._ramp_py import COMPILED as RAMP_COMPILED, step_delays_us

from scanrig.errors import ConfigError, RangeError

FULL_CIRCLE_DEG = 360.0

# Defaults sized so a 10 deg scan transition finishes in under a second.
DEFAULT_MAX_VELOCITY_DPS = 30.0
DEFAULT_ACCELERATION_DPS2 = 60.0
DEFAULT_DEGREES_PER_STEP = 0.01
DEFAULT_MM_PER_STEP = 0.04


class Axis(enum.Enum):
    THETA = "theta"  # base rotation
    PHI = "phi"      # arm rotation


class Direction(enum.Enum):
    CW = "cw"   # increasing angle
    CCW = "ccw"


def _round_half_away(x: float) -> int:
    # Deterministic tie rule (Python's round() banker-rounds).
    if x >= 0:
        return int(math.floor(x + 0.5))
    return int(math.ceil(x - 0.5))


@dataclass(frozen=True)
class AxisConfig:
    """Geometry and dynamics of one rotation axis."""

    axis: Axis
    degrees_per_step: float = DEFAULT_DEGREES_PER_STEP
    min_angle: float = 0.0
    max_angle: float = 360.0
    max_velocity: float = DEFAULT_MAX_VELOCITY_DPS   # deg/s
    acceleration: float = DEFAULT_ACCELERATION_DPS2  # deg/s^2

    def __post_init__(self):
        if self.degrees_per_step <= 0:
            raise ConfigError("degrees_per_step must be positive")
        if self.min_angle >= self.max_angle:
            raise ConfigError("min_angle must be below max_angle")
        if self.max_velocity <= 0 or self.acceleration <= 0:
            raise ConfigError("max_velocity and acceleration must be positive")

    @property
    def full_circle(self) -> bool:
        return self.max_angle - self.min_angle >= FULL_CIRCLE_DEG

    @property
    def steps_per_revolution(self) -> int:
        return _round_half_away(FULL_CIRCLE_DEG / self.degrees_per_step)


@dataclass(frozen=True)
class RailConfig:
    """Linear rail geometry."""

    mm_per_step: float = DEFAULT_MM_PER_STEP
    travel_min: float = 0.0
    travel_max: float = 500.0

    def __post_init__(self):
        if self.mm_per_step <= 0:
            raise ConfigError("mm_per_step must be positive")
        if self.travel_min >= self.travel_max:
            raise ConfigError("travel_min must be below travel_max")


@dataclass(frozen=True)
class AxisState:
    """Live pose of one axis: angle and the step count from home."""

    angle: float
    step_position: int


@dataclass(frozen=True)
class MotionPlan:
    """Timed step sequence for one move on one axis."""

    direction: Direction
    step_intervals: tuple[int, ...]  # microseconds between consecutive steps

    @property
    def step_count(self) -> int:
        return len(self.step_intervals)

    @property
    def duration_us(self) -> int:
        return sum(self.step_intervals)


def angle_to_steps(angle: float, cfg: AxisConfig) -> int:
    """Convert an angle to a motor step count, ties rounding away from zero.

    Out-of-range angles wrap mod 360 on full-circle axes and raise RangeError
    on limited ones.
    """
    if angle < cfg.min_angle or angle > cfg.max_angle:
        if not cfg.full_circle:
            raise RangeError(
                f"angle {angle} outside [{cfg.min_angle}, {cfg.max_angle}] on {cfg.axis.value}"
            )
        angle = angle % FULL_CIRCLE_DEG
    return _round_half_away(angle / cfg.degrees_per_step)


def steps_to_angle(steps: int, cfg: AxisConfig) -> float:
    return steps * cfg.degrees_per_step


def mm_to_steps(distance: float, cfg: RailConfig) -> int:
    """Convert a rail position to steps, ties rounding away from zero."""
    if distance < cfg.travel_min or distance > cfg.travel_max:
        raise RangeError(
            f"rail position {distance} outside [{cfg.travel_min}, {cfg.travel_max}] mm"
        )
    return _round_half_away(distance / cfg.mm_per_step)


def steps_to_mm(steps: int, cfg: RailConfig) -> float:
    return steps * cfg.mm_per_step


def plan_move(from_angle: float, to_angle: float, cfg: AxisConfig) -> MotionPlan:
    """Plan the signed move from one angle to another.

    The move always runs along the commanded delta (no shortest-path wrap), so
    a +10 deg command rotates 10 deg even when the wrapped pose ends up lower.
    On limited axes both endpoints must lie within the travel range.
    """
    if not cfg.full_circle:
        for a in (from_angle, to_angle):
            if a < cfg.min_angle or a > cfg.max_angle:
                raise RangeError(
                    f"angle {a} outside [{cfg.min_angle}, {cfg.max_angle}] on {cfg.axis.value}"
                )
    delta_steps = _round_half_away(to_angle / cfg.degrees_per_step) - _round_half_away(
        from_angle / cfg.degrees_per_step
    )
    direction = Direction.CW if delta_steps >= 0 else Direction.CCW
    n = abs(delta_steps)
    steps_per_s = cfg.max_velocity / cfg.degrees_per_step
    steps_per_s2 = cfg.acceleration / cfg.degrees_per_step
    return MotionPlan(direction, tuple(step_delays_us(n, steps_per_s, steps_per_s2)))


def plan_rail_move(from_mm: float, to_mm: float, cfg: RailConfig,
                   max_velocity_mm_s: float = 20.0, acceleration_mm_s2: float = 40.0) -> MotionPlan:
    """Plan a linear rail move between two absolute positions."""
    delta_steps = mm_to_steps(to_mm, cfg) - mm_to_steps(from_mm, cfg)
    direction = Direction.CW if delta_steps >= 0 else Direction.CCW
    n = abs(delta_steps)
    return MotionPlan(
        direction,
        tuple(step_delays_us(n, max_velocity_mm_s / cfg.mm_per_step,
                             acceleration_mm_s2 / cfg.mm_per_step)),
    )


def default_theta_config() -> AxisConfig:
    return AxisConfig(axis=Axis.THETA)


def default_phi_config() -> AxisConfig:
    return AxisConfig(axis=Axis.PHI)
