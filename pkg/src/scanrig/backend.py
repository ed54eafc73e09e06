"""Motor execution backends.

Only the simulated backend is implemented; a GPIO pulse generator would
consume the same timing-annotated MotionPlans. The simulator keeps exact
step bookkeeping, optionally sleeps out plan durations (Realtime mode), and
can inject faults to exercise crash/resume paths.
"""

from __future__ import annotations

import enum
import threading
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass

from scanrig.errors import ConfigError, HardwareFault
from scanrig.kinematics import (
    Axis,
    AxisConfig,
    AxisState,
    Direction,
    MotionPlan,
    RailConfig,
)


class TimeMode(enum.Enum):
    INSTANT = "instant"
    REALTIME = "realtime"


@dataclass(frozen=True)
class BackendPose:
    theta: float
    phi: float
    rail_mm: float
    moving: bool = False


@dataclass(frozen=True)
class SimBackendConfig:
    time_mode: TimeMode = TimeMode.INSTANT
    fail_after_n_moves: int | None = None

    def __post_init__(self):
        if self.fail_after_n_moves is not None and self.fail_after_n_moves < 0:
            raise ConfigError("fail_after_n_moves must be >= 0")


@dataclass(frozen=True)
class MoveCommand:
    """One executed move, for verifying command sequences in tests."""

    axis: Axis
    direction: Direction
    steps: int


class PositionerBackend(ABC):
    """Contract every motor backend satisfies. One execute in flight at a time."""

    @abstractmethod
    def execute(self, plan: MotionPlan, axis: Axis) -> BackendPose: ...

    @abstractmethod
    def home(self) -> BackendPose: ...

    @abstractmethod
    def pose(self) -> BackendPose: ...

    def execute_rail(self, plan: MotionPlan) -> BackendPose:
        raise HardwareFault("this backend has no linear rail")


class SimBackend(PositionerBackend):
    """Deterministic in-memory positioner.

    Pose is tracked as integer step counters, so accumulated moves never
    drift: the reported angle is always step_count * degrees_per_step wrapped
    into [0, 360). A configured fault fires mid-move after half the steps.
    """

    def __init__(self, theta_cfg: AxisConfig, phi_cfg: AxisConfig,
                 rail_cfg: RailConfig | None = None,
                 config: SimBackendConfig = SimBackendConfig()):
        self._axis_cfgs = {Axis.THETA: theta_cfg, Axis.PHI: phi_cfg}
        self._rail_cfg = rail_cfg or RailConfig()
        self._config = config
        self._steps = {Axis.THETA: 0, Axis.PHI: 0}
        self._rail_steps = 0
        self._moving = False
        self._moves_done = 0
        self._lock = threading.Lock()
        self.command_log: list[MoveCommand] = []

    def _angle(self, axis: Axis) -> float:
        cfg = self._axis_cfgs[axis]
        return (self._steps[axis] % cfg.steps_per_revolution) * cfg.degrees_per_step

    def _snapshot(self) -> BackendPose:
        return BackendPose(
            theta=self._angle(Axis.THETA),
            phi=self._angle(Axis.PHI),
            rail_mm=self._rail_steps * self._rail_cfg.mm_per_step,
            moving=self._moving,
        )

    def execute(self, plan: MotionPlan, axis: Axis) -> BackendPose:
        sign = 1 if plan.direction == Direction.CW else -1
        with self._lock:
            if self._moving:
                raise HardwareFault("move already in flight")
            self._moving = True
        try:
            fail_at = self._config.fail_after_n_moves
            if fail_at is not None and self._moves_done >= fail_at:
                with self._lock:
                    self._steps[axis] += sign * (plan.step_count // 2)
                raise HardwareFault(
                    f"injected fault on move {self._moves_done + 1} ({axis.value})"
                )
            if self._config.time_mode is TimeMode.REALTIME:
                time.sleep(plan.duration_us / 1e6)
            with self._lock:
                self._steps[axis] += sign * plan.step_count
                self._moves_done += 1
                self.command_log.append(MoveCommand(axis, plan.direction, plan.step_count))
        finally:
            with self._lock:
                self._moving = False
        return self.pose()

    def home(self) -> BackendPose:
        with self._lock:
            self._steps = {Axis.THETA: 0, Axis.PHI: 0}
            self._rail_steps = 0
        return self.pose()

    def pose(self) -> BackendPose:
        with self._lock:
            return self._snapshot()

    def axis_state(self, axis: Axis) -> AxisState:
        """Angle plus raw step counter for one axis (angle wraps, steps do not)."""
        with self._lock:
            return AxisState(angle=self._angle(axis), step_position=self._steps[axis])

    def execute_rail(self, plan: MotionPlan) -> BackendPose:
        """Rail analogue of execute (the rail is optional and not part of scans)."""
        sign = 1 if plan.direction == Direction.CW else -1
        with self._lock:
            if self._moving:
                raise HardwareFault("move already in flight")
            self._moving = True
        try:
            if self._config.time_mode is TimeMode.REALTIME:
                time.sleep(plan.duration_us / 1e6)
            with self._lock:
                self._rail_steps += sign * plan.step_count
        finally:
            with self._lock:
                self._moving = False
        return self.pose()
