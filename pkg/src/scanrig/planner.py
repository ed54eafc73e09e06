"""Spherical scan planning: the serpentine base/arm sweep as a state machine.

The arm sweeps up one column, the base advances one step, the arm sweeps back
down, and so on until the base has covered its full extent. Gathering happens
at every grid point exactly once, including both column extremes. The cursor
form makes interrupted scans resumable at any position boundary.

Angles are handled in integer centidegrees internally (the positioner's 0.01
deg resolution), so the column-extreme equality tests are exact.
"""

from __future__ import annotations

from dataclasses import dataclass

from scanrig.errors import CheckpointError, ConfigError

CDEG_PER_DEG = 100


def _to_cdeg(value: float, name: str) -> int:
    c = round(value * CDEG_PER_DEG)
    if abs(value * CDEG_PER_DEG - c) > 1e-6:
        raise ConfigError(f"{name} must be a multiple of 0.01 deg, got {value}")
    return int(c)


@dataclass(frozen=True)
class ScanConfig:
    """Parameters of one full measurement run."""

    theta_step: float
    phi_step: float
    theta_extent: float = 360.0
    phi_extent: float = 180.0
    samples_per_position: int = 1

    def __post_init__(self):
        if self.theta_step <= 0 or self.phi_step <= 0:
            raise ConfigError("step sizes must be positive")
        if not 0 < self.theta_extent <= 360 or not 0 < self.phi_extent <= 360:
            raise ConfigError("extents must lie in (0, 360]")
        if self.samples_per_position < 1:
            raise ConfigError("samples_per_position must be >= 1")
        # Non-divisor steps would never hit the column-extreme equality tests.
        if self._theta_extent_c % self._theta_step_c != 0:
            raise ConfigError(
                f"theta_step {self.theta_step} does not divide extent {self.theta_extent}"
            )
        if self._phi_extent_c % self._phi_step_c != 0:
            raise ConfigError(
                f"phi_step {self.phi_step} does not divide extent {self.phi_extent}"
            )

    @property
    def _theta_step_c(self) -> int:
        return _to_cdeg(self.theta_step, "theta_step")

    @property
    def _phi_step_c(self) -> int:
        return _to_cdeg(self.phi_step, "phi_step")

    @property
    def _theta_extent_c(self) -> int:
        return _to_cdeg(self.theta_extent, "theta_extent")

    @property
    def _phi_extent_c(self) -> int:
        return _to_cdeg(self.phi_extent, "phi_extent")

    @property
    def theta_count(self) -> int:
        return self._theta_extent_c // self._theta_step_c

    @property
    def phi_level_count(self) -> int:
        return self._phi_extent_c // self._phi_step_c + 1

    @property
    def total_positions(self) -> int:
        return self.theta_count * self.phi_level_count

    def theta_values(self) -> list[float]:
        """Base-angle grid levels, ascending (exact centidegree arithmetic)."""
        return [i * self._theta_step_c / CDEG_PER_DEG for i in range(self.theta_count)]

    def phi_values(self) -> list[float]:
        """Arm-angle grid levels, ascending."""
        return [j * self._phi_step_c / CDEG_PER_DEG for j in range(self.phi_level_count)]


@dataclass(frozen=True)
class ScanPosition:
    """One planned pose in the gather sequence."""

    index: int
    theta: float
    phi: float


@dataclass(frozen=True)
class PlanCursor:
    """Mutable loop state of the sweep, between two gathers."""

    theta: float
    phi: float
    arm_up: bool
    next_index: int


def initial_cursor() -> PlanCursor:
    return PlanCursor(theta=0.0, phi=0.0, arm_up=True, next_index=0)


def next_position(cursor: PlanCursor, cfg: ScanConfig) -> tuple[ScanPosition | None, PlanCursor]:
    """Emit the next gather position and the advanced cursor.

    Returns (None, cursor) once the base has covered its full extent.
    """
    tc = _to_cdeg(cursor.theta, "cursor.theta")
    pc = _to_cdeg(cursor.phi, "cursor.phi")
    if tc >= cfg._theta_extent_c:
        return None, cursor

    pos = ScanPosition(cursor.next_index, tc / CDEG_PER_DEG, pc / CDEG_PER_DEG)
    arm_up = cursor.arm_up
    if arm_up:
        if pc == cfg._phi_extent_c:  # top of column: advance base, sweep back down
            tc += cfg._theta_step_c
            arm_up = False
        else:
            pc += cfg._phi_step_c
    else:
        if pc == 0:  # bottom of column
            tc += cfg._theta_step_c
            arm_up = True
        else:
            pc -= cfg._phi_step_c
    return pos, PlanCursor(tc / CDEG_PER_DEG, pc / CDEG_PER_DEG, arm_up, cursor.next_index + 1)


def generate_plan(cfg: ScanConfig) -> list[ScanPosition]:
    """The full ordered gather sequence for one run."""
    plan = []
    cursor = initial_cursor()
    while True:
        pos, cursor = next_position(cursor, cfg)
        if pos is None:
            return plan
        plan.append(pos)


def resume_cursor(completed: set[int], cfg: ScanConfig) -> PlanCursor:
    """Rebuild the cursor whose next emission follows the completed prefix.

    Checkpointing guarantees the completed set is a prefix {0..k-1}; anything
    else means a corrupted checkpoint.
    """
    k = len(completed)
    if completed != set(range(k)):
        raise CheckpointError("completed positions do not form a plan prefix")
    if k > cfg.total_positions:
        raise CheckpointError(
            f"{k} completed positions exceed plan length {cfg.total_positions}"
        )
    cursor = initial_cursor()
    for _ in range(k):
        pos, cursor = next_position(cursor, cfg)
        if pos is None:  # unreachable given the length check
            raise CheckpointError("plan exhausted during replay")
    return cursor
