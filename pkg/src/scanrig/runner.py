"""Run state machine: owns the positioner, executes scans, checkpoints.

One manager per positioner; at most one run is ever in phase RUNNING. The
run loop works position by position: move base/arm to the target, acquire
the configured number of samples, durably append the record. Pause and abort
take effect at position boundaries only, so checkpoints stay prefix-shaped.

On construction the manager rescans its data directory: sessions with a
durable prefix become PAUSED (resumable via start), finished ones COMPLETED.
Combined with per-position source seeding, a resumed run produces an archive
identical to one that was never interrupted.
"""

from __future__ import annotations

import enum
import logging
import threading
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from scanrig import store
from scanrig.backend import BackendPose, PositionerBackend
from scanrig.errors import (
    BusyError,
    FormatError,
    HardwareFault,
    NotFoundError,
    StateError,
)
from scanrig.kinematics import Axis, AxisConfig, RailConfig, plan_move, plan_rail_move
from scanrig.planner import generate_plan, next_position, resume_cursor
from scanrig.sources import SourceRegistry, default_registry
from scanrig.store import MeasurementRecord, SessionConfig


class RunPhase(str, enum.Enum):
    CREATED = "created"
    RUNNING = "running"
    PAUSED = "paused"
    COMPLETED = "completed"
    ABORTED = "aborted"
    FAILED = "failed"


class JogAxis(str, enum.Enum):
    THETA = "theta"
    PHI = "phi"
    RAIL = "rail"


@dataclass(frozen=True)
class RunState:
    run_id: str
    phase: RunPhase
    completed_positions: int
    total_positions: int
    current_pose: BackendPose
    last_error: str | None = None


class _ManagedRun:
    def __init__(self, config: SessionConfig, phase: RunPhase, completed: int):
        self.config = config
        self.phase = phase
        self.completed = completed
        self.total = config.scan.total_positions
        self.last_error: str | None = None
        self.pause_requested = False
        self.abort_requested = False
        self.thread: threading.Thread | None = None
        self.position_means: dict[int, tuple[float, float, float]] | None = None


class RunManager:
    """Serialized control of one positioner plus the full run lifecycle."""

    def __init__(self, data_dir: Path, backend: PositionerBackend,
                 theta_cfg: AxisConfig, phi_cfg: AxisConfig,
                 rail_cfg: RailConfig | None = None,
                 registry: SourceRegistry | None = None):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.backend = backend
        self.axis_cfgs = {Axis.THETA: theta_cfg, Axis.PHI: phi_cfg}
        self.rail_cfg = rail_cfg or RailConfig()
        self.registry = registry or default_registry()
        self._lock = threading.RLock()
        self._runs: dict[str, _ManagedRun] = {}
        self._recover_sessions()

    # -- recovery ---------------------------------------------------------

    def _recover_sessions(self) -> None:
        for entry in sorted(self.data_dir.iterdir()):
            if not (entry / "config.json").is_file():
                continue
            try:
                cfg = store.read_session_config(self.data_dir, entry.name)
                completed = store.detect_resumable(self.data_dir, entry.name)
            except FormatError as e:
                # Session torn mid-creation by a crash; leave it for inspection.
                logging.getLogger(__name__).warning("skipping session %s: %s", entry.name, e)
                continue
            if completed >= cfg.scan.total_positions:
                phase = RunPhase.COMPLETED
            elif completed > 0:
                phase = RunPhase.PAUSED
            else:
                phase = RunPhase.CREATED
            self._runs[cfg.run_id] = _ManagedRun(cfg, phase, completed)

    # -- manual motion ----------------------------------------------------

    def _active_run_id(self) -> str | None:
        for run_id, run in self._runs.items():
            if run.phase is RunPhase.RUNNING:
                return run_id
        return None

    def jog(self, axis: JogAxis, delta: float) -> BackendPose:
        """Incremental manual move; refused while a run is active."""
        with self._lock:
            if self._active_run_id() is not None:
                raise BusyError("positioner is executing a run")
            pose = self.backend.pose()
            if axis is JogAxis.RAIL:
                plan = plan_rail_move(pose.rail_mm, pose.rail_mm + delta, self.rail_cfg)
                return self.backend.execute_rail(plan)
            ax = Axis.THETA if axis is JogAxis.THETA else Axis.PHI
            current = pose.theta if ax is Axis.THETA else pose.phi
            plan = plan_move(current, current + delta, self.axis_cfgs[ax])
            if plan.step_count == 0:
                return pose
            return self.backend.execute(plan, ax)

    def home(self) -> BackendPose:
        with self._lock:
            if self._active_run_id() is not None:
                raise BusyError("positioner is executing a run")
            return self.backend.home()

    # -- run lifecycle ----------------------------------------------------

    def create_run(self, cfg: SessionConfig) -> RunState:
        """Open the session (config durable on return) and register the run."""
        self.registry.create(cfg.source_name, cfg.source_config)  # validates
        with self._lock:
            store.open_session(self.data_dir, cfg)  # reopened by the run loop
            run = _ManagedRun(cfg, RunPhase.CREATED, 0)
            run.position_means = {}
            self._runs[cfg.run_id] = run
            return self._state(run)

    def start_run(self, run_id: str) -> RunState:
        with self._lock:
            run = self._get(run_id)
            if run.phase not in (RunPhase.CREATED, RunPhase.PAUSED):
                raise StateError(f"cannot start run in phase {run.phase.value}")
            active = self._active_run_id()
            if active is not None:
                raise BusyError(f"run {active!r} is already executing")
            run.phase = RunPhase.RUNNING
            run.pause_requested = False
            run.abort_requested = False
            run.thread = threading.Thread(
                target=self._run_loop, args=(run,), name=f"run-{run_id}", daemon=True
            )
            run.thread.start()
            return self._state(run)

    def pause_run(self, run_id: str) -> RunState:
        """Request a pause and wait for the position boundary."""
        with self._lock:
            run = self._get(run_id)
            if run.phase is not RunPhase.RUNNING:
                raise StateError(f"cannot pause run in phase {run.phase.value}")
            run.pause_requested = True
            thread = run.thread
        if thread is not None:
            thread.join()
        with self._lock:
            return self._state(run)

    def abort_run(self, run_id: str) -> RunState:
        """Abort at the next position boundary (Paused/Created abort directly)."""
        with self._lock:
            run = self._get(run_id)
            if run.phase in (RunPhase.COMPLETED, RunPhase.ABORTED, RunPhase.FAILED):
                raise StateError(f"cannot abort run in phase {run.phase.value}")
            if run.phase in (RunPhase.CREATED, RunPhase.PAUSED):
                run.phase = RunPhase.ABORTED
                return self._state(run)
            run.abort_requested = True
            thread = run.thread
        if thread is not None:
            thread.join()
        with self._lock:
            return self._state(run)

    def run_state(self, run_id: str) -> RunState:
        with self._lock:
            return self._state(self._get(run_id))

    def list_runs(self) -> list[RunState]:
        with self._lock:
            return [self._state(run) for run in self._runs.values()]

    def status(self) -> tuple[BackendPose, str | None]:
        with self._lock:
            return self.backend.pose(), self._active_run_id()

    def archive_path(self, run_id: str) -> Path:
        """Finalize (idempotent) and return the archive for a finished run."""
        with self._lock:
            run = self._get(run_id)
            if run.phase in (RunPhase.RUNNING, RunPhase.CREATED, RunPhase.PAUSED):
                raise BusyError(f"run {run_id!r} is in phase {run.phase.value}, not finished")
        return store.finalize(self.data_dir / run_id)

    def preview(self, run_id: str, phi: float | None = None) -> dict:
        """Per-base-angle means at one arm angle, over the records so far."""
        with self._lock:
            run = self._get(run_id)
            means = self._position_means(run)
            completed = run.completed
            state = self._state(run)
        if phi is None:
            phi = means[completed - 1][1] if completed > 0 else 0.0
        points = sorted(
            (t, m) for t, p, m in (means[i] for i in range(completed)) if p == phi
        )
        return {
            "run_id": run_id,
            "phase": state.phase.value,
            "completed": completed,
            "total": state.total_positions,
            "phi": phi,
            "points": [{"theta": t, "mean_cm": m} for t, m in points],
        }

    # -- internals --------------------------------------------------------

    def _get(self, run_id: str) -> _ManagedRun:
        run = self._runs.get(run_id)
        if run is None:
            raise NotFoundError(f"unknown run {run_id!r}")
        return run

    def _state(self, run: _ManagedRun) -> RunState:
        return RunState(
            run_id=run.config.run_id,
            phase=run.phase,
            completed_positions=run.completed,
            total_positions=run.total,
            current_pose=self.backend.pose(),
            last_error=run.last_error,
        )

    def _position_means(self, run: _ManagedRun) -> dict[int, tuple[float, float, float]]:
        if run.position_means is None:  # recovered session: rebuild from disk
            plan = generate_plan(run.config.scan)
            records_dir = self.data_dir / run.config.run_id / "records"
            means = {}
            for pos in plan[: run.completed]:
                name = store.record_filename(pos.theta, pos.phi)
                record = store._record_from_csv(
                    name, (records_dir / name).read_bytes(), pos.index
                )
                values = [s.value_cm for s in record.samples]
                means[pos.index] = (pos.theta, pos.phi, float(np.mean(values)))
            run.position_means = means
        return run.position_means

    def _move_axis(self, axis: Axis, current: float, target: float) -> float:
        plan = plan_move(current, target, self.axis_cfgs[axis])
        if plan.step_count > 0:
            self.backend.execute(plan, axis)
        return target

    def _run_loop(self, run: _ManagedRun) -> None:
        try:
            writer = store.resume_session(self.data_dir, run.config.run_id)
            source = self.registry.create(run.config.source_name, run.config.source_config)
            scan = run.config.scan
            cursor = resume_cursor(set(range(writer.completed)), scan)
            with self._lock:
                run.completed = writer.completed
                self._position_means(run)  # ensure preview cache exists
            pose = self.backend.pose()
            theta, phi = pose.theta, pose.phi
            while True:
                with self._lock:
                    if run.abort_requested:
                        run.phase = RunPhase.ABORTED
                        return
                    if run.pause_requested:
                        run.phase = RunPhase.PAUSED
                        return
                pos, cursor = next_position(cursor, scan)
                if pos is None:
                    with self._lock:
                        run.phase = RunPhase.COMPLETED
                    return
                theta = self._move_axis(Axis.THETA, theta, pos.theta)
                phi = self._move_axis(Axis.PHI, phi, pos.phi)
                samples = source.acquire(scan.samples_per_position, pos)
                writer.append_record(MeasurementRecord(pos, samples))
                mean = float(np.mean([s.value_cm for s in samples]))
                with self._lock:
                    run.completed = writer.completed
                    run.position_means[pos.index] = (pos.theta, pos.phi, mean)
        except HardwareFault as e:
            with self._lock:
                run.phase = RunPhase.FAILED
                run.last_error = str(e)
        except Exception as e:  # checkpoint stays intact; surface the cause
            with self._lock:
                run.phase = RunPhase.FAILED
                run.last_error = f"{type(e).__name__}: {e}"
