"""HTTP control service: jog, run lifecycle, progress, archive download.

All endpoints live under /api/v1 with JSON bodies. The companion web UI (if
built) is served as static assets under /ui. Configuration comes from an
optional JSON file with environment-variable overrides:

    SCANRIG_HOST, SCANRIG_PORT, SCANRIG_DATA_DIR, SCANRIG_BACKEND, SCANRIG_UI_DIR
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request
from fastapi.responses import FileResponse, JSONResponse, RedirectResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from scanrig import errors
from scanrig.backend import BackendPose, SimBackend, SimBackendConfig, TimeMode
from scanrig.kinematics import default_phi_config, default_theta_config
from scanrig.planner import ScanConfig
from scanrig.runner import JogAxis, RunManager, RunState
from scanrig.store import SessionConfig, SessionMetadata

_STATUS_BY_ERROR = {
    errors.ConfigError: 400,
    errors.RangeError: 400,
    errors.DomainError: 400,
    errors.FormatError: 400,
    errors.ConflictError: 409,
    errors.BusyError: 409,
    errors.StateError: 409,
    errors.OrderError: 409,
    errors.NotFoundError: 404,
}


@dataclass(frozen=True)
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8471
    data_dir: str = "scanrig-data"
    backend_mode: str = "instant"  # instant | realtime
    ui_dir: str | None = None


def load_service_config(path: str | Path | None = None) -> ServiceConfig:
    """Config file (JSON) merged with environment overrides."""
    doc: dict[str, Any] = {}
    if path is not None:
        doc = json.loads(Path(path).read_text())
        unknown = set(doc) - {"host", "port", "data_dir", "backend_mode", "ui_dir"}
        if unknown:
            raise errors.ConfigError(f"unknown service config keys: {sorted(unknown)}")
    env = {
        "host": os.environ.get("SCANRIG_HOST"),
        "port": os.environ.get("SCANRIG_PORT"),
        "data_dir": os.environ.get("SCANRIG_DATA_DIR"),
        "backend_mode": os.environ.get("SCANRIG_BACKEND"),
        "ui_dir": os.environ.get("SCANRIG_UI_DIR"),
    }
    doc.update({k: v for k, v in env.items() if v is not None})
    if "port" in doc:
        doc["port"] = int(doc["port"])
    cfg = ServiceConfig(**doc)
    if cfg.backend_mode not in ("instant", "realtime"):
        raise errors.ConfigError(f"backend_mode must be instant or realtime, got {cfg.backend_mode!r}")
    return cfg


# -- wire schemas ----------------------------------------------------------

class PoseBody(BaseModel):
    theta: float
    phi: float
    rail_mm: float
    moving: bool

    @classmethod
    def from_pose(cls, pose: BackendPose) -> "PoseBody":
        return cls(theta=pose.theta, phi=pose.phi, rail_mm=pose.rail_mm, moving=pose.moving)


class StatusBody(BaseModel):
    pose: PoseBody
    active_run_id: str | None


class JogBody(BaseModel):
    axis: JogAxis
    delta: float


class ScanBody(BaseModel):
    theta_step: float
    phi_step: float
    theta_extent: float = 360.0
    phi_extent: float = 180.0
    samples_per_position: int = Field(default=1, ge=1)


class MetadataBody(BaseModel):
    location: str = ""
    dut_name: str = ""
    remote_device: str = ""
    nominal_distance_cm: float = 0.0
    operator_note: str = ""


class CreateRunBody(BaseModel):
    run_id: str
    scan: ScanBody
    source_name: str
    source_config: dict[str, Any] = Field(default_factory=dict)
    metadata: MetadataBody = Field(default_factory=MetadataBody)
    seed: int = 0


class RunStateBody(BaseModel):
    run_id: str
    phase: str
    completed_positions: int
    total_positions: int
    current_pose: PoseBody
    last_error: str | None

    @classmethod
    def from_state(cls, state: RunState) -> "RunStateBody":
        return cls(
            run_id=state.run_id,
            phase=state.phase.value,
            completed_positions=state.completed_positions,
            total_positions=state.total_positions,
            current_pose=PoseBody.from_pose(state.current_pose),
            last_error=state.last_error,
        )


class SourceFieldBody(BaseModel):
    name: str
    type: str
    required: bool
    default: Any = None


class SourceBody(BaseModel):
    name: str
    fields: list[SourceFieldBody]


# -- app -------------------------------------------------------------------

def build_manager(cfg: ServiceConfig) -> RunManager:
    backend = SimBackend(
        default_theta_config(),
        default_phi_config(),
        config=SimBackendConfig(
            time_mode=TimeMode.REALTIME if cfg.backend_mode == "realtime" else TimeMode.INSTANT
        ),
    )
    return RunManager(Path(cfg.data_dir), backend,
                      default_theta_config(), default_phi_config())


def create_app(cfg: ServiceConfig | None = None, manager: RunManager | None = None) -> FastAPI:
    cfg = cfg or ServiceConfig()
    manager = manager or build_manager(cfg)
    app = FastAPI(title="scanrig", version="0.1.0")
    app.state.manager = manager

    @app.exception_handler(errors.ScanRigError)
    async def scanrig_error_handler(request: Request, exc: errors.ScanRigError):
        status = _STATUS_BY_ERROR.get(type(exc), 500)
        return JSONResponse(
            status_code=status,
            content={"error": type(exc).__name__, "message": str(exc)},
        )

    @app.get("/api/v1/status", response_model=StatusBody)
    def get_status():
        pose, active = manager.status()
        return StatusBody(pose=PoseBody.from_pose(pose), active_run_id=active)

    @app.post("/api/v1/jog", response_model=PoseBody)
    def post_jog(body: JogBody):
        return PoseBody.from_pose(manager.jog(body.axis, body.delta))

    @app.post("/api/v1/home", response_model=PoseBody)
    def post_home():
        return PoseBody.from_pose(manager.home())

    @app.get("/api/v1/sources", response_model=list[SourceBody])
    def get_sources():
        out = []
        for name in manager.registry.names():
            descriptor = manager.registry.descriptor(name)
            fields = [
                SourceFieldBody(
                    name=f.name,
                    type=f.type.__name__,
                    required=f.required,
                    default=None if f.required else f.default,
                )
                for f in descriptor.config_schema
            ]
            out.append(SourceBody(name=name, fields=fields))
        return out

    @app.post("/api/v1/runs", response_model=RunStateBody, status_code=201)
    def post_runs(body: CreateRunBody):
        session = SessionConfig(
            run_id=body.run_id,
            scan=ScanConfig(**body.scan.model_dump()),
            source_name=body.source_name,
            source_config=body.source_config,
            metadata=SessionMetadata(**body.metadata.model_dump()),
            created_at=datetime.now(timezone.utc).isoformat(timespec="seconds"),
            seed=body.seed,
        )
        return RunStateBody.from_state(manager.create_run(session))

    @app.get("/api/v1/runs", response_model=list[RunStateBody])
    def get_runs():
        return [RunStateBody.from_state(s) for s in manager.list_runs()]

    @app.get("/api/v1/runs/{run_id}", response_model=RunStateBody)
    def get_run(run_id: str):
        return RunStateBody.from_state(manager.run_state(run_id))

    @app.post("/api/v1/runs/{run_id}/start", response_model=RunStateBody)
    def post_start(run_id: str):
        return RunStateBody.from_state(manager.start_run(run_id))

    @app.post("/api/v1/runs/{run_id}/pause", response_model=RunStateBody)
    def post_pause(run_id: str):
        return RunStateBody.from_state(manager.pause_run(run_id))

    @app.post("/api/v1/runs/{run_id}/abort", response_model=RunStateBody)
    def post_abort(run_id: str):
        return RunStateBody.from_state(manager.abort_run(run_id))

    @app.get("/api/v1/runs/{run_id}/archive")
    def get_archive(run_id: str):
        path = manager.archive_path(run_id)
        return FileResponse(path, media_type="application/zip", filename=path.name)

    @app.get("/api/v1/runs/{run_id}/preview")
    def get_preview(run_id: str, phi: float | None = None):
        return manager.preview(run_id, phi)

    ui_dir = cfg.ui_dir
    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

        @app.get("/", include_in_schema=False)
        def root():
            return RedirectResponse("/ui/")

    return app


def serve(cfg: ServiceConfig) -> None:
    import uvicorn

    uvicorn.run(create_app(cfg), host=cfg.host, port=cfg.port, log_level="warning")
