"""Run persistence: per-position CSV records, durable checkpoints, ZIP export.

Layout of a session directory under the data root:

    <run_id>/
      config.json      run configuration, written before any measurement
      manifest.json    completed-record count; the checkpoint commit record
      records/         one CSV per completed position, t######_p#####.csv
      extras/          optional user files, zipped verbatim

A record is committed by (1) atomically renaming its CSV into records/ and
(2) atomically rewriting the manifest with the bumped count, in that order.
The manifest is therefore the source of truth on resume: record files beyond
its count are leftovers of an interrupted append and get discarded.

File names encode the pose in integer centidegrees (t = base angle, 6 digits;
p = arm angle, 5 digits), which covers the positioner's 0.01 deg resolution
without float formatting ambiguity. CSV columns: timestamp_us,distance_cm
(plus one column per sample extra, sorted by key). Floats are written with
repr, so parsing returns bit-identical values.
"""

from __future__ import annotations

import dataclasses
import json
import os
import re
import zipfile
from dataclasses import dataclass, field
from pathlib import Path

from scanrig.errors import ConflictError, FormatError, OrderError, StorageError
from scanrig.planner import ScanConfig, ScanPosition, generate_plan
from scanrig.sources import Sample

_RUN_ID_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]*$")
_RECORD_RE = re.compile(r"^t(\d{6})_p(\d{5})\.csv$")

# Fixed ZIP entry timestamp so finalizing twice yields byte-identical archives.
_ZIP_DATE = (2020, 1, 1, 0, 0, 0)


@dataclass(frozen=True)
class SessionMetadata:
    location: str = ""
    dut_name: str = ""
    remote_device: str = ""
    nominal_distance_cm: float = 0.0
    operator_note: str = ""


@dataclass(frozen=True)
class SessionConfig:
    run_id: str
    scan: ScanConfig
    source_name: str
    source_config: dict = field(default_factory=dict)
    metadata: SessionMetadata = SessionMetadata()
    created_at: str = ""
    seed: int = 0

    def __post_init__(self):
        if not _RUN_ID_RE.match(self.run_id):
            raise ConflictError(f"run_id {self.run_id!r} is empty or not filesystem-safe")


@dataclass(frozen=True)
class MeasurementRecord:
    position: ScanPosition
    samples: list[Sample]


def record_filename(theta: float, phi: float) -> str:
    return f"t{round(theta * 100):06d}_p{round(phi * 100):05d}.csv"


def _write_durable(path: Path, data: bytes) -> None:
    tmp = path.with_name(path.name + ".tmp")
    try:
        with open(tmp, "wb") as f:
            f.write(data)
            f.flush()
            os.fsync(f.fileno())
        os.replace(tmp, path)
    except OSError as e:
        raise StorageError(f"failed writing {path}: {e}") from e


def _config_to_json(cfg: SessionConfig) -> bytes:
    doc = {
        "run_id": cfg.run_id,
        "scan": dataclasses.asdict(cfg.scan),
        "source_name": cfg.source_name,
        "source_config": cfg.source_config,
        "metadata": dataclasses.asdict(cfg.metadata),
        "created_at": cfg.created_at,
        "seed": cfg.seed,
    }
    return (json.dumps(doc, indent=2) + "\n").encode()


def _config_from_json(data: bytes) -> SessionConfig:
    try:
        doc = json.loads(data)
        return SessionConfig(
            run_id=doc["run_id"],
            scan=ScanConfig(**doc["scan"]),
            source_name=doc["source_name"],
            source_config=doc["source_config"],
            metadata=SessionMetadata(**doc["metadata"]),
            created_at=doc.get("created_at", ""),
            seed=doc["seed"],
        )
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(f"malformed session config: {e}") from e


def _record_to_csv(record: MeasurementRecord) -> bytes:
    extra_keys = sorted({k for s in record.samples for k in (s.extras or {})})
    lines = [",".join(["timestamp_us", "distance_cm"] + extra_keys)]
    for s in record.samples:
        row = [str(s.timestamp_us), repr(s.value_cm)]
        row += [(s.extras or {}).get(k, "") for k in extra_keys]
        lines.append(",".join(row))
    return ("\n".join(lines) + "\n").encode()


def _record_from_csv(name: str, data: bytes, index: int) -> MeasurementRecord:
    m = _RECORD_RE.match(name)
    if not m:
        raise FormatError(f"bad record file name {name!r}")
    theta = int(m.group(1)) / 100
    phi = int(m.group(2)) / 100
    lines = data.decode().splitlines()
    if not lines:
        raise FormatError(f"empty record file {name!r}")
    header = lines[0].split(",")
    if header[:2] != ["timestamp_us", "distance_cm"]:
        raise FormatError(f"bad CSV header in {name!r}: {lines[0]!r}")
    extra_keys = header[2:]
    samples = []
    for line in lines[1:]:
        cells = line.split(",")
        if len(cells) != len(header):
            raise FormatError(f"ragged CSV row in {name!r}: {line!r}")
        extras = {k: v for k, v in zip(extra_keys, cells[2:]) if v != ""} or None
        samples.append(Sample(int(cells[0]), float(cells[1]), extras))
    return MeasurementRecord(ScanPosition(index, theta, phi), samples)


class SessionWriter:
    """Single writer for one session directory; enforces prefix-order appends."""

    def __init__(self, directory: Path, config: SessionConfig, completed: int):
        self.directory = directory
        self.config = config
        self.completed = completed
        self.total = config.scan.total_positions

    @property
    def records_dir(self) -> Path:
        return self.directory / "records"

    def append_record(self, record: MeasurementRecord) -> int:
        """Durably persist one record; returns the new completed count."""
        if record.position.index != self.completed:
            raise OrderError(
                f"expected record index {self.completed}, got {record.position.index}"
            )
        name = record_filename(record.position.theta, record.position.phi)
        _write_durable(self.records_dir / name, _record_to_csv(record))
        self.completed += 1
        self._write_manifest()
        return self.completed

    def _write_manifest(self) -> None:
        doc = {
            "run_id": self.config.run_id,
            "completed": self.completed,
            "total": self.total,
            "finalized": self.completed == self.total,
        }
        _write_durable(self.directory / "manifest.json", (json.dumps(doc, indent=2) + "\n").encode())

    def finalize(self) -> Path:
        return finalize(self.directory)


def open_session(root: Path, cfg: SessionConfig) -> SessionWriter:
    """Create a fresh session directory; the config is durable on return."""
    directory = Path(root) / cfg.run_id
    if directory.exists():
        raise ConflictError(f"run_id {cfg.run_id!r} already in use")
    (directory / "records").mkdir(parents=True)
    _write_durable(directory / "config.json", _config_to_json(cfg))
    writer = SessionWriter(directory, cfg, completed=0)
    writer._write_manifest()
    return writer


def read_session_config(root: Path, run_id: str) -> SessionConfig:
    path = Path(root) / run_id / "config.json"
    if not path.exists():
        raise FormatError(f"no session config at {path}")
    return _config_from_json(path.read_bytes())


def _read_manifest(directory: Path) -> dict:
    path = directory / "manifest.json"
    if not path.exists():
        raise FormatError(f"missing manifest in {directory}")
    try:
        doc = json.loads(path.read_bytes())
        int(doc["completed"])
        return doc
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(f"malformed manifest in {directory}: {e}") from e


def detect_resumable(root: Path, run_id: str) -> int:
    """Durable completed-prefix length; discards any uncommitted record files."""
    directory = Path(root) / run_id
    if not directory.is_dir():
        raise FormatError(f"no session directory {directory}")
    cfg = read_session_config(root, run_id)
    completed = int(_read_manifest(directory)["completed"])
    committed = {
        record_filename(p.theta, p.phi) for p in generate_plan(cfg.scan)[:completed]
    }
    records_dir = directory / "records"
    for entry in records_dir.iterdir() if records_dir.is_dir() else []:
        if entry.name not in committed:  # interrupted append or temp leftover
            entry.unlink()
    return completed


def resume_session(root: Path, run_id: str) -> SessionWriter:
    """Reopen an interrupted session for appending after its durable prefix."""
    completed = detect_resumable(root, run_id)
    cfg = read_session_config(root, run_id)
    return SessionWriter(Path(root) / run_id, cfg, completed)


def finalize(directory: Path) -> Path:
    """Package the session as a ZIP next to its directory.

    Deterministic: same session contents produce byte-identical archives.
    Partial sessions are packaged too; the manifest's finalized flag records
    whether the run covered every planned position.
    """
    directory = Path(directory)
    manifest = _read_manifest(directory)  # validates presence
    zip_path = directory.with_name(directory.name + ".zip")
    tmp = zip_path.with_name(zip_path.name + ".tmp")
    entries = [directory / "config.json", directory / "manifest.json"]
    entries += sorted((directory / "records").glob("*.csv"))
    extras_dir = directory / "extras"
    if extras_dir.is_dir():
        entries += sorted(p for p in extras_dir.rglob("*") if p.is_file())
    try:
        with zipfile.ZipFile(tmp, "w", zipfile.ZIP_DEFLATED) as zf:
            for path in entries:
                info = zipfile.ZipInfo(str(path.relative_to(directory)), date_time=_ZIP_DATE)
                info.compress_type = zipfile.ZIP_DEFLATED
                info.external_attr = 0o644 << 16
                zf.writestr(info, path.read_bytes())
        os.replace(tmp, zip_path)
    except OSError as e:
        raise StorageError(f"failed writing archive {zip_path}: {e}") from e
    return zip_path


def load_archive(path: Path) -> tuple[SessionConfig, list[MeasurementRecord]]:
    """Read an archive back; records come out sorted by plan position index."""
    try:
        with zipfile.ZipFile(path) as zf:
            names = set(zf.namelist())
            if "config.json" not in names or "manifest.json" not in names:
                raise FormatError(f"{path}: archive lacks config.json/manifest.json")
            cfg = _config_from_json(zf.read("config.json"))
            manifest = json.loads(zf.read("manifest.json"))
            record_names = {n for n in names if n.startswith("records/") and n.endswith(".csv")}
            if len(record_names) != int(manifest["completed"]):
                raise FormatError(
                    f"{path}: manifest says {manifest['completed']} records, "
                    f"found {len(record_names)}"
                )
            records = []
            for index, pos in enumerate(generate_plan(cfg.scan)):
                name = "records/" + record_filename(pos.theta, pos.phi)
                if name not in record_names:
                    break
                records.append(_record_from_csv(Path(name).name, zf.read(name), index))
            if len(records) != len(record_names):
                raise FormatError(f"{path}: record files do not match the scan plan")
            return cfg, records
    except zipfile.BadZipFile as e:
        raise FormatError(f"{path}: not a valid ZIP archive: {e}") from e
    except OSError as e:
        raise FormatError(f"{path}: cannot read archive: {e}") from e
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(f"{path}: malformed archive: {e}") from e
