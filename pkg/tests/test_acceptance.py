"""Acceptance suite: one test per release criterion, tolerances pinned.

Run with `pytest tests/test_acceptance.py`; a per-criterion PASS/FAIL summary
is printed at the end of the session (see conftest.pytest_terminal_summary).
"""

import math
import random
import time
import zipfile

import httpx
import numpy as np
import pytest

from conftest import criterion
from reference_sweep import serpentine_gather_sequence
from scanrig import analysis, store
from scanrig.backend import SimBackend
from scanrig.kinematics import (
    RailConfig,
    angle_to_steps,
    default_phi_config,
    default_theta_config,
    mm_to_steps,
    steps_to_angle,
    steps_to_mm,
)
from scanrig.planner import ScanConfig, generate_plan
from scanrig.runner import RunManager, RunPhase
from scanrig.sources import (
    UwbRangingSource,
    UwbSourceConfig,
    dielectric_excess_path,
    with_total_occlusion_shift,
)
from scanrig.store import MeasurementRecord, SessionConfig, load_archive

STEP_SIZES = [5, 10, 15, 20, 30, 45, 60, 90, 180]

# Source calibration reproducing the published interference experiment:
# LOS mean 34.660 / sigma 1.345; occluded mean 36.344 / sigma 1.735 via a
# 1 cm dielectric plate plus calibrated metal delay totalling +1.684.
def calibrated_uwb_config(seed=1234):
    cfg = UwbSourceConfig(
        true_distance_cm=34.660,
        noise_sigma_los_cm=1.345,
        noise_sigma_nlos_cm=1.735,
        occlusion_center_theta=180.0,
        occlusion_half_width=15.0,
        pla_thickness_cm=1.0,
        seed=seed,
    )
    return with_total_occlusion_shift(cfg, 1.684)


def run_to_completion(manager, run_id, timeout=60.0):
    manager.start_run(run_id)
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        state = manager.run_state(run_id)
        if state.phase is not RunPhase.RUNNING:
            return state
        time.sleep(0.01)
    raise TimeoutError(f"run {run_id} did not finish")


def make_manager(data_dir):
    backend = SimBackend(default_theta_config(), default_phi_config())
    return RunManager(data_dir, backend, default_theta_config(), default_phi_config())


@criterion(1, "plan oracle equivalence (684 positions, all step sizes, < 1 s)")
def test_c1_plan_oracle_equivalence():
    t0 = time.monotonic()
    plan = generate_plan(ScanConfig(theta_step=10, phi_step=10))
    assert len(plan) == 684
    for step in [10] + STEP_SIZES:
        cfg = ScanConfig(theta_step=step, phi_step=step)
        got = [(p.theta, p.phi) for p in generate_plan(cfg)]
        want = [(float(t), float(p)) for t, p in serpentine_gather_sequence(step, step)]
        assert got == want, f"step size {step}"
    assert time.monotonic() - t0 < 1.0


@criterion(2, "coverage/adjacency/count properties on randomized configs")
def test_c2_coverage_adjacency_properties():
    theta_choices = [2, 2.5, 3, 4, 5, 6, 8, 9, 10, 12, 15, 18, 20, 24, 30, 36,
                     40, 45, 60, 72, 90, 120, 180, 360]
    phi_choices = [2, 2.5, 3, 4, 5, 6, 9, 10, 12, 15, 18, 20, 30, 36, 45, 60, 90, 180]
    rng = random.Random(2026)
    for _ in range(25):
        ts = rng.choice(theta_choices)
        ps = rng.choice(phi_choices)
        cfg = ScanConfig(theta_step=ts, phi_step=ps)
        plan = generate_plan(cfg)
        # count formula
        assert len(plan) == round(360 / ts) * (round(180 / ps) + 1)
        # exact single coverage of the grid
        seen = [(p.theta, p.phi) for p in plan]
        grid = {(t, p) for t in cfg.theta_values() for p in cfg.phi_values()}
        assert len(seen) == len(set(seen))
        assert set(seen) == grid
        # adjacency: one axis moves, by exactly one step
        for a, b in zip(plan, plan[1:]):
            dt = round(abs(b.theta - a.theta) * 100)
            dp = round(abs(b.phi - a.phi) * 100)
            assert (dt, dp) in ((round(ts * 100), 0), (0, round(ps * 100)))


@criterion(3, "kinematics round trip <= 0.005 deg / 0.02 mm over 10k points")
def test_c3_kinematics_round_trip():
    theta = default_theta_config()
    rail = RailConfig()
    rng = random.Random(77)
    for _ in range(10_000):
        a = rng.uniform(0.0, 360.0)
        assert abs(steps_to_angle(angle_to_steps(a, theta), theta) - a) <= 0.005
    for _ in range(10_000):
        d = rng.uniform(rail.travel_min, rail.travel_max)
        assert abs(steps_to_mm(mm_to_steps(d, rail), rail) - d) <= 0.02


@criterion(4, "dielectric excess path: (sqrt(2.52)-1)*1cm = 0.5875, near 0.6")
def test_c4_dielectric_formula():
    value = dielectric_excess_path(2.52, 1.0)
    assert value == math.sqrt(2.52) - 1.0  # exact closed form
    assert round(value, 4) == 0.5875
    assert abs(value - 0.6) <= 0.025


@criterion(5, "calibrated source reproduces published LOS/NLOS moments (< 5 s)")
def test_c5_interference_statistics():
    t0 = time.monotonic()
    src = UwbRangingSource(calibrated_uwb_config())
    from scanrig.planner import ScanPosition

    los = np.array([s.value_cm for s in src.acquire(10_000, ScanPosition(0, 0.0, 90.0))])
    nlos = np.array([s.value_cm for s in src.acquire(10_000, ScanPosition(1, 180.0, 90.0))])
    assert los.mean() == pytest.approx(34.660, abs=0.05)
    assert los.std(ddof=1) == pytest.approx(1.345, abs=0.05)
    assert nlos.mean() == pytest.approx(36.344, abs=0.06)
    assert nlos.std(ddof=1) == pytest.approx(1.735, abs=0.06)
    assert nlos.mean() - los.mean() == pytest.approx(1.684, abs=0.08)
    assert time.monotonic() - t0 < 5.0


def _resume_run_body(run_id, seed=4242):
    return {
        "run_id": run_id,
        "scan": {"theta_step": 10, "phi_step": 10, "samples_per_position": 10},
        "source_name": "sim-uwb",
        "source_config": {
            "true_distance_cm": 50.0,
            "noise_sigma_los_cm": 2.0,
            "noise_sigma_nlos_cm": 3.0,
            "occlusion_half_width": 20.0,
            "pla_thickness_cm": 1.0,
            "metal_extra_delay_cm": 1.0,
            "seed": seed,
        },
        "seed": seed,
    }


@criterion(6, "kill -9 mid-run, restart, resume: archive bit-equal (< 30 s)")
def test_c6_resume_equivalence(tmp_path, service_factory):
    t0 = time.monotonic()
    data_dir = tmp_path / "interrupted"
    svc = service_factory(data_dir=data_dir)
    body = _resume_run_body("res-1")
    assert httpx.post(svc.base + "/runs", json=body, timeout=10).status_code == 201
    assert httpx.post(svc.base + "/runs/res-1/start", timeout=10).status_code == 200

    kill_after = random.Random(606).randint(40, 500)
    while True:
        state = httpx.get(svc.base + "/runs/res-1", timeout=10).json()
        if state["completed_positions"] >= kill_after:
            break
        assert state["phase"] == "running"
    svc.kill()  # SIGKILL, no cleanup

    svc2 = service_factory(data_dir=data_dir)
    state = httpx.get(svc2.base + "/runs/res-1", timeout=10).json()
    assert state["phase"] == "paused"
    assert state["completed_positions"] >= kill_after - 1
    assert httpx.post(svc2.base + "/runs/res-1/start", timeout=10).status_code == 200
    while True:
        state = httpx.get(svc2.base + "/runs/res-1", timeout=10).json()
        if state["phase"] != "running":
            break
        time.sleep(0.05)
    assert state["phase"] == "completed"
    assert state["completed_positions"] == 684
    resumed_zip = tmp_path / "resumed.zip"
    resumed_zip.write_bytes(
        httpx.get(svc2.base + "/runs/res-1/archive", timeout=30).content
    )
    svc2.terminate()

    # Reference: the same run never interrupted, executed in-process.
    manager = make_manager(tmp_path / "clean")
    session = SessionConfig(
        run_id="res-1",
        scan=ScanConfig(theta_step=10, phi_step=10, samples_per_position=10),
        source_name=body["source_name"],
        source_config=body["source_config"],
        seed=body["seed"],
    )
    manager.create_run(session)
    assert run_to_completion(manager, "res-1").phase is RunPhase.COMPLETED
    clean_zip = manager.archive_path("res-1")

    _, resumed_records = load_archive(resumed_zip)
    _, clean_records = load_archive(clean_zip)
    assert len(resumed_records) == len(clean_records) == 684
    assert resumed_records == clean_records  # positions, timestamps, values bit-equal
    assert time.monotonic() - t0 < 30.0


@criterion(7, "three-run reproducibility: pairwise overall means within 0.7 cm")
def test_c7_reproducibility_harness(tmp_path):
    scan = ScanConfig(theta_step=10, phi_step=10, samples_per_position=100)
    manager = make_manager(tmp_path / "rep")
    archives = []
    for i in range(3):
        run_id = f"rep-{i}"
        manager.create_run(SessionConfig(
            run_id=run_id,
            scan=scan,
            source_name="sim-uwb",
            source_config={"true_distance_cm": 50.0, "noise_sigma_los_cm": 11.0,
                           "seed": 9000 + i},
            seed=9000 + i,
        ))
        assert run_to_completion(manager, run_id).phase is RunPhase.COMPLETED
        archives.append(load_archive(manager.archive_path(run_id)))

    for i in range(3):
        for j in range(i + 1, 3):
            result = analysis.compare(archives[i], archives[j])
            assert abs(result.overall_mean_diff_cm) <= 0.7
            # antisymmetry of the per-position deltas
            reverse = analysis.compare(archives[j], archives[i])
            for key, delta in result.per_position_deltas.items():
                assert reverse.per_position_deltas[key] == -delta


@criterion(8, "archive format: names, entry count, lossless + deterministic")
def test_c8_archive_format(tmp_path):
    scan = ScanConfig(theta_step=10, phi_step=10, samples_per_position=10)
    cfg = SessionConfig(run_id="fmt", scan=scan, source_name="sim-uwb",
                        source_config={"true_distance_cm": 50.0,
                                       "noise_sigma_los_cm": 1.0, "seed": 5},
                        seed=5)
    writer = store.open_session(tmp_path, cfg)
    src = UwbRangingSource(UwbSourceConfig(true_distance_cm=50.0,
                                           noise_sigma_los_cm=1.0, seed=5))
    records = [MeasurementRecord(p, src.acquire(10, p)) for p in generate_plan(scan)]
    for record in records:
        writer.append_record(record)

    first = writer.finalize()
    with zipfile.ZipFile(first) as zf:
        names = zf.namelist()
    assert len(names) == 686
    assert "records/t001000_p18000.csv" in names  # theta=10, phi=180

    loaded_cfg, loaded = load_archive(first)
    assert loaded_cfg == cfg
    assert loaded == records  # lossless round trip

    second_bytes = writer.finalize().read_bytes()
    assert first.read_bytes() == second_bytes  # double finalize byte-identical


@criterion(9, "HTTP end-to-end: create/start/poll/download/stats (< 10 s)")
def test_c9_end_to_end_service(tmp_path, service_factory, capsys):
    from scanrig.cli import main

    t0 = time.monotonic()
    svc = service_factory()
    body = _resume_run_body("e2e-1", seed=17)
    assert httpx.post(svc.base + "/runs", json=body, timeout=10).status_code == 201
    assert httpx.post(svc.base + "/runs/e2e-1/start", timeout=10).status_code == 200
    while True:
        state = httpx.get(svc.base + "/runs/e2e-1", timeout=10).json()
        if state["phase"] != "running":
            break
        time.sleep(0.05)
    assert state["phase"] == "completed"
    assert state["completed_positions"] == 684
    payload = httpx.get(svc.base + "/runs/e2e-1/archive", timeout=30)
    assert payload.headers["content-type"] == "application/zip"
    zip_path = tmp_path / "e2e.zip"
    zip_path.write_bytes(payload.content)

    assert main(["stats", str(zip_path)]) == 0
    out = capsys.readouterr().out
    assert "positions:    684" in out
    assert time.monotonic() - t0 < 10.0
