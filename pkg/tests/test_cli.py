import json

import pytest

from scanrig import store
from scanrig.cli import main
from scanrig.planner import ScanConfig, generate_plan
from scanrig.sources import UwbRangingSource, UwbSourceConfig
from scanrig.store import MeasurementRecord, SessionConfig


@pytest.fixture
def archive(tmp_path):
    scan = ScanConfig(theta_step=90, phi_step=90, samples_per_position=4)
    cfg = SessionConfig(run_id="cli-run", scan=scan, source_name="sim-uwb",
                        source_config={"true_distance_cm": 50.0}, seed=2)
    writer = store.open_session(tmp_path, cfg)
    src = UwbRangingSource(
        UwbSourceConfig(true_distance_cm=50.0, noise_sigma_los_cm=1.0, seed=2)
    )
    for pos in generate_plan(scan):
        writer.append_record(MeasurementRecord(pos, src.acquire(4, pos)))
    return writer.finalize()


@pytest.fixture
def second_archive(tmp_path):
    scan = ScanConfig(theta_step=90, phi_step=90, samples_per_position=4)
    cfg = SessionConfig(run_id="cli-run-b", scan=scan, source_name="sim-uwb",
                        source_config={"true_distance_cm": 50.0}, seed=3)
    writer = store.open_session(tmp_path, cfg)
    src = UwbRangingSource(
        UwbSourceConfig(true_distance_cm=50.0, noise_sigma_los_cm=1.0, seed=3)
    )
    for pos in generate_plan(scan):
        writer.append_record(MeasurementRecord(pos, src.acquire(4, pos)))
    return writer.finalize()


class TestStats:
    def test_human_output(self, archive, capsys):
        assert main(["stats", str(archive)]) == 0
        out = capsys.readouterr().out
        assert "overall mean" in out
        assert "positions:    12" in out

    def test_json_output(self, archive, capsys):
        assert main(["stats", str(archive), "--json"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["total_samples"] == 48
        assert len(doc["per_position"]) == 12

    def test_csv_output(self, archive, capsys):
        assert main(["stats", str(archive), "--csv"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "theta,phi,mean_cm,std_cm,n"
        assert len(lines) == 13

    def test_bad_archive_exits_2(self, tmp_path, capsys):
        bad = tmp_path / "junk.zip"
        bad.write_bytes(b"not a zip")
        assert main(["stats", str(bad)]) == 2
        assert "error:" in capsys.readouterr().err

    def test_missing_archive_exits_2(self, tmp_path):
        assert main(["stats", str(tmp_path / "absent.zip")]) == 2


class TestSweep:
    def test_fixed_phi_points(self, archive, capsys):
        assert main(["sweep", str(archive), "--phi", "90", "--csv"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "theta,mean_cm"
        assert len(lines) == 5  # four theta columns

    def test_off_grid_phi_exits_2(self, archive):
        assert main(["sweep", str(archive), "--phi", "95"]) == 2


class TestGrid:
    def test_csv_matrix(self, archive, capsys):
        assert main(["grid", str(archive)]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0].startswith("theta\\phi,")
        assert len(lines) == 5  # header + 4 theta rows

    def test_json_plot_data(self, archive, capsys):
        assert main(["grid", str(archive), "--json"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["thetas"] == [0.0, 90.0, 180.0, 270.0]
        assert doc["phis"] == [0.0, 90.0, 180.0]
        assert len(doc["mean_cm"]) == 4


class TestCompare:
    def test_self_compare(self, archive, capsys):
        assert main(["compare", str(archive), str(archive)]) == 0
        out = capsys.readouterr().out
        assert "+0.000" in out

    def test_two_runs_json(self, archive, second_archive, capsys):
        assert main(["compare", str(archive), str(second_archive), "--json"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert len(doc["per_position_deltas"]) == 12
        assert doc["max_abs_mean_diff_cm"] > 0

    def test_grid_mismatch_exits_2(self, archive, tmp_path):
        scan = ScanConfig(theta_step=180, phi_step=180, samples_per_position=1)
        cfg = SessionConfig(run_id="other", scan=scan, source_name="constant",
                            source_config={"value_cm": 1.0})
        writer = store.open_session(tmp_path, cfg)
        from scanrig.sources import ConstantSource

        for pos in generate_plan(scan):
            writer.append_record(MeasurementRecord(pos, ConstantSource(1.0).acquire(1, pos)))
        other = writer.finalize()
        assert main(["compare", str(archive), str(other)]) == 2
