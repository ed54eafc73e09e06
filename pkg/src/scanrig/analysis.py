"""Statistics over measurement archives: pooled stats, sweeps, grids, diffs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from scanrig.errors import EmptyError, RangeError, ShapeError
from scanrig.store import MeasurementRecord, SessionConfig, load_archive

PosKey = tuple[float, float]  # (theta, phi) in degrees


@dataclass(frozen=True)
class PositionStats:
    mean_cm: float
    std_cm: float
    n: int


@dataclass(frozen=True)
class RunStats:
    """Pooled and per-position statistics of one run.

    Overall figures are computed over the pooled sample set, not as a mean of
    per-position means; std is the sample estimator (n-1).
    """

    overall_mean_cm: float
    overall_std_cm: float
    total_samples: int
    per_position: dict[PosKey, PositionStats]


@dataclass(frozen=True)
class SweepSeries:
    fixed_phi: float
    points: list[tuple[float, float]]  # (theta, mean_cm), theta ascending


@dataclass(frozen=True)
class GridResult:
    thetas: list[float]            # ascending
    phis: list[float]              # ascending
    mean_cm: list[list[float | None]]  # theta rows x phi columns; None = missing


@dataclass(frozen=True)
class RunComparison:
    overall_mean_diff_cm: float
    max_abs_mean_diff_cm: float
    per_position_deltas: dict[PosKey, float]  # mean(b) - mean(a)


def _values(record: MeasurementRecord) -> np.ndarray:
    return np.array([s.value_cm for s in record.samples], dtype=float)


def _std(values: np.ndarray) -> float:
    return float(np.std(values, ddof=1)) if values.size > 1 else 0.0


def stats(records: list[MeasurementRecord]) -> RunStats:
    if not records or not any(r.samples for r in records):
        raise EmptyError("archive contains no samples")
    pooled = np.concatenate([_values(r) for r in records])
    per_position = {
        (r.position.theta, r.position.phi): PositionStats(
            mean_cm=float(np.mean(v)), std_cm=_std(v), n=v.size
        )
        for r in records
        for v in (_values(r),)
    }
    return RunStats(
        overall_mean_cm=float(np.mean(pooled)),
        overall_std_cm=_std(pooled),
        total_samples=int(pooled.size),
        per_position=per_position,
    )


def sweep(records: list[MeasurementRecord], fixed_phi: float) -> SweepSeries:
    """Per-base-angle means with the arm fixed at one angle."""
    on_grid = sorted({r.position.phi for r in records})
    matches = [r for r in records if r.position.phi == fixed_phi]
    if not matches:
        raise RangeError(f"phi={fixed_phi} not on the scan grid (levels: {on_grid})")
    by_theta = sorted(matches, key=lambda r: r.position.theta)
    return SweepSeries(
        fixed_phi=fixed_phi,
        points=[(r.position.theta, float(np.mean(_values(r)))) for r in by_theta],
    )


def grid(cfg: SessionConfig, records: list[MeasurementRecord]) -> GridResult:
    """Mean distance per grid cell; unmeasured cells stay None."""
    scan = cfg.scan
    thetas = scan.theta_values()
    phis = scan.phi_values()
    means = {
        (r.position.theta, r.position.phi): float(np.mean(_values(r))) for r in records
    }
    cells = [[means.get((t, p)) for p in phis] for t in thetas]
    return GridResult(thetas=thetas, phis=phis, mean_cm=cells)


def compare(
    a: tuple[SessionConfig, list[MeasurementRecord]],
    b: tuple[SessionConfig, list[MeasurementRecord]],
) -> RunComparison:
    """Per-position and overall mean differences between two runs (b minus a)."""
    cfg_a, records_a = a
    cfg_b, records_b = b
    if (cfg_a.scan.theta_step, cfg_a.scan.phi_step, cfg_a.scan.theta_extent,
            cfg_a.scan.phi_extent) != (cfg_b.scan.theta_step, cfg_b.scan.phi_step,
                                       cfg_b.scan.theta_extent, cfg_b.scan.phi_extent):
        raise ShapeError("runs use different scan grids")
    stats_a = stats(records_a)
    stats_b = stats(records_b)
    keys_a = set(stats_a.per_position)
    keys_b = set(stats_b.per_position)
    if keys_a != keys_b:
        raise ShapeError("runs cover different position sets")
    deltas = {
        key: stats_b.per_position[key].mean_cm - stats_a.per_position[key].mean_cm
        for key in stats_a.per_position
    }
    return RunComparison(
        overall_mean_diff_cm=stats_b.overall_mean_cm - stats_a.overall_mean_cm,
        max_abs_mean_diff_cm=max(abs(d) for d in deltas.values()),
        per_position_deltas=deltas,
    )


def load_for_analysis(path) -> tuple[SessionConfig, list[MeasurementRecord]]:
    return load_archive(path)
