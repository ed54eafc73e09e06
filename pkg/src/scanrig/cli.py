"""Command-line front end: archive analysis verbs plus the control service.

    scanrig stats <archive.zip> [--csv|--json]
    scanrig sweep <archive.zip> --phi 90 [--csv|--json]
    scanrig grid <archive.zip> [--json]
    scanrig compare <a.zip> <b.zip> [--csv|--json]
    scanrig serve [--config service.json]

Exit code 0 on success, 2 on malformed input or archives.
"""

from __future__ import annotations

import argparse
import json
import sys

from scanrig import analysis
from scanrig.errors import ScanRigError
from scanrig.store import load_archive


def _add_format_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--csv", action="store_true", help="machine-readable CSV")
    group.add_argument("--json", action="store_true", help="machine-readable JSON")


def _cmd_stats(args) -> int:
    _, records = load_archive(args.archive)
    result = analysis.stats(records)
    rows = sorted(result.per_position.items())
    if args.json:
        print(json.dumps({
            "overall_mean_cm": result.overall_mean_cm,
            "overall_std_cm": result.overall_std_cm,
            "total_samples": result.total_samples,
            "per_position": [
                {"theta": t, "phi": p, "mean_cm": s.mean_cm, "std_cm": s.std_cm, "n": s.n}
                for (t, p), s in rows
            ],
        }, indent=2))
    elif args.csv:
        print("theta,phi,mean_cm,std_cm,n")
        for (t, p), s in rows:
            print(f"{t},{p},{s.mean_cm!r},{s.std_cm!r},{s.n}")
    else:
        print(f"samples:      {result.total_samples}")
        print(f"positions:    {len(rows)}")
        print(f"overall mean: {result.overall_mean_cm:.3f} cm")
        print(f"overall std:  {result.overall_std_cm:.3f} cm")
    return 0


def _cmd_sweep(args) -> int:
    _, records = load_archive(args.archive)
    series = analysis.sweep(records, args.phi)
    if args.json:
        print(json.dumps({
            "fixed_phi": series.fixed_phi,
            "points": [{"theta": t, "mean_cm": m} for t, m in series.points],
        }, indent=2))
    elif args.csv:
        print("theta,mean_cm")
        for t, m in series.points:
            print(f"{t},{m!r}")
    else:
        print(f"arm fixed at phi={series.fixed_phi}")
        for t, m in series.points:
            print(f"  theta {t:7.2f}  mean {m:.3f} cm")
    return 0


def _cmd_grid(args) -> int:
    cfg, records = load_archive(args.archive)
    result = analysis.grid(cfg, records)
    if args.json:
        print(json.dumps({
            "thetas": result.thetas,
            "phis": result.phis,
            "mean_cm": result.mean_cm,
        }, indent=2))
    else:
        # CSV matrix: theta rows, phi columns.
        print("theta\\phi," + ",".join(str(p) for p in result.phis))
        for t, row in zip(result.thetas, result.mean_cm):
            cells = ["" if v is None else repr(v) for v in row]
            print(f"{t}," + ",".join(cells))
    return 0


def _cmd_compare(args) -> int:
    a = load_archive(args.archive_a)
    b = load_archive(args.archive_b)
    result = analysis.compare(a, b)
    deltas = sorted(result.per_position_deltas.items())
    if args.json:
        print(json.dumps({
            "overall_mean_diff_cm": result.overall_mean_diff_cm,
            "max_abs_mean_diff_cm": result.max_abs_mean_diff_cm,
            "per_position_deltas": [
                {"theta": t, "phi": p, "delta_cm": d} for (t, p), d in deltas
            ],
        }, indent=2))
    elif args.csv:
        print("theta,phi,delta_cm")
        for (t, p), d in deltas:
            print(f"{t},{p},{d!r}")
    else:
        print(f"overall mean difference: {result.overall_mean_diff_cm:+.3f} cm")
        print(f"max |per-position diff|: {result.max_abs_mean_diff_cm:.3f} cm")
    return 0


def _cmd_serve(args) -> int:
    from scanrig.service import load_service_config, serve

    serve(load_service_config(args.config))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scanrig", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="pooled and per-position statistics")
    p.add_argument("archive")
    _add_format_flags(p)
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("sweep", help="per-theta means at a fixed arm angle")
    p.add_argument("archive")
    p.add_argument("--phi", type=float, required=True)
    _add_format_flags(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("grid", help="theta x phi matrix of mean distances")
    p.add_argument("archive")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_grid)

    p = sub.add_parser("compare", help="difference between two runs (b minus a)")
    p.add_argument("archive_a")
    p.add_argument("archive_b")
    _add_format_flags(p)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("serve", help="start the HTTP control service")
    p.add_argument("--config", default=None, help="JSON service config file")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ScanRigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
