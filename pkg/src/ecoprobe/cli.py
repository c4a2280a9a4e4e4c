"""Batch-study command line: ingest, detect, report, simulate, and analyze.

Every subcommand delegates to the same derivation code the HTTP service
uses, so CLI reports and dashboard displays can never disagree. Output in
csv/json modes is stable across runs for fixed inputs; all randomness is
seeded through explicit flags.
"""

from __future__ import annotations

import argparse
import csv as csv_mod
import io
import json
import os
import sys
from pathlib import Path

from .detector import DetectorConfig, detect_trips, make_path_provider
from .dwell import TABS, compute_dwell
from .engine import PriceConfig, load_vehicle_catalog
from .service import ProbeService, make_server
from .simulator import (
    evaluate_detection,
    scenario_from_json,
    simulate,
    trace_comment,
    truth_from_json,
    truth_to_json,
)
from .stats import paired_t_test, wilcoxon_signed_rank
from .store import ConflictError, NotFoundError, ProbeStore
from .trace_io import ParseError, parse_interaction_log, parse_trace, serialize_trace

STORE_ENV = "ECOPROBE_STORE"
DEFAULT_STORE = "ecoprobe-journal.log"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ecoprobe",
        description="Research probe for sustainable-driving studies.",
    )
    parser.add_argument(
        "--store",
        default=os.environ.get(STORE_ENV, DEFAULT_STORE),
        help=f"journal path (env {STORE_ENV})",
    )
    parser.add_argument("--catalog", default=None, help="vehicle catalog CSV path")
    parser.add_argument(
        "--format", choices=("table", "csv", "json"), default="table", dest="fmt"
    )
    parser.add_argument("--fuel-price", type=float, default=None, help="USD per gallon")
    parser.add_argument("--co2-per-gal", type=float, default=None, help="kg CO2 per gallon")
    parser.add_argument("--min-auto-confidence", type=float, default=None)
    parser.add_argument("--start-speed", type=float, default=None, help="m/s")
    parser.add_argument("--end-dwell-ms", type=int, default=None)
    parser.add_argument("--min-trip-distance", type=float, default=None, help="miles")
    parser.add_argument("--winding-factor", type=float, default=None)
    parser.add_argument(
        "--order-seed",
        type=int,
        default=None,
        help="seed for the one-time carbon/cost tab order draw on a fresh store",
    )

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse a trace file and journal detected trips")
    p.add_argument("trace", type=Path)

    sub.add_parser("trips", help="list non-deleted trips with cost/CO2 summaries")

    p = sub.add_parser("report", help="running totals plus goal status")
    p.add_argument("metric", choices=("cost", "carbon"))
    p.add_argument("--window", choices=("all", "current"), default="all")
    p.add_argument("--now", type=int, default=None, help="override the study clock (Unix ms)")

    p = sub.add_parser("goal", help="goal status for a metric")
    p.add_argument("metric", choices=("cost", "carbon"))
    p.add_argument("--now", type=int, default=None)

    p = sub.add_parser("simulate", help="generate a synthetic trace + ground truth")
    p.add_argument("scenario", type=Path, help="scenario JSON")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out-trace", type=Path, default=None)
    p.add_argument("--out-truth", type=Path, default=None)

    p = sub.add_parser("eval-detect", help="score the detector against ground truth")
    p.add_argument("trace", type=Path)
    p.add_argument("truth", type=Path)

    p = sub.add_parser("dwell", help="per-tab dwell report from an interaction log")
    p.add_argument("log", type=Path)
    p.add_argument("--participant", default="participant")

    p = sub.add_parser("stats", help="paired statistics on a two-column CSV")
    p.add_argument("test", choices=("wilcoxon", "ttest"))
    p.add_argument("csv", type=Path)

    p = sub.add_parser("serve", help="run the loopback HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=4815)
    p.add_argument("--export-coords", action="store_true")
    p.add_argument("--allow-remote", action="store_true")
    return parser


def _prices(args: argparse.Namespace) -> PriceConfig:
    base = PriceConfig()
    return PriceConfig(
        fuel_usd_per_gal=args.fuel_price if args.fuel_price is not None else base.fuel_usd_per_gal,
        co2_kg_per_gal=args.co2_per_gal if args.co2_per_gal is not None else base.co2_kg_per_gal,
    )


def _detector_cfg(args: argparse.Namespace) -> DetectorConfig:
    base = DetectorConfig()
    return DetectorConfig(
        min_auto_confidence=(
            args.min_auto_confidence
            if args.min_auto_confidence is not None
            else base.min_auto_confidence
        ),
        start_speed_mps=args.start_speed if args.start_speed is not None else base.start_speed_mps,
        end_dwell_ms=args.end_dwell_ms if args.end_dwell_ms is not None else base.end_dwell_ms,
        min_trip_distance_miles=(
            args.min_trip_distance
            if args.min_trip_distance is not None
            else base.min_trip_distance_miles
        ),
        winding_factor=(
            args.winding_factor if args.winding_factor is not None else base.winding_factor
        ),
    )


def _service(args: argparse.Namespace) -> ProbeService:
    catalog = load_vehicle_catalog(Path(args.catalog)) if args.catalog else None
    store = ProbeStore(args.store, order_seed=args.order_seed)
    return ProbeService(
        store,
        catalog=catalog,
        prices=_prices(args),
        detector_cfg=_detector_cfg(args),
    )


def _emit(payload: dict | list, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(payload, sort_keys=True, indent=2))
        return
    rows = payload if isinstance(payload, list) else [payload]
    if not rows:
        if fmt == "table":
            print("(empty)")
        return
    keys = list(rows[0].keys())
    if fmt == "csv":
        out = io.StringIO()
        writer = csv_mod.writer(out, lineterminator="\n")
        writer.writerow(keys)
        for row in rows:
            writer.writerow([_flat(row.get(k)) for k in keys])
        sys.stdout.write(out.getvalue())
        return
    widths = [max(len(str(k)), max(len(str(_flat(r.get(k)))) for r in rows)) for k in keys]
    print("  ".join(str(k).ljust(w) for k, w in zip(keys, widths)))
    for row in rows:
        print("  ".join(str(_flat(row.get(k))).ljust(w) for k, w in zip(keys, widths)))


def _flat(value):
    if isinstance(value, (dict, list)):
        return json.dumps(value, sort_keys=True, separators=(",", ":"))
    return value


def _read_paired_csv(path: Path, first: str, second: str) -> tuple[list[float], list[float]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv_mod.DictReader(fh)
        if reader.fieldnames is None or first not in reader.fieldnames or second not in reader.fieldnames:
            raise ParseError(f"CSV must have columns {first!r} and {second!r}")
        a, b = [], []
        for row in reader:
            a.append(float(row[first]))
            b.append(float(row[second]))
    return a, b


def _summary_flat(payload: dict) -> dict:
    flat = {"metric": payload["metric"], "window": payload["window"]}
    flat.update(payload["totals"])
    goal = payload["goal"]
    flat["goal_kind"] = goal["kind"]
    flat["goal"] = goal["goal"]
    flat["goal_current"] = goal["current"]
    flat["goal_message"] = goal["message"]
    return flat


def _run(args: argparse.Namespace) -> int:
    fmt = args.fmt
    if args.command == "ingest":
        service = _service(args)
        result = service.post_traces(args.trace.read_text(encoding="utf-8"))
        _emit(result, fmt)
        return 0

    if args.command == "trips":
        _emit(_service(args).get_trips(), fmt)
        return 0

    if args.command == "report":
        payload = _service(args).get_summary(args.metric, args.window, args.now)
        _emit(_summary_flat(payload) if fmt != "json" else payload, fmt)
        return 0

    if args.command == "goal":
        payload = _service(args).get_summary(args.metric, "current", args.now)
        goal = dict(payload["goal"])
        goal["metric"] = args.metric
        _emit(goal, fmt)
        return 0

    if args.command == "simulate":
        scenario = scenario_from_json(args.scenario.read_text(encoding="utf-8"), args.seed)
        trace, truth = simulate(scenario)
        out_trace = args.out_trace or args.scenario.with_suffix(f".seed{args.seed}.trace.csv")
        out_truth = args.out_truth or args.scenario.with_suffix(f".seed{args.seed}.truth.json")
        out_trace.write_text(serialize_trace(trace, comment=trace_comment(scenario)), encoding="utf-8")
        out_truth.write_text(truth_to_json(truth), encoding="utf-8")
        _emit(
            {
                "trace": str(out_trace),
                "truth": str(out_truth),
                "records": len(trace.records),
                "truth_trips": len(truth.trips),
            },
            fmt,
        )
        return 0

    if args.command == "eval-detect":
        trace, _skipped = parse_trace(args.trace.read_text(encoding="utf-8"))
        truth = truth_from_json(args.truth.read_text(encoding="utf-8"))
        cfg = _detector_cfg(args)
        detected = detect_trips(trace, cfg, make_path_provider(cfg.winding_factor))
        report = evaluate_detection(detected, truth.trips)
        _emit(
            {
                "precision": report.precision,
                "recall": report.recall,
                "median_distance_error_fraction": report.median_distance_error_fraction,
                "matched": report.matched,
                "detected": report.detected_count,
                "truth": report.truth_count,
                "zero_detections": report.zero_detections,
            },
            fmt,
        )
        return 0

    if args.command == "dwell":
        events, skipped = parse_interaction_log(args.log.read_text(encoding="utf-8"))
        report = compute_dwell(events)
        if fmt == "csv":
            print("participant,tab,dwell_ms")
            for tab in TABS:
                print(f"{args.participant},{tab},{report.dwell_ms[tab]}")
            return 0
        payload = {
            "participant": args.participant,
            "dwell_ms": report.dwell_ms,
            "session_count": report.session_count,
            "total_foreground_ms": report.total_foreground_ms,
            "skipped_lines": skipped,
        }
        _emit(payload, fmt)
        return 0

    if args.command == "stats":
        if args.test == "ttest":
            pre, post = _read_paired_csv(args.csv, "pre", "post")
            result = paired_t_test(pre, post)
        else:
            x, y = _read_paired_csv(args.csv, "x", "y")
            result = wilcoxon_signed_rank(x, y)
        payload = {
            "test": args.test,
            "statistic": round(result.statistic, 6),
            "p_two_sided": round(result.p_two_sided, 6),
            "n_effective": result.n_effective,
            "method": result.method,
        }
        if result.ci95 is not None:
            payload["ci95_lo"] = round(result.ci95[0], 6)
            payload["ci95_hi"] = round(result.ci95[1], 6)
        _emit(payload, fmt)
        return 0

    if args.command == "serve":
        service = _service(args)
        service.allow_coordinate_export = args.export_coords
        server = make_server(service, host=args.host, port=args.port, allow_remote=args.allow_remote)
        host, port = server.server_address[:2]
        print(f"ecoprobe service on http://{host}:{port} (store: {args.store})", file=sys.stderr)
        try:
            server.serve_forever()
        except KeyboardInterrupt:
            pass
        finally:
            server.server_close()
        return 0

    raise AssertionError(f"unhandled command {args.command!r}")


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _run(args)
    except (
        ParseError,
        NotFoundError,
        ConflictError,
        ValueError,
        OSError,
        json.JSONDecodeError,
        KeyError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
