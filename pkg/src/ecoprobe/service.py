"""Loopback HTTP service exposing the probe to the dashboard and study tooling.

Single-user, no authentication, loopback-only by default: the privacy model
keeps every coordinate on this machine unless an explicit export flag is
set, in which case trip endpoints appear in /trips responses. Money is
serialized as a 2-decimal string, CO2 as a number in kg with 3 decimals.
All responses are pure functions of the journal, so restarting the process
and replaying the journal reproduces them byte for byte.
"""

from __future__ import annotations

import json
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Any
from urllib.parse import parse_qs, urlsplit

from .detector import DetectorConfig, detect_trips
from .engine import (
    PriceConfig,
    Totals,
    TripCostSummary,
    VehicleProfile,
    aggregate,
    load_vehicle_catalog,
    trip_summary,
)
from .goals import (
    DEFAULT_WINDOW_DAYS,
    GoalKind,
    GoalStatus,
    anchor_study_start,
    assign_windows,
    goal_status,
)
from .model import Trip, TripMode
from .store import ConflictError, NotFoundError, ProbeState, ProbeStore
from .trace_io import (
    EventTag,
    InteractionEvent,
    ParseError,
    parse_trace,
    serialize_interaction_log,
)

DEFAULT_PORT = 4815
LOOPBACK_HOSTS = ("127.0.0.1", "localhost", "::1")

TAB_FIRST = "trips"
TABS_TAIL = ("info", "log")


class ApiError(Exception):
    """Stable machine-readable service error."""

    def __init__(self, code: str, message: str, status: int):
        super().__init__(message)
        self.code = code
        self.message = message
        self.status = status


def _invalid(message: str) -> ApiError:
    return ApiError("invalid_input", message, 400)


class ProbeService:
    """Request handling over a ProbeStore; transport-agnostic for testability."""

    def __init__(
        self,
        store: ProbeStore,
        catalog: dict | None = None,
        prices: PriceConfig | None = None,
        detector_cfg: DetectorConfig | None = None,
        allow_coordinate_export: bool = False,
        window_len_days: int = DEFAULT_WINDOW_DAYS,
        utc_offset_ms: int = 0,
    ) -> None:
        self.store = store
        self.catalog = catalog if catalog is not None else load_vehicle_catalog()
        self.prices = prices or PriceConfig()
        self.detector_cfg = detector_cfg or DetectorConfig()
        self.allow_coordinate_export = allow_coordinate_export
        self.window_len_days = window_len_days
        self.utc_offset_ms = utc_offset_ms

    # -- derivations ---------------------------------------------------------

    def _profile(self, state: ProbeState) -> VehicleProfile:
        try:
            return self.catalog[state.vehicle]
        except KeyError:
            raise ApiError(
                "internal", f"vehicle {state.vehicle!r} missing from catalog", 500
            )

    def _pairs(self, state: ProbeState) -> list[tuple[Trip, TripCostSummary]]:
        profile = self._profile(state)
        return [
            (trip, trip_summary(trip, profile, self.prices))
            for trip in state.active_trips()
            if trip.mode is TripMode.AUTOMOTIVE
        ]

    def _logical_now(self, state: ProbeState, override: int | None) -> int | None:
        """The study clock runs on data: 'now' is the latest trip start."""
        if override is not None:
            return override
        starts = [t.start_ts for t in state.active_trips() if t.mode is TripMode.AUTOMOTIVE]
        return max(starts) if starts else None

    # -- payload shaping -------------------------------------------------------

    def _trip_item(self, trip: Trip, summary: TripCostSummary | None) -> dict[str, Any]:
        item: dict[str, Any] = {
            "id": trip.id,
            "start_ts": trip.start_ts,
            "end_ts": trip.end_ts,
            "mode": trip.mode.value,
            "distance_miles": round(trip.distance_miles, 3),
        }
        if summary is not None:
            item.update(
                {
                    "gallons": round(summary.gallons, 4),
                    "cost_usd": summary.cost.display(),
                    "co2_kg": round(summary.co2.co2_kg, 3),
                    "eco_fraction": round(summary.eco_fraction, 4),
                    "potential_cost_saving_usd": summary.potential_cost_saving.display(),
                    "potential_co2_saving_kg": round(summary.potential_co2_saving.co2_kg, 3),
                }
            )
        if self.allow_coordinate_export:
            item["origin"] = {"lat": trip.origin.lat, "lon": trip.origin.lon}
            item["destination"] = {"lat": trip.destination.lat, "lon": trip.destination.lon}
        return item

    @staticmethod
    def _totals_item(totals: Totals) -> dict[str, Any]:
        return {
            "trip_count": totals.trip_count,
            "cost_usd": totals.cost.display(),
            "co2_kg": round(totals.co2.co2_kg, 3),
            "potential_cost_saving_usd": totals.potential_cost_saving.display(),
            "potential_co2_saving_kg": round(totals.potential_co2_saving.co2_kg, 3),
        }

    @staticmethod
    def _goal_item(status: GoalStatus | None) -> dict[str, Any]:
        if status is None:
            return {"kind": GoalKind.NO_GOAL_YET.value, "goal": None, "current": None, "message": None}

        def fmt(value: float | None) -> Any:
            if value is None:
                return None
            return f"{value:.2f}" if status.metric == "cost" else round(value, 3)

        return {
            "kind": status.kind.value,
            "goal": fmt(status.goal_value),
            "current": fmt(status.current_value),
            "message": status.message,
        }

    # -- endpoints -------------------------------------------------------------

    def get_trips(self) -> list[dict[str, Any]]:
        state = self.store.snapshot()
        profile = self._profile(state)
        items = []
        for trip in sorted(state.active_trips(), key=lambda t: t.start_ts, reverse=True):
            summary = (
                trip_summary(trip, profile, self.prices)
                if trip.mode is TripMode.AUTOMOTIVE
                else None
            )
            items.append(self._trip_item(trip, summary))
        return items

    def delete_trip(self, trip_id: str) -> dict[str, Any]:
        self.store.delete_trip(trip_id)
        return {"deleted": trip_id}

    def get_vehicle(self) -> dict[str, Any]:
        category, powertrain = self.store.snapshot().vehicle
        return {"category": category, "powertrain": powertrain}

    def put_vehicle(self, body: dict) -> dict[str, Any]:
        category = body.get("category")
        powertrain = body.get("powertrain")
        if (category, powertrain) not in self.catalog:
            raise _invalid(f"unknown vehicle {category!r}/{powertrain!r}")
        self.store.set_vehicle(category, powertrain)
        return {"category": category, "powertrain": powertrain}

    def get_summary(self, metric: str, window: str, now_override: int | None = None) -> dict[str, Any]:
        if metric not in ("cost", "carbon"):
            raise _invalid(f"unknown metric {metric!r}")
        if window not in ("all", "current"):
            raise _invalid(f"unknown window {window!r}")
        state = self.store.snapshot()
        pairs = self._pairs(state)
        now_ts = self._logical_now(state, now_override)
        first = state.first_trip_start_ts()

        status: GoalStatus | None = None
        current_bounds: tuple[int, int] | None = None
        if first is not None and now_ts is not None:
            study_start = anchor_study_start(first, self.utc_offset_ms)
            windows = assign_windows(pairs, study_start, now_ts, self.window_len_days)
            goal_metric = "cost" if metric == "cost" else "co2"
            status = goal_status(windows, goal_metric, now_ts)
            window_ms = windows[0].end_ts - windows[0].start_ts
            k = (now_ts - study_start) // window_ms
            current_bounds = (windows[k].start_ts, windows[k].end_ts)

        if window == "all" or current_bounds is None:
            totals = aggregate(pairs)
        else:
            totals = aggregate(pairs, start_ts=current_bounds[0], end_ts=current_bounds[1])
        return {
            "metric": metric,
            "window": window,
            "totals": self._totals_item(totals),
            "goal": self._goal_item(status),
        }

    def post_events(self, body: Any) -> dict[str, Any]:
        if not isinstance(body, list):
            raise _invalid("body must be a JSON array of events")
        events = []
        for i, item in enumerate(body):
            if not isinstance(item, dict):
                raise _invalid(f"event at index {i} must be an object")
            tag = item.get("event")
            try:
                events.append(InteractionEvent(ts=int(item.get("ts")), event=EventTag(tag)))
            except (TypeError, ValueError):
                raise _invalid(f"bad event at index {i}: tag {tag!r}")
        self.store.record_events(events)
        return {"recorded": len(events)}

    def export_log(self) -> str:
        return serialize_interaction_log(self.store.snapshot().events)

    def post_traces(self, body: str) -> dict[str, Any]:
        try:
            trace, skipped = parse_trace(body)
        except ParseError as exc:
            raise _invalid(str(exc))
        trips = detect_trips(trace, self.detector_cfg)
        added = 0
        for trip in trips:
            if trip.mode is TripMode.AUTOMOTIVE:
                self.store.add_trip(trip)
                added += 1
        return {"trips_added": added, "skipped_lines": skipped}

    def get_tabs(self) -> dict[str, Any]:
        order = self.store.snapshot().carbon_cost_order or ("carbon", "cost")
        return {"order": [TAB_FIRST, order[0], order[1], *TABS_TAIL]}

    # -- transport-agnostic routing ---------------------------------------------

    def handle(
        self, method: str, path: str, query: dict[str, list[str]], body: bytes
    ) -> tuple[int, str, bytes]:
        try:
            return self._route(method, path, query, body)
        except ApiError as exc:
            return _json_response(
                exc.status, {"error": {"code": exc.code, "message": exc.message}}
            )
        except NotFoundError as exc:
            return _json_response(404, {"error": {"code": "not_found", "message": str(exc)}})
        except ConflictError as exc:
            return _json_response(409, {"error": {"code": "conflict", "message": str(exc)}})
        except (ParseError, ValueError) as exc:
            return _json_response(400, {"error": {"code": "invalid_input", "message": str(exc)}})
        except Exception as exc:  # pragma: no cover - defensive
            return _json_response(500, {"error": {"code": "internal", "message": str(exc)}})

    def _route(
        self, method: str, path: str, query: dict[str, list[str]], body: bytes
    ) -> tuple[int, str, bytes]:
        parts = [p for p in path.split("/") if p]
        if method == "GET" and parts == ["trips"]:
            return _json_response(200, self.get_trips())
        if method == "DELETE" and len(parts) == 2 and parts[0] == "trips":
            return _json_response(200, self.delete_trip(parts[1]))
        if method == "GET" and parts == ["vehicle"]:
            return _json_response(200, self.get_vehicle())
        if method == "PUT" and parts == ["vehicle"]:
            return _json_response(200, self.put_vehicle(_json_body(body)))
        if method == "GET" and len(parts) == 2 and parts[0] == "summary":
            window = query.get("window", ["all"])[0]
            now_override = None
            if "now" in query:
                now_override = int(query["now"][0])
            return _json_response(200, self.get_summary(parts[1], window, now_override))
        if method == "POST" and parts == ["events"]:
            return _json_response(200, self.post_events(_json_body(body)))
        if method == "GET" and parts == ["log", "export"]:
            return 200, "text/csv; charset=utf-8", self.export_log().encode("utf-8")
        if method == "POST" and parts == ["traces"]:
            return _json_response(200, self.post_traces(body.decode("utf-8")))
        if method == "GET" and parts == ["tabs"]:
            return _json_response(200, self.get_tabs())
        raise ApiError("not_found", f"no route for {method} {path}", 404)


def _json_body(body: bytes) -> Any:
    try:
        return json.loads(body.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError):
        raise _invalid("body is not valid JSON")


def _json_response(status: int, payload: Any) -> tuple[int, str, bytes]:
    data = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return status, "application/json", data


class _Handler(BaseHTTPRequestHandler):
    service: ProbeService
    protocol_version = "HTTP/1.1"

    def log_message(self, format: str, *args: Any) -> None:  # noqa: A002
        pass  # quiet: a research probe should not chat on stderr

    def _dispatch(self, method: str) -> None:
        parsed = urlsplit(self.path)
        length = int(self.headers.get("Content-Length") or 0)
        body = self.rfile.read(length) if length else b""
        status, ctype, payload = self.service.handle(
            method, parsed.path, parse_qs(parsed.query), body
        )
        self.send_response(status)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(payload)))
        # the dashboard is served as static files from another local origin
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(payload)

    def do_OPTIONS(self) -> None:
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, PUT, DELETE, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Content-Length", "0")
        self.end_headers()

    def do_GET(self) -> None:
        self._dispatch("GET")

    def do_POST(self) -> None:
        self._dispatch("POST")

    def do_PUT(self) -> None:
        self._dispatch("PUT")

    def do_DELETE(self) -> None:
        self._dispatch("DELETE")


def make_server(
    service: ProbeService,
    host: str = "127.0.0.1",
    port: int = DEFAULT_PORT,
    allow_remote: bool = False,
) -> ThreadingHTTPServer:
    """Bind the service; non-loopback hosts require the explicit flag."""
    if host not in LOOPBACK_HOSTS and not allow_remote:
        raise ValueError(
            f"refusing to bind non-loopback host {host!r} without allow_remote"
        )
    handler = type("BoundHandler", (_Handler,), {"service": service})
    return ThreadingHTTPServer((host, port), handler)
