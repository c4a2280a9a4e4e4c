"""Client-side persistence: one local, human-readable, append-only journal.

Every mutation is a line ``seq,ts,op,<compact JSON payload>``; state is the
fold of the journal from empty, so replaying the file reconstructs the
probe exactly. Nothing ever leaves this file, matching the client-side
privacy model the probe encodes.
"""

from __future__ import annotations

import json
import os
import random
import threading
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Iterable

from .model import GeoPoint, Trip, TripMode, now_ms
from .trace_io import EventTag, InteractionEvent

DEFAULT_VEHICLE = ("midsize_car", "ICE")


class NotFoundError(Exception):
    """Referenced entity does not exist."""


class ConflictError(Exception):
    """Mutation conflicts with current state (e.g. double delete)."""


class Op(str, Enum):
    TRIP_ADDED = "trip_added"
    TRIP_DELETED = "trip_deleted"
    VEHICLE_SET = "vehicle_set"
    EVENT_RECORDED = "event_recorded"
    ORDER_ASSIGNED = "order_assigned"


@dataclass(frozen=True)
class JournalEntry:
    seq: int
    ts: int
    op: Op
    payload: dict


@dataclass
class ProbeState:
    """Fold of the journal: trips (with deleted flags), vehicle, events, tab order."""

    trips: dict[str, Trip] = field(default_factory=dict)
    vehicle: tuple[str, str] = DEFAULT_VEHICLE
    events: list[InteractionEvent] = field(default_factory=list)
    carbon_cost_order: tuple[str, str] | None = None

    def active_trips(self) -> list[Trip]:
        return sorted(
            (t for t in self.trips.values() if not t.deleted), key=lambda t: t.start_ts
        )

    def first_trip_start_ts(self) -> int | None:
        """Earliest start over every ingested trip, deleted ones included:
        deleting a trip must not shift the study clock."""
        if not self.trips:
            return None
        return min(t.start_ts for t in self.trips.values())


def _trip_payload(trip: Trip) -> dict:
    return {
        "id": trip.id,
        "start_ts": trip.start_ts,
        "end_ts": trip.end_ts,
        "origin": {"lat": trip.origin.lat, "lon": trip.origin.lon},
        "destination": {"lat": trip.destination.lat, "lon": trip.destination.lon},
        "distance_miles": trip.distance_miles,
        "mode": trip.mode.value,
    }


def _trip_from_payload(payload: dict) -> Trip:
    return Trip(
        id=payload["id"],
        start_ts=int(payload["start_ts"]),
        end_ts=int(payload["end_ts"]),
        origin=GeoPoint(float(payload["origin"]["lat"]), float(payload["origin"]["lon"])),
        destination=GeoPoint(
            float(payload["destination"]["lat"]), float(payload["destination"]["lon"])
        ),
        distance_miles=float(payload["distance_miles"]),
        mode=TripMode(payload["mode"]),
    )


def _apply(state: ProbeState, entry: JournalEntry) -> None:
    """Apply one entry, raising if it is invalid against the current state."""
    if entry.op is Op.TRIP_ADDED:
        trip = _trip_from_payload(entry.payload)
        if trip.id in state.trips:
            raise ConflictError(f"duplicate trip id {trip.id}")
        state.trips[trip.id] = trip
    elif entry.op is Op.TRIP_DELETED:
        trip_id = entry.payload["id"]
        existing = state.trips.get(trip_id)
        if existing is None:
            raise NotFoundError(f"unknown trip id {trip_id}")
        if existing.deleted:
            raise ConflictError(f"trip {trip_id} already deleted")
        state.trips[trip_id] = Trip(
            id=existing.id,
            start_ts=existing.start_ts,
            end_ts=existing.end_ts,
            origin=existing.origin,
            destination=existing.destination,
            distance_miles=existing.distance_miles,
            mode=existing.mode,
            deleted=True,
        )
    elif entry.op is Op.VEHICLE_SET:
        state.vehicle = (entry.payload["category"], entry.payload["powertrain"])
    elif entry.op is Op.EVENT_RECORDED:
        state.events.append(
            InteractionEvent(ts=int(entry.payload["ts"]), event=EventTag(entry.payload["event"]))
        )
    elif entry.op is Op.ORDER_ASSIGNED:
        order = tuple(entry.payload["order"])
        if sorted(order) != ["carbon", "cost"]:
            raise ValueError(f"bad tab order {order!r}")
        state.carbon_cost_order = order  # type: ignore[assignment]


def _parse_line(line: str, prev_seq: int) -> JournalEntry:
    head = line.split(",", 3)
    if len(head) != 4:
        raise ValueError("wrong field count")
    seq = int(head[0])
    if seq <= prev_seq:
        raise ValueError(f"seq {seq} not increasing after {prev_seq}")
    ts = int(head[1])
    op = Op(head[2])
    payload = json.loads(head[3])
    if not isinstance(payload, dict):
        raise ValueError("payload must be a JSON object")
    return JournalEntry(seq=seq, ts=ts, op=op, payload=payload)


@dataclass(frozen=True)
class ReplayResult:
    state: ProbeState
    next_seq: int
    entries_applied: int
    truncated_lines: int  # trailing lines dropped as torn or invalid
    valid_bytes: int  # byte length of the longest valid prefix


def replay(path: Path) -> ReplayResult:
    """Fold a journal file into state, recovering the longest valid prefix.

    A torn or corrupt tail (truncated write, bad JSON, seq regression,
    reference to a missing trip) stops the fold there; everything before it
    stands. Replay is deterministic and idempotent.
    """
    state = ProbeState()
    next_seq = 1
    applied = 0
    raw = path.read_bytes()
    raw_lines = raw.split(b"\n")
    # a file not ending in a newline has a torn final line
    torn_tail = bool(raw_lines and raw_lines[-1] != b"")
    complete = raw_lines[:-1]
    valid_bytes = 0
    for idx, raw_line in enumerate(complete):
        line = raw_line.decode("utf-8", errors="replace")
        if line == "":
            valid_bytes += 1  # the bare newline
            continue
        try:
            entry = _parse_line(line, next_seq - 1)
            _apply(state, entry)
        except (ValueError, KeyError, NotFoundError, ConflictError, TypeError):
            truncated = len([l for l in complete[idx:] if l != b""]) + (1 if torn_tail else 0)
            return ReplayResult(state, next_seq, applied, truncated, valid_bytes)
        next_seq = entry.seq + 1
        applied += 1
        valid_bytes += len(raw_line) + 1
    return ReplayResult(state, next_seq, applied, 1 if torn_tail else 0, valid_bytes)


class ProbeStore:
    """Single-writer, multi-reader journaled store.

    All mutations are serialized through one lock and durably appended
    before acknowledgment; readers get consistent snapshots. On first
    initialization the carbon/cost tab display order is drawn once with a
    seeded PRNG and journaled.
    """

    def __init__(
        self,
        path: str | Path,
        order_seed: int | None = None,
        clock: Callable[[], int] = now_ms,
    ) -> None:
        self.path = Path(path)
        self._clock = clock
        self._lock = threading.RLock()
        self.truncated_lines = 0
        if self.path.exists():
            result = replay(self.path)
            self._state = result.state
            self._next_seq = result.next_seq
            self.truncated_lines = result.truncated_lines
            if result.truncated_lines > 0:
                # drop the torn tail now so future appends extend the valid
                # prefix instead of landing behind unreadable bytes
                with open(self.path, "r+b") as fh:
                    fh.truncate(result.valid_bytes)
                    fh.flush()
                    os.fsync(fh.fileno())
        else:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self.path.touch()
            self._state = ProbeState()
            self._next_seq = 1
        if self._state.carbon_cost_order is None:
            rng = random.Random(order_seed)
            order = rng.choice([("carbon", "cost"), ("cost", "carbon")])
            self._append(Op.ORDER_ASSIGNED, {"order": list(order)})

    def _append(self, op: Op, payload: dict) -> int:
        """Validate against current state, then durably append. Returns seq."""
        with self._lock:
            entry = JournalEntry(seq=self._next_seq, ts=self._clock(), op=op, payload=payload)
            _apply(self._state, entry)  # raises without touching the journal
            line = f"{entry.seq},{entry.ts},{entry.op.value},{json.dumps(payload, separators=(',', ':'), sort_keys=True)}\n"
            try:
                with open(self.path, "a", encoding="utf-8") as fh:
                    fh.write(line)
                    fh.flush()
                    os.fsync(fh.fileno())
            except OSError:
                # the journal is the source of truth: drop the unwritten
                # mutation from memory before surfacing the failure
                result = replay(self.path)
                self._state = result.state
                self._next_seq = result.next_seq
                raise
            self._next_seq += 1
            return entry.seq

    # -- mutations ---------------------------------------------------------

    def add_trip(self, trip: Trip) -> Trip:
        """Journal a trip under a store-assigned id; returns the stored trip."""
        with self._lock:
            stored = Trip(
                id=f"t{self._next_seq:06d}",
                start_ts=trip.start_ts,
                end_ts=trip.end_ts,
                origin=trip.origin,
                destination=trip.destination,
                distance_miles=trip.distance_miles,
                mode=trip.mode,
            )
            self._append(Op.TRIP_ADDED, _trip_payload(stored))
            return stored

    def delete_trip(self, trip_id: str) -> int:
        return self._append(Op.TRIP_DELETED, {"id": trip_id})

    def set_vehicle(self, category: str, powertrain: str) -> int:
        return self._append(Op.VEHICLE_SET, {"category": category, "powertrain": powertrain})

    def record_event(self, event: InteractionEvent) -> int:
        return self._append(
            Op.EVENT_RECORDED, {"ts": event.ts, "event": event.event.value}
        )

    def record_events(self, events: Iterable[InteractionEvent]) -> None:
        for ev in events:
            self.record_event(ev)

    # -- reads -------------------------------------------------------------

    @property
    def state(self) -> ProbeState:
        with self._lock:
            return self._state

    def snapshot(self) -> ProbeState:
        """Deep-enough copy for consistent multi-field reads."""
        with self._lock:
            return ProbeState(
                trips=dict(self._state.trips),
                vehicle=self._state.vehicle,
                events=list(self._state.events),
                carbon_cost_order=self._state.carbon_cost_order,
            )
