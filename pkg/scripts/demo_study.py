#!/usr/bin/env python3
"""End-to-end demo: a synthetic 10-day study folded into one store.

Simulates daily drives, ingests them through the same path the service
uses, then prints per-window totals, the goal banner state, and a dwell
report from a synthetic interaction log.

Usage: python scripts/demo_study.py [--store PATH] [--seed S]
"""

import argparse
import random
import sys
import tempfile
from pathlib import Path

from ecoprobe.dwell import compute_dwell
from ecoprobe.model import MS_PER_DAY
from ecoprobe.service import ProbeService
from ecoprobe.simulator import Scenario, Segment, simulate, trace_comment
from ecoprobe.store import ProbeStore
from ecoprobe.trace_io import EventTag, InteractionEvent, serialize_trace

DAY0 = (1_700_000_000_000 // MS_PER_DAY + 1) * MS_PER_DAY


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--store", type=Path, default=None)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    store_path = args.store or Path(tempfile.mkdtemp()) / "demo-journal.log"
    store = ProbeStore(store_path, order_seed=args.seed)
    service = ProbeService(store)
    rnd = random.Random(args.seed)

    print(f"journal: {store_path}")
    print(f"carbon/cost display order: {store.state.carbon_cost_order}")

    for day in range(10):
        for _ in range(rnd.randint(1, 2)):
            scenario = Scenario(
                seed=args.seed * 100 + day,
                segments=(Segment("drive", rnd.uniform(300, 1200), rnd.uniform(8, 25), rnd.uniform(0, 360)),),
                sample_period_s=5.0,
                start_ts=DAY0 + day * MS_PER_DAY + rnd.randint(0, 12) * 3_600_000,
            )
            trace, _ = simulate(scenario)
            service.post_traces(serialize_trace(trace, comment=trace_comment(scenario)))

    print(f"\ntrips ingested: {len(store.state.active_trips())}")
    for metric in ("cost", "carbon"):
        summary = service.get_summary(metric, "all")
        goal = service.get_summary(metric, "current")["goal"]
        print(f"\n[{metric}] totals: {summary['totals']}")
        print(f"[{metric}] goal: kind={goal['kind']} goal={goal['goal']} current={goal['current']}")
        if goal["message"]:
            print(f"[{metric}] banner: {goal['message']}")

    # a participant session: open, glance at cost, then carbon, leave
    log = [
        InteractionEvent(ts=DAY0 + 1000, event=EventTag.FOREGROUND),
        InteractionEvent(ts=DAY0 + 21_000, event=EventTag.TAB_COST),
        InteractionEvent(ts=DAY0 + 108_000, event=EventTag.TAB_CARBON),
        InteractionEvent(ts=DAY0 + 181_000, event=EventTag.BACKGROUND),
    ]
    store.record_events(log)
    report = compute_dwell(store.state.events)
    print(f"\ndwell (ms): {report.dwell_ms}")
    print(f"sessions: {report.session_count}, foreground: {report.total_foreground_ms} ms")
    return 0


if __name__ == "__main__":
    sys.exit(main())
