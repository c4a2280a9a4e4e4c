// @vitest-environment jsdom
//
// End-to-end acceptance against the real probe service: a scripted headless
// session (open -> view cost tab -> delete one trip -> hide) must leave a
// server-side interaction log whose dwell intervals match the script timings
// within 100 ms each; the carbon/cost order must persist across reload; the
// exceeded banner must render the exact message; and displayed totals must
// equal the CLI report on the same store.

import { ChildProcess, execFileSync, spawn } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { Dashboard } from "../src/app.js";

const PYTHON = process.env.PYTHON ?? "python3";
const DAY_MS = 86_400_000;
const DAY0 = (Math.floor(1_700_000_000_000 / DAY_MS) + 1) * DAY_MS;

const SEED_SCRIPT = `
import sys
from ecoprobe.store import ProbeStore
from ecoprobe.service import ProbeService
from ecoprobe.simulator import Scenario, Segment, simulate, trace_comment
from ecoprobe.trace_io import serialize_trace

path, day0 = sys.argv[1], int(sys.argv[2])
store = ProbeStore(path, order_seed=5)
service = ProbeService(store)

def drive(day, duration_s, speed, seed):
    scenario = Scenario(
        seed=seed,
        segments=(Segment("drive", duration_s, speed, 90.0),),
        sample_period_s=5.0,
        start_ts=day0 + int(day * ${DAY_MS}),
    )
    trace, _ = simulate(scenario)
    service.post_traces(serialize_trace(trace, comment=trace_comment(scenario)))

drive(0, 300, 10.0, 1)     # window 0: one short drive
drive(3, 600, 15.0, 2)     # window 1: two long drives -> exceeded even after one deletion
drive(3.2, 600, 15.0, 3)
`;

let workDir: string;
let storePath: string;
let server: ChildProcess;
let baseUrl: string;

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

async function waitForService(url: string, timeoutMs = 15_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${url}/tabs`);
      if (response.ok) {
        return;
      }
    } catch {
      // not up yet
    }
    await sleep(100);
  }
  throw new Error("probe service did not come up");
}

function cli(...args: string[]): string {
  return execFileSync(PYTHON, ["-m", "ecoprobe.cli", "--store", storePath, ...args], {
    encoding: "utf-8",
  });
}

function mount(id: string): HTMLElement {
  const node = document.createElement("div");
  node.id = id;
  document.body.appendChild(node);
  return node;
}

function setVisibility(state: "visible" | "hidden"): void {
  Object.defineProperty(document, "visibilityState", { configurable: true, get: () => state });
  document.dispatchEvent(new Event("visibilitychange"));
}

beforeAll(async () => {
  workDir = mkdtempSync(join(tmpdir(), "ecoprobe-e2e-"));
  storePath = join(workDir, "journal.log");
  execFileSync(PYTHON, ["-c", SEED_SCRIPT, storePath, String(DAY0)], { encoding: "utf-8" });
  const port = 20000 + Math.floor(Math.random() * 20000);
  baseUrl = `http://127.0.0.1:${port}`;
  server = spawn(PYTHON, ["-m", "ecoprobe.cli", "--store", storePath, "serve", "--port", String(port)], {
    stdio: "ignore",
  });
  await waitForService(baseUrl);
}, 30_000);

afterAll(() => {
  server?.kill();
});

describe("dashboard against the live probe service", () => {
  it("runs the scripted session and satisfies the acceptance checks", async () => {
    document.body.innerHTML = "";
    setVisibility("visible");
    const dash = new Dashboard(mount("app"), { baseUrl, retryMs: 50 });

    // -- scripted session: open -> view cost tab -> delete one trip -> hide --
    const OPEN_TO_COST_MS = 400;
    const COST_TO_TRIPS_MS = 500;
    const TRIPS_TO_HIDE_MS = 400;

    await dash.start(); // posts foreground
    await sleep(OPEN_TO_COST_MS);

    const costButton = document.querySelector('button[data-tab="cost"]') as HTMLElement;
    costButton.click(); // posts tab:cost
    await sleep(50); // let the metric view render
    const banner = document.querySelector('[data-role="goal-banner"]');
    expect(banner?.textContent).toBe(
      "You drove more than last period, try again when the current period resets.",
    );
    await sleep(COST_TO_TRIPS_MS - 50);

    const tripsButton = document.querySelector('button[data-tab="trips"]') as HTMLElement;
    tripsButton.click(); // posts tab:trips
    await sleep(50);
    let rows = document.querySelectorAll('[data-role="trip-row"]');
    expect(rows.length).toBe(3);
    (rows[0].querySelector('[data-role="delete"]') as HTMLElement).click(); // newest trip
    const deadline = Date.now() + 5000;
    while (document.querySelectorAll('[data-role="trip-row"]').length !== 2 && Date.now() < deadline) {
      await sleep(20);
    }
    expect(document.querySelectorAll('[data-role="trip-row"]').length).toBe(2);
    await sleep(TRIPS_TO_HIDE_MS - 50);

    setVisibility("hidden"); // posts background
    await dash.events.flush();

    // -- server-side log matches the script timings within 100 ms per interval --
    const exported = await (await fetch(`${baseUrl}/log/export`)).text();
    const lines = exported.trim().split("\n").slice(1);
    const events = lines.map((line) => {
      const [ts, tag] = line.split(",");
      return { ts: Number(ts), tag };
    });
    expect(events.map((e) => e.tag)).toEqual(["foreground", "tab:cost", "tab:trips", "background"]);
    const gaps = events.slice(1).map((e, i) => e.ts - events[i].ts);
    expect(Math.abs(gaps[0] - OPEN_TO_COST_MS)).toBeLessThanOrEqual(100);
    expect(Math.abs(gaps[1] - COST_TO_TRIPS_MS)).toBeLessThanOrEqual(100);
    expect(Math.abs(gaps[2] - TRIPS_TO_HIDE_MS)).toBeLessThanOrEqual(100);

    // compute_dwell (via the CLI) sees the same intervals
    const logPath = join(workDir, "exported.csv");
    writeFileSync(logPath, exported);
    const dwell = JSON.parse(cli("--format", "json", "dwell", logPath));
    expect(dwell.session_count).toBe(1);
    expect(Math.abs(dwell.dwell_ms.trips - (gaps[0] + gaps[2]))).toBeLessThanOrEqual(1);
    expect(Math.abs(dwell.dwell_ms.cost - gaps[1])).toBeLessThanOrEqual(1);
    expect(Math.abs(dwell.dwell_ms.trips - (OPEN_TO_COST_MS + TRIPS_TO_HIDE_MS))).toBeLessThanOrEqual(200);
    expect(Math.abs(dwell.dwell_ms.cost - COST_TO_TRIPS_MS)).toBeLessThanOrEqual(100);
  }, 30_000);

  it("keeps the carbon/cost order stable across reload and matches the store", async () => {
    document.body.innerHTML = "";
    setVisibility("visible");
    const first = new Dashboard(mount("app-a"), { baseUrl, retryMs: 50 });
    await first.start();
    const firstOrder = first.tabOrder();

    document.body.innerHTML = "";
    const second = new Dashboard(mount("app-b"), { baseUrl, retryMs: 50 });
    await second.start();
    expect(second.tabOrder()).toEqual(firstOrder);
    expect(firstOrder[0]).toBe("trips");
    expect([...firstOrder.slice(1, 3)].sort()).toEqual(["carbon", "cost"]);
    await first.events.flush();
    await second.events.flush();
  }, 30_000);

  it("renders the exceeded banner after reload and totals equal to the CLI report", async () => {
    document.body.innerHTML = "";
    setVisibility("visible");
    const dash = new Dashboard(mount("app"), { baseUrl, retryMs: 50 });
    await dash.start();
    await dash.selectTab("cost");

    const banner = document.querySelector('[data-role="goal-banner"]');
    expect(banner?.textContent).toBe(
      "You drove more than last period, try again when the current period resets.",
    );

    const report = JSON.parse(cli("--format", "json", "report", "cost"));
    const totalsText = document.querySelector('[data-role="totals"]')?.textContent ?? "";
    expect(totalsText).toContain(`$${report.totals.cost_usd}`);
    expect(totalsText).toContain(`saved $${report.totals.potential_cost_saving_usd}`);
    expect(totalsText).toContain(`across ${report.totals.trip_count} trips`);

    await dash.selectTab("carbon");
    const carbonReport = JSON.parse(cli("--format", "json", "report", "carbon"));
    const carbonTotals = document.querySelector('[data-role="totals"]')?.textContent ?? "";
    expect(carbonTotals).toContain(`${carbonReport.totals.co2_kg} kg`);
    await dash.events.flush();
  }, 30_000);
});
