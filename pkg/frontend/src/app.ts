// Five-tab dashboard over the probe service. Tab order (carbon/cost swap)
// comes from the store's persisted random draw via GET /tabs; the trips tab
// is always first and holds the default focus. The UI renders service
// payloads verbatim and never computes a cost, emission, or goal itself.

import { ApiClient, ApiError, Summary, TabId, TripItem } from "./api.js";
import { EventQueue } from "./events.js";
import { ECO_TIP, INFO_PARAGRAPHS, POWERTRAINS, VEHICLE_CATEGORIES } from "./content.js";

export interface DashboardConfig {
  baseUrl: string;
  doc?: Document;
  fetchFn?: typeof fetch;
  retryMs?: number;
  now?: () => number;
}

const TAB_LABELS: Record<TabId, string> = {
  trips: "Trips",
  carbon: "Carbon",
  cost: "Costs",
  info: "Info",
  log: "Research Log",
};

function el(
  doc: Document,
  tag: string,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElement {
  const node = doc.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

function whenRange(doc: Document, trip: TripItem): HTMLElement {
  const start = new Date(trip.start_ts).toISOString().replace("T", " ").slice(0, 16);
  const end = new Date(trip.end_ts).toISOString().slice(11, 16);
  return el(doc, "span", { class: "when" }, `${start} → ${end}`);
}

export class Dashboard {
  readonly api: ApiClient;
  readonly events: EventQueue;
  private doc: Document;
  private order: TabId[] = ["trips", "carbon", "cost", "info", "log"];
  private active: TabId | null = null;
  private mutating = false;
  private view!: HTMLElement;
  private nav!: HTMLElement;

  constructor(
    private root: HTMLElement,
    config: DashboardConfig,
  ) {
    this.doc = config.doc ?? document;
    this.api = new ApiClient(config.baseUrl, config.fetchFn);
    this.events = new EventQueue(this.api, config.retryMs ?? 2000, config.now);
  }

  /** Fetch the persisted tab order, render the shell, then begin recording. */
  async start(): Promise<void> {
    this.order = await this.api.tabs();
    this.root.textContent = "";
    this.nav = el(this.doc, "nav", { "data-role": "tab-bar" });
    for (const id of this.order) {
      const button = el(this.doc, "button", { "data-tab": id }, TAB_LABELS[id]);
      button.addEventListener("click", () => void this.selectTab(id));
      this.nav.appendChild(button);
    }
    this.view = el(this.doc, "main", { "data-role": "view" });
    this.root.appendChild(this.nav);
    this.root.appendChild(this.view);

    // first render happens before any event is posted
    this.active = "trips";
    this.markActive();
    await this.renderActive();

    if (this.doc.visibilityState !== "hidden") {
      this.events.record("foreground");
    }
    this.doc.addEventListener("visibilitychange", () => {
      this.events.record(this.doc.visibilityState === "hidden" ? "background" : "foreground");
    });
  }

  tabOrder(): TabId[] {
    return [...this.order];
  }

  async selectTab(id: TabId): Promise<void> {
    if (id === this.active) {
      return;
    }
    this.active = id;
    this.events.record(`tab:${id}`);
    this.markActive();
    await this.renderActive();
  }

  private markActive(): void {
    for (const button of Array.from(this.nav.querySelectorAll("button"))) {
      button.classList.toggle("active", button.getAttribute("data-tab") === this.active);
    }
  }

  private async renderActive(): Promise<void> {
    const id = this.active as TabId;
    this.view.textContent = "";
    try {
      if (id === "trips") {
        await this.renderTrips();
      } else if (id === "carbon" || id === "cost") {
        await this.renderMetric(id);
      } else if (id === "info") {
        this.renderInfo();
      } else {
        await this.renderLog();
      }
    } catch (error) {
      this.renderError(error, () => void this.renderActive());
    }
  }

  private renderError(error: unknown, retry: () => void): void {
    const box = el(this.doc, "div", { class: "error", "data-role": "error" });
    const text =
      error instanceof ApiError ? `${error.code}: ${error.message}` : `service unreachable: ${error}`;
    box.appendChild(el(this.doc, "span", {}, text));
    const button = el(this.doc, "button", { "data-role": "retry" }, "Retry");
    button.addEventListener("click", retry);
    box.appendChild(button);
    this.view.appendChild(box);
  }

  // -- trips tab -------------------------------------------------------------

  private async renderTrips(): Promise<void> {
    const [trips, vehicle] = await Promise.all([this.api.trips(), this.api.vehicle()]);

    const picker = el(this.doc, "form", { "data-role": "vehicle-picker" });
    const categorySelect = el(this.doc, "select", { "data-role": "vehicle-category" });
    for (const category of VEHICLE_CATEGORIES) {
      const option = el(this.doc, "option", { value: category }, category.replace("_", " "));
      if (category === vehicle.category) {
        option.setAttribute("selected", "selected");
      }
      categorySelect.appendChild(option);
    }
    const powertrainSelect = el(this.doc, "select", { "data-role": "vehicle-powertrain" });
    for (const powertrain of POWERTRAINS) {
      const option = el(this.doc, "option", { value: powertrain }, powertrain);
      if (powertrain === vehicle.powertrain) {
        option.setAttribute("selected", "selected");
      }
      powertrainSelect.appendChild(option);
    }
    const apply = el(this.doc, "button", { "data-role": "vehicle-apply", type: "button" }, "Set vehicle");
    const status = el(this.doc, "span", { "data-role": "vehicle-status" });
    apply.addEventListener("click", () => void this.applyVehicle(categorySelect, powertrainSelect, status));
    picker.append(categorySelect, powertrainSelect, apply, status);
    this.view.appendChild(picker);

    if (trips.length === 0) {
      this.view.appendChild(
        el(this.doc, "p", { "data-role": "empty" }, "No trips yet. Drive somewhere, then ingest the trace."),
      );
      return;
    }
    const list = el(this.doc, "ul", { "data-role": "trip-list" });
    for (const trip of trips) {
      const row = el(this.doc, "li", { "data-role": "trip-row", "data-trip-id": trip.id });
      row.appendChild(whenRange(this.doc, trip));
      row.appendChild(el(this.doc, "span", { class: "distance" }, `${trip.distance_miles} mi`));
      if (trip.cost_usd !== undefined) {
        row.appendChild(el(this.doc, "span", { class: "cost" }, `$${trip.cost_usd}`));
        row.appendChild(el(this.doc, "span", { class: "co2" }, `${trip.co2_kg} kg`));
      }
      const remove = el(this.doc, "button", { "data-role": "delete", type: "button" }, "Delete");
      remove.addEventListener("click", () => void this.deleteTrip(trip.id, row));
      row.appendChild(remove);
      list.appendChild(row);
    }
    this.view.appendChild(list);
  }

  private async applyVehicle(
    categorySelect: HTMLElement,
    powertrainSelect: HTMLElement,
    status: HTMLElement,
  ): Promise<void> {
    if (this.mutating) {
      return;
    }
    this.mutating = true;
    status.textContent = "";
    try {
      await this.api.setVehicle({
        category: (categorySelect as HTMLSelectElement).value,
        powertrain: (powertrainSelect as HTMLSelectElement).value,
      });
      status.textContent = "saved";
    } catch (error) {
      status.textContent = error instanceof ApiError ? `${error.code}: ${error.message}` : String(error);
    } finally {
      this.mutating = false;
    }
  }

  private async deleteTrip(id: string, row: HTMLElement): Promise<void> {
    if (this.mutating) {
      return;
    }
    this.mutating = true;
    try {
      await this.api.deleteTrip(id);
      await this.renderActive(); // list reflects server state after the mutation
    } catch (error) {
      const note = error instanceof ApiError ? `${error.code}: ${error.message}` : String(error);
      row.appendChild(el(this.doc, "span", { "data-role": "error" }, note));
    } finally {
      this.mutating = false;
    }
  }

  // -- carbon / cost tabs ------------------------------------------------------

  private async renderMetric(metric: "carbon" | "cost"): Promise<void> {
    const apiMetric = metric === "cost" ? "cost" : "carbon";
    const [all, current] = await Promise.all([
      this.api.summary(apiMetric, "all"),
      this.api.summary(apiMetric, "current"),
    ]);

    const goal = current.goal;
    if (goal.kind === "exceeded") {
      this.view.appendChild(
        el(this.doc, "div", { class: "banner exceeded", "data-role": "goal-banner" }, goal.message ?? ""),
      );
    } else if (goal.kind === "on_track") {
      const unit = metric === "cost" ? "$" : "";
      const suffix = metric === "cost" ? "" : " kg";
      this.view.appendChild(
        el(
          this.doc,
          "div",
          { class: "banner on-track", "data-role": "goal-banner" },
          `Last period: ${unit}${goal.goal}${suffix} · this period so far: ${unit}${goal.current}${suffix}`,
        ),
      );
    }
    this.view.appendChild(el(this.doc, "p", { class: "tip", "data-role": "eco-tip" }, ECO_TIP));
    this.view.appendChild(this.totalsLine(metric, all));

    const trips = await this.api.trips();
    const list = el(this.doc, "ul", { "data-role": "metric-trips" });
    for (const trip of trips) {
      if (trip.cost_usd === undefined) {
        continue;
      }
      const value = metric === "cost" ? `$${trip.cost_usd}` : `${trip.co2_kg} kg`;
      const saving =
        metric === "cost"
          ? `save up to $${trip.potential_cost_saving_usd}`
          : `save up to ${trip.potential_co2_saving_kg} kg`;
      const row = el(this.doc, "li", { "data-role": "metric-row", "data-trip-id": trip.id });
      row.appendChild(whenRange(this.doc, trip));
      row.appendChild(el(this.doc, "span", { class: "value" }, value));
      row.appendChild(el(this.doc, "span", { class: "saving" }, saving));
      list.appendChild(row);
    }
    this.view.appendChild(list);
  }

  private totalsLine(metric: "carbon" | "cost", summary: Summary): HTMLElement {
    const totals = summary.totals;
    const text =
      metric === "cost"
        ? `Total fuel cost: $${totals.cost_usd} · eco-driving could have saved $${totals.potential_cost_saving_usd} across ${totals.trip_count} trips`
        : `Total CO2: ${totals.co2_kg} kg · eco-driving could have avoided ${totals.potential_co2_saving_kg} kg across ${totals.trip_count} trips`;
    return el(this.doc, "p", { class: "totals", "data-role": "totals" }, text);
  }

  // -- info / log tabs -----------------------------------------------------------

  private renderInfo(): void {
    for (const paragraph of INFO_PARAGRAPHS) {
      this.view.appendChild(el(this.doc, "p", { "data-role": "info-paragraph" }, paragraph));
    }
  }

  private async renderLog(): Promise<void> {
    const text = await this.api.exportLog();
    const pre = el(this.doc, "pre", { "data-role": "log-export" }, text);
    const copy = el(this.doc, "button", { "data-role": "copy-log", type: "button" }, "Copy to clipboard");
    copy.addEventListener("click", () => {
      void this.doc.defaultView?.navigator?.clipboard?.writeText(text);
    });
    this.view.appendChild(copy);
    this.view.appendChild(pre);
  }
}

export function createDashboard(root: HTMLElement, config: DashboardConfig): Dashboard {
  return new Dashboard(root, config);
}
