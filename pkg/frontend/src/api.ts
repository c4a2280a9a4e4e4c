// Typed client for the probe service. The dashboard performs no cost/CO2/goal
// computation of its own: every displayed number originates from these payloads.

export type TabId = "trips" | "carbon" | "cost" | "info" | "log";

export interface TripItem {
  id: string;
  start_ts: number;
  end_ts: number;
  mode: string;
  distance_miles: number;
  gallons?: number;
  cost_usd?: string;
  co2_kg?: number;
  eco_fraction?: number;
  potential_cost_saving_usd?: string;
  potential_co2_saving_kg?: number;
}

export interface Totals {
  trip_count: number;
  cost_usd: string;
  co2_kg: number;
  potential_cost_saving_usd: string;
  potential_co2_saving_kg: number;
}

export interface GoalState {
  kind: "no_goal_yet" | "on_track" | "exceeded";
  goal: string | number | null;
  current: string | number | null;
  message: string | null;
}

export interface Summary {
  metric: "cost" | "carbon";
  window: "all" | "current";
  totals: Totals;
  goal: GoalState;
}

export interface Vehicle {
  category: string;
  powertrain: string;
}

export class ApiError extends Error {
  constructor(
    public code: string,
    message: string,
    public status: number,
  ) {
    super(message);
  }
}

async function parseError(response: Response): Promise<ApiError> {
  try {
    const body = await response.json();
    return new ApiError(body.error.code, body.error.message, response.status);
  } catch {
    return new ApiError("internal", `HTTP ${response.status}`, response.status);
  }
}

export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchFn: typeof fetch = (...args) => fetch(...args),
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    if (!response.ok) {
      throw await parseError(response);
    }
    return response;
  }

  async trips(): Promise<TripItem[]> {
    return (await this.request("/trips")).json();
  }

  async deleteTrip(id: string): Promise<void> {
    await this.request(`/trips/${id}`, { method: "DELETE" });
  }

  async vehicle(): Promise<Vehicle> {
    return (await this.request("/vehicle")).json();
  }

  async setVehicle(vehicle: Vehicle): Promise<void> {
    await this.request("/vehicle", {
      method: "PUT",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(vehicle),
    });
  }

  async summary(metric: "cost" | "carbon", window: "all" | "current"): Promise<Summary> {
    return (await this.request(`/summary/${metric}?window=${window}`)).json();
  }

  async tabs(): Promise<TabId[]> {
    const body = await (await this.request("/tabs")).json();
    return body.order as TabId[];
  }

  async postEvents(events: { ts: number; event: string }[]): Promise<void> {
    await this.request("/events", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(events),
    });
  }

  async exportLog(): Promise<string> {
    return (await this.request("/log/export")).text();
  }
}
