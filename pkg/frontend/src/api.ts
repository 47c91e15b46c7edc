/** Typed client for the suitability service. Every number shown in the UI
 * comes through here; nothing is recomputed client-side. */

export type SuitabilityClass = "largely_unsuitable" | "low" | "medium" | "high";

export const CLASS_KEYS: readonly SuitabilityClass[] = [
  "largely_unsuitable",
  "low",
  "medium",
  "high",
];

export interface GridCellSummary {
  grid_id: number;
  origin: [number, number];
  x: number;
  class: SuitabilityClass;
}

export interface RuleRow {
  rule_id: string;
  raw: number;
  max_raw: number;
  weight: number;
  contribution: number;
}

export interface Breakdown {
  grid_id: number;
  rules: RuleRow[];
  s_raw: number;
  s: number;
  m: number;
  x: number;
  class: SuitabilityClass;
  exclusion_reasons: string[];
}

export interface ClassDistribution {
  largely_unsuitable_pct: number;
  low_pct: number;
  medium_pct: number;
  high_pct: number;
}

export interface WhatifChange {
  grid_id: number;
  from_class: SuitabilityClass;
  to_class: SuitabilityClass;
}

export interface WhatifResponse {
  alpha: number;
  distribution: ClassDistribution;
  changed: number;
  changes: WhatifChange[];
}

export interface HealthResponse {
  status: string;
  snapshot_timestamp: string;
}

export interface SummaryResponse {
  distribution: ClassDistribution;
  descriptives: unknown[];
}

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail);
    this.name = "ApiError";
  }
}

export interface FetchInit {
  method?: string;
  headers?: Record<string, string>;
  body?: string;
}

export interface FetchResponseLike {
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
}

export type FetchLike = (url: string, init?: FetchInit) => Promise<FetchResponseLike>;

export function isValidAlpha(alpha: number): boolean {
  return typeof alpha === "number" && Number.isFinite(alpha) && alpha >= 0 && alpha <= 1;
}

export class ApiClient {
  private readonly base: string;
  private readonly fetchFn: FetchLike;

  constructor(serviceBaseUrl: string, fetchFn?: FetchLike) {
    this.base = serviceBaseUrl.replace(/\/+$/, "");
    // wrap instead of storing fetch directly: a detached fetch loses its
    // window receiver in browsers
    this.fetchFn = fetchFn ?? ((url, init) => globalThis.fetch(url, init));
  }

  private async request<T>(path: string, init?: FetchInit): Promise<T> {
    const response = await this.fetchFn(`${this.base}${path}`, init);
    const payload: unknown = await response.json();
    if (!response.ok) {
      // the service wraps failures as {"error": message}
      const detail =
        typeof payload === "object" && payload !== null && "error" in payload
          ? String((payload as { error: unknown }).error)
          : `request failed with status ${response.status}`;
      throw new ApiError(response.status, detail);
    }
    return payload as T;
  }

  health(): Promise<HealthResponse> {
    return this.request("/health");
  }

  grids(bbox: [number, number, number, number]): Promise<GridCellSummary[]> {
    return this.request(`/grids?bbox=${bbox.join(",")}`);
  }

  breakdown(gridId: number): Promise<Breakdown> {
    return this.request(`/grids/${gridId}/breakdown`);
  }

  /** Rejects out-of-range alphas before any network traffic. */
  whatif(alpha: number): Promise<WhatifResponse> {
    if (!isValidAlpha(alpha)) {
      return Promise.reject(new RangeError(`alpha ${alpha} out of [0,1]`));
    }
    return this.request("/whatif", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ alpha }),
    });
  }

  summary(): Promise<SummaryResponse> {
    return this.request("/summary");
  }
}
