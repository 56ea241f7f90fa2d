/** Typed API client with per-panel cancel-on-supersede.
 *
 * Each panel passes its own key; firing a new request under the same key
 * aborts the in-flight one, so rapid slider movement never interleaves
 * stale renders.
 */

import type {
  ClaimsResponse, HistogramData, Meta, NeighborhoodsResponse, RatesResponse,
  SimulateRequest, SimulateResponse, SweepSurfaceResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

export class ApiClient {
  private inflight = new Map<string, AbortController>();

  constructor(readonly baseUrl: string = "",
              private fetcher: typeof fetch = fetch) {}

  private async request<T>(key: string, path: string, init?: RequestInit): Promise<T> {
    this.inflight.get(key)?.abort();
    const controller = new AbortController();
    this.inflight.set(key, controller);
    try {
      const response = await this.fetcher(this.baseUrl + path, {
        ...init,
        signal: controller.signal,
        headers: { "content-type": "application/json", ...(init?.headers ?? {}) },
      });
      if (!response.ok) {
        const text = await response.text();
        throw new ApiError(response.status, text || response.statusText);
      }
      return (await response.json()) as T;
    } finally {
      if (this.inflight.get(key) === controller) {
        this.inflight.delete(key);
      }
    }
  }

  meta(): Promise<Meta> {
    return this.request("meta", "/api/meta");
  }

  neighborhoods(key: string, scenario: string, year?: number,
                withCounterfactual = false): Promise<NeighborhoodsResponse> {
    const query = new URLSearchParams({ scenario });
    if (year !== undefined) query.set("year", String(year));
    if (withCounterfactual) query.set("with_counterfactual", "true");
    return this.request(key, `/api/neighborhoods?${query}`);
  }

  histogram(key: string, scenario: string, year: number): Promise<HistogramData> {
    const query = new URLSearchParams({ scenario, year: String(year) });
    return this.request(key, `/api/histogram?${query}`);
  }

  simulate(key: string, body: SimulateRequest): Promise<SimulateResponse> {
    return this.request(key, "/api/simulate", {
      method: "POST", body: JSON.stringify(body),
    });
  }

  claims(key: string, body: {
    history: number[]; y_actual: number; c_pct?: number; c_sigma?: number;
    window?: number;
  }): Promise<ClaimsResponse> {
    return this.request(key, "/api/claims", {
      method: "POST", body: JSON.stringify(body),
    });
  }

  sweepSurface(key: string, body: {
    layers?: number | null; dropout?: number | null; l2?: number | null;
    dropped_attribute?: string | null; match_dropped?: boolean; sort_by?: string;
  }): Promise<SweepSurfaceResponse> {
    return this.request(key, "/api/sweep-surface", {
      method: "POST", body: JSON.stringify(body),
    });
  }

  rates(key: string, body: {
    coverage_pct: number; acres: number; volatility: number;
  }): Promise<RatesResponse> {
    return this.request(key, "/api/rates", {
      method: "POST", body: JSON.stringify(body),
    });
  }
}

export function isAbort(err: unknown): boolean {
  return err instanceof DOMException && err.name === "AbortError";
}
