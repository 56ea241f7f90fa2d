/** Integration against the real service: builds a fixture bundle, starts the
 * HTTP server, and holds the UI to its contracts — exact claims parity, URL
 * reproducibility of live views, and the fixture's rising-claims property. */

import { ChildProcess, execFileSync, spawn } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { claimShareFromBins } from "../src/charts.js";
import { localClaims } from "../src/claimsLocal.js";
import { claimsHtml } from "../src/panels/claims.js";
import { distributionalHtml } from "../src/panels/distributional.js";
import { hyperHtml } from "../src/panels/hyper.js";
import { neighborhoodHtml } from "../src/panels/neighborhood.js";
import { ratesHtml } from "../src/panels/rates.js";
import { DEFAULTS, decodeState, encodeState } from "../src/state.js";
import type { ClaimsResponse, HistogramData, NeighborhoodsResponse,
  RatesResponse, SimulateResponse, SweepSurfaceResponse } from "../src/types.js";

const PORT = 8891 + Math.floor(Math.random() * 1000);
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess | null = null;
let dataDir = "";

async function waitForService(timeoutMs = 60_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    try {
      const response = await fetch(`${BASE}/api/meta`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) throw new Error("service did not start");
    await new Promise((resolve) => setTimeout(resolve, 200));
  }
}

async function post<T>(path: string, body: unknown): Promise<T> {
  const response = await fetch(`${BASE}${path}`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(body),
  });
  if (!response.ok) throw new Error(`${path} -> ${response.status}`);
  return (await response.json()) as T;
}

async function get<T>(path: string): Promise<T> {
  const response = await fetch(`${BASE}${path}`);
  if (!response.ok) throw new Error(`${path} -> ${response.status}`);
  return (await response.json()) as T;
}

beforeAll(async () => {
  dataDir = mkdtempSync(join(tmpdir(), "croprisk-ui-"));
  execFileSync("python3", ["-c",
    "import sys; from croprisk.fixtures import build_demo_dir; " +
    `build_demo_dir(sys.argv[1], seed=1, trials=2000, n_neighborhoods=12)`,
    dataDir], { stdio: "inherit" });
  server = spawn("python3", ["-m", "croprisk.cli", "serve",
    "--data", dataDir, "--port", String(PORT)], { stdio: "ignore" });
  await waitForService();
}, 120_000);

afterAll(() => {
  server?.kill();
  if (dataDir) rmSync(dataDir, { recursive: true, force: true });
});

describe("claims parity", () => {
  it("matches service verdicts exactly for 50 randomized histories", async () => {
    let seed = 424242;
    const rand = () => {
      seed = (seed * 1103515245 + 12345) % 2147483648;
      return seed / 2147483648;
    };
    for (let trial = 0; trial < 50; trial += 1) {
      const n = 2 + Math.floor(rand() * 9);
      const history = Array.from({ length: n },
        () => Math.round((40 + rand() * 160) * 100) / 100);
      const yActual = Math.round(rand() * 200 * 100) / 100;
      const cPct = Math.round((0.5 + rand() * 0.45) * 100) / 100;
      const cSigma = Math.round(rand() * 3 * 100) / 100;

      const remote = await post<ClaimsResponse>("/api/claims", {
        history, y_actual: yActual, c_pct: cPct, c_sigma: cSigma,
      });
      const local = localClaims(history, yActual, cPct, cSigma);

      expect(local.percent.claim).toBe(remote.final.percent.claim);
      expect(local.percent.loss).toBeCloseTo(remote.final.percent.loss, 9);
      expect(local.percent.threshold).toBeCloseTo(remote.final.percent.threshold, 9);
      expect(local.yExpected).toBeCloseTo(remote.final.y_expected, 9);
      expect(local.stddev === null).toBe(remote.final.stddev === null);
      if (local.stddev && remote.final.stddev) {
        expect(local.stddev.claim).toBe(remote.final.stddev.claim);
        expect(local.stddev.loss).toBeCloseTo(remote.final.stddev.loss, 9);
        expect(local.stddev.threshold).toBeCloseTo(remote.final.stddev.threshold, 9);
      }
    }
  }, 60_000);
});

describe("panels render from live fixture data", () => {
  it("rates", async () => {
    const response = await post<RatesResponse>("/api/rates", {
      coverage_pct: 0.75, acres: 320, volatility: 0.12 });
    const html = ratesHtml(DEFAULTS.rates, response);
    expect(html).toContain("premium per acre");
    expect(html).toContain("$");
  });

  it("hyper-parameters", async () => {
    const leaderboard = await post<SweepSurfaceResponse>("/api/sweep-surface", {});
    expect(leaderboard.total).toBeGreaterThan(0);
    const html = hyperHtml({ ...DEFAULTS.hyper, sweepAll: true }, leaderboard);
    expect(html).toContain("leaderboard");
    expect(html).toContain('data-rank="1"');
  });

  it("distributional", async () => {
    const sim = await post<SimulateResponse>("/api/simulate", {
      scenario: "ssp245_2050", trials: 400, seed: 5, coverage_pct: 0.75,
      year: 2050 });
    const html = distributionalHtml(
      { ...DEFAULTS.distributional, trials: 400, seed: 5 }, sim);
    expect(html).toContain("claim-region");
    expect(html).toContain("acreage with significant change");
  });

  it("claims", async () => {
    const response = await post<ClaimsResponse>("/api/claims", {
      history: DEFAULTS.claims.history, y_actual: 70 });
    const html = claimsHtml(DEFAULTS.claims, response);
    expect(html).toContain('data-role="per-year"');
  });

  it("neighborhood with a pinned card mirroring the API row", async () => {
    // one request serves the whole interaction: rows plus counterfactual twins
    const response = await get<NeighborhoodsResponse>(
      "/api/neighborhoods?scenario=ssp245_2050&year=2050&with_counterfactual=true");
    expect(response.rows.length).toBeGreaterThan(0);
    expect(response.counterfactual_scenario).toBe("counterfactual_2050");
    expect(response.counterfactual_rows!.length).toBe(response.rows.length);
    const pinned = response.rows[0]!.geohash4;
    const html = neighborhoodHtml(
      { ...DEFAULTS.neighborhood, pinned },
      { treatment: response.rows, counterfactual: response.counterfactual_rows! });
    expect(html).toContain(`data-id="${pinned}"`);
    expect(html).toContain('data-role="detail"');
    const rounded = `${(100 * response.rows[0]!.claims_rate).toFixed(1)}%`;
    expect(html).toContain(rounded);
  });
});

describe("fixture properties the UI relies on", () => {
  it("coarser neighborhoods merge into fewer cells", async () => {
    const fine = await post<SimulateResponse>("/api/simulate", {
      scenario: "ssp245_2030", trials: 200, seed: 3, coverage_pct: 0.75,
      year: 2030, precision: 4 });
    const coarse = await post<SimulateResponse>("/api/simulate", {
      scenario: "ssp245_2030", trials: 200, seed: 3, coverage_pct: 0.75,
      year: 2030, precision: 3 });
    const cells = (r: SimulateResponse) =>
      new Set(r.outcomes.map((o) => o.geohash4));
    expect(cells(coarse).size).toBeLessThanOrEqual(cells(fine).size);
    for (const cell of cells(coarse)) expect(cell).toHaveLength(3);
  });

  it("claims-rate callout increases from the 2030 to the 2050 series", async () => {
    const h2030 = await get<HistogramData>(
      "/api/histogram?scenario=ssp245_2030&year=2030");
    const h2050 = await get<HistogramData>(
      "/api/histogram?scenario=ssp245_2050&year=2050");
    const share2030 = claimShareFromBins(h2030, -0.25);
    const share2050 = claimShareFromBins(h2050, -0.25);
    expect(share2050).toBeGreaterThan(share2030);
  });

  it("bin-derived callouts agree with the engine's claims rates", async () => {
    const sim = await post<SimulateResponse>("/api/simulate", {
      scenario: "ssp245_2030", trials: 500, seed: 11, coverage_pct: 0.75,
      year: 2030 });
    const agg = sim.aggregates.find(
      (a) => a.scenario === "ssp245_2030" && a.year === 2030)!;
    const hist = sim.histograms["ssp245_2030"]!["2030"]!;
    // acreage-weighted engine rate vs unweighted bin share: same data, the
    // bins pool all neighborhoods, so agreement is approximate
    expect(claimShareFromBins(hist, -0.25)).toBeCloseTo(
      agg.unit_loss_probability, 1);
  });

  it("same-seed simulate responses are byte-identical", async () => {
    const body = { scenario: "ssp245_2030", trials: 300, seed: 21,
                   coverage_pct: 0.75, year: 2030 };
    const a = JSON.stringify(await post("/api/simulate", body));
    const b = JSON.stringify(await post("/api/simulate", body));
    expect(a).toBe(b);
  });
});

describe("URL reproducibility of live views", () => {
  it("a decoded URL re-renders the same distributional view", async () => {
    const state = { ...DEFAULTS.distributional, trials: 300, seed: 9, year: 2050 };
    const url = encodeState("distributional", state);
    const restored = decodeState(url);
    expect(restored.state).toEqual(state);
    const sim = await post<SimulateResponse>("/api/simulate", {
      scenario: state.scenario, trials: state.trials, seed: state.seed,
      coverage_pct: state.coveragePct, year: state.year });
    const first = distributionalHtml(state, sim);
    const second = distributionalHtml(
      restored.state as typeof state, sim);
    expect(second).toBe(first);
  });
});
