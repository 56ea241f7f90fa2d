import { describe, expect, it } from "vitest";

import { DEFAULTS } from "../src/state.js";
import { claimsHtml, claimsRows } from "../src/panels/claims.js";
import { COUNTERFACTUAL_COLOR, distributionalHtml, distributionalViewModel,
  TREATMENT_COLOR } from "../src/panels/distributional.js";
import { hyperHtml, hyperViewModel, matchConfig } from "../src/panels/hyper.js";
import { detailCard, neighborhoodHtml, neighborhoodPoints,
  overlayValue } from "../src/panels/neighborhood.js";
import { ratesHtml, ratesViewModel } from "../src/panels/rates.js";
import type { ClaimsResponse, HistogramData, NeighborhoodRow, RatesResponse,
  SimulateResponse, SweepSurfaceResponse } from "../src/types.js";

function hist(counts: number[]): HistogramData {
  const edges = counts.map((_, i) => -1 + (2 * i) / counts.length);
  edges.push(1);
  return { edges, counts, total: counts.reduce((a, b) => a + b, 0) };
}

const SIM_FIXTURE: SimulateResponse = {
  request: { scenario: "ssp245_2050", trials: 100, seed: 1, coverage_pct: 0.75,
             year: 2050 },
  treatment: "ssp245_2050",
  counterfactual: "counterfactual_2050",
  aggregates: [
    { scenario: "counterfactual_2050", year: 2050, unit_mean_yield_change: 0.08,
      unit_loss_probability: 0.015, avg_covered_loss_severity: 0.06 },
    { scenario: "ssp245_2050", year: 2050, unit_mean_yield_change: 0.01,
      unit_loss_probability: 0.05, avg_covered_loss_severity: 0.09 },
  ],
  outcomes: [],
  pct_acreage_significant: 0.9,
  p_threshold: 0.0025,
  n_tests: 20,
  histograms: {
    ssp245_2050: { "2050": hist([8, 6, 4, 2]) },
    counterfactual_2050: { "2050": hist([2, 4, 6, 8]) },
  },
};

describe("distributional view model", () => {
  it("shades below coverage - 1 and derives callouts from the bins", () => {
    const state = { ...DEFAULTS.distributional, coveragePct: 0.75, year: 2050 };
    const vm = distributionalViewModel(state, SIM_FIXTURE);
    expect(vm.threshold).toBeCloseTo(-0.25, 12);
    // ssp bins [8,6,4,2] on [-1,1]: below -0.25 is bins 1 and half of... the
    // -0.25 boundary falls inside bin 2 of 4 (width 0.5): share = (8 + 6*0.5)/20
    expect(vm.treatment.claimShare).toBeCloseTo((8 + 6 * 0.5) / 20, 12);
    expect(vm.counterfactual.claimShare).toBeCloseTo((2 + 4 * 0.5) / 20, 12);
    expect(vm.pctSignificant).toBe(0.9);
  });

  it("same data for both overlays means identical histograms", () => {
    const same: SimulateResponse = {
      ...SIM_FIXTURE,
      histograms: {
        ssp245_2050: { "2050": hist([5, 5, 5, 5]) },
        counterfactual_2050: { "2050": hist([5, 5, 5, 5]) },
      },
    };
    const vm = distributionalViewModel(
      { ...DEFAULTS.distributional, year: 2050 }, same);
    expect(vm.treatment.data).toEqual(vm.counterfactual.data);
    expect(vm.treatment.claimShare).toBe(vm.counterfactual.claimShare);
  });

  it("renders both series and the shaded region", () => {
    const html = distributionalHtml(
      { ...DEFAULTS.distributional, year: 2050 }, SIM_FIXTURE);
    expect(html).toContain(TREATMENT_COLOR);
    expect(html).toContain(COUNTERFACTUAL_COLOR);
    expect(html).toContain("claim-region");
    expect(html).toContain("data-panel=\"distributional\"");
  });
});

const CLAIMS_FIXTURE: ClaimsResponse = {
  final: {
    y: 70, y_expected: 100,
    percent: { threshold: 75, claim: true, loss: 5, severity: 0.05 },
    stddev: { threshold: 89.45, claim: true, loss: 19.45, severity: 0.1945 },
  },
  per_year: [
    { index: 1, y: 100, y_expected: 100,
      percent: { threshold: 75, claim: false, loss: 0, severity: 0 },
      stddev: null },
    { index: 2, y: 60, y_expected: 100,
      percent: { threshold: 75, claim: true, loss: 15, severity: 0.15 },
      stddev: { threshold: 89.45, claim: true, loss: 29.45, severity: 0.2945 } },
  ],
  c_pct: 0.75, c_sigma: 2.11, window: 10,
};

describe("claims view", () => {
  it("maps service entries into table rows", () => {
    const rows = claimsRows(CLAIMS_FIXTURE);
    expect(rows).toHaveLength(2);
    expect(rows[1]).toMatchObject({ y: 60, percentClaim: true, stddevClaim: true });
    expect(rows[0]).toMatchObject({ percentClaim: false, stddevClaim: null });
  });

  it("renders the local echo and the verdict table", () => {
    const html = claimsHtml(DEFAULTS.claims, CLAIMS_FIXTURE);
    expect(html).toContain('data-role="local-echo"');
    expect(html).toContain('data-role="per-year"');
    // default state: flat 100s, y=70 -> expected 100 shown in local echo
    expect(html).toContain('data-role="expected">100.00');
  });
});

const LEADERBOARD: SweepSurfaceResponse = {
  total: 3,
  rows: [
    { rank: 1, layers: [32, 8], dropout: 0, l2: 0, dropped_attribute: null,
      mae_mean_val: 0.01, mae_std_val: 0.03, n_parameters: 120, status: "ok" },
    { rank: 2, layers: [8], dropout: 0.01, l2: 0, dropped_attribute: null,
      mae_mean_val: 0.02, mae_std_val: 0.01, n_parameters: 60, status: "ok" },
    { rank: 3, layers: [64, 32, 8], dropout: 0, l2: 0.1, dropped_attribute: "year",
      mae_mean_val: 0.04, mae_std_val: 0.02, n_parameters: 400, status: "ok" },
  ],
};

describe("hyper view model", () => {
  it("finds the selected configuration", () => {
    const state = { ...DEFAULTS.hyper, layers: 2, dropout: 0, l2: 0 };
    const vm = hyperViewModel(state, LEADERBOARD);
    expect(vm.mode).toBe("single");
    expect(vm.selected?.rank).toBe(1);
  });

  it("reports a not-computed state for configs outside the sweep", () => {
    const state = { ...DEFAULTS.hyper, layers: 6, dropout: 0.5, l2: 0.2 };
    expect(hyperViewModel(state, LEADERBOARD).mode).toBe("missing");
    expect(hyperHtml(state, LEADERBOARD)).toContain("not part of the");
  });

  it("sweep mode sorts stably by the chosen metric", () => {
    const state = { ...DEFAULTS.hyper, sweepAll: true,
                    sortBy: "mae_std_val" as const };
    const vm = hyperViewModel(state, LEADERBOARD);
    expect(vm.rows.map((r) => r.rank)).toEqual([2, 3, 1]);
  });

  it("matches dropped attributes exactly", () => {
    const state = { ...DEFAULTS.hyper, layers: 3, dropout: 0, l2: 0.1,
                    droppedAttribute: "year" };
    expect(matchConfig(LEADERBOARD.rows, state)?.rank).toBe(3);
  });

  it("highlights rank 1 in the full table", () => {
    const html = hyperHtml({ ...DEFAULTS.hyper, sweepAll: true }, LEADERBOARD);
    expect(html).toContain('class="winner" data-rank="1"');
  });
});

function neighborhoodRow(partial: Partial<NeighborhoodRow>): NeighborhoodRow {
  return {
    scenario: "ssp245_2050", geohash4: "9zqv", year: 2050, claims_rate: 0.05,
    mean_severity_given_claim: 0.08, mean_yield_change: 0.01, n_trials: 100,
    p_value: 0.001, significant: true, acres: 1000, lat: 41, lon: -93,
    climate: { "precipitation:7:mean": -1.2 },
    ...partial,
  };
}

describe("neighborhood view", () => {
  it("computes overlay values including the change vs counterfactual", () => {
    const row = neighborhoodRow({ claims_rate: 0.07 });
    const twin = neighborhoodRow({ claims_rate: 0.02, scenario: "counterfactual_2050" });
    expect(overlayValue(row, twin, "claims_rate")).toBeCloseTo(0.07);
    expect(overlayValue(row, twin, "claims_rate_change")).toBeCloseTo(0.05, 12);
    expect(overlayValue(row, twin, "precipitation:7:mean")).toBeCloseTo(-1.2);
    expect(overlayValue(row, undefined, "claims_rate_change")).toBeNull();
  });

  it("drops zero-acreage and unplaced rows from the scatter", () => {
    const data = {
      treatment: [neighborhoodRow({}), neighborhoodRow({ geohash4: "dp09", acres: 0 }),
                  neighborhoodRow({ geohash4: "dp10", lat: null })],
      counterfactual: [],
    };
    const points = neighborhoodPoints(data, "claims_rate");
    expect(points.map((p) => p.id)).toEqual(["9zqv", "dp09"]);
    // acreage-zero row survives point construction but the chart hides it
    const html = neighborhoodHtml(
      { ...DEFAULTS.neighborhood, overlay: "claims_rate" }, data);
    expect(html).not.toContain('data-id="dp09"');
  });

  it("pinned card echoes the API row verbatim", () => {
    const row = neighborhoodRow({ claims_rate: 0.1234, acres: 2500 });
    const card = detailCard(row);
    expect(card.claimsRate).toBe("12.3%");
    expect(card.acres).toBe("2500");
    const html = neighborhoodHtml(
      { ...DEFAULTS.neighborhood, pinned: "9zqv", overlay: "claims_rate" },
      { treatment: [row], counterfactual: [] });
    expect(html).toContain('data-role="detail" data-id="9zqv"');
    expect(html).toContain("12.3%");
  });

  it("shows an explicit empty state", () => {
    const html = neighborhoodHtml(DEFAULTS.neighborhood,
                                  { treatment: [], counterfactual: [] });
    expect(html).toContain("empty-state");
  });
});

describe("rates view", () => {
  const response: RatesResponse = {
    model: "illustrative-stub", coverage_pct: 0.75, acres: 320, volatility: 0.12,
    premium_per_acre: 6, total_premium: 1920, subsidy_pct: 0.55,
    subsidy_amount: 1056, producer_premium: 864,
  };

  it("passes service figures through verbatim", () => {
    const vm = ratesViewModel(response);
    expect(vm.rows.find((r) => r.label === "producer premium")?.value).toBe("$864.00");
    expect(vm.modelTag).toBe("illustrative-stub");
  });

  it("renders controls plus the stub disclaimer", () => {
    const html = ratesHtml(DEFAULTS.rates, response);
    expect(html).toContain("illustrative-stub");
    expect(html).toContain('data-role="reset"');
  });
});
