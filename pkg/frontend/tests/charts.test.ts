import { describe, expect, it } from "vitest";

import { claimShareFromBins, histogramSvg, leaderboardTable, linearScale,
  scatterSvg } from "../src/charts.js";
import type { HistogramData, LeaderboardRow } from "../src/types.js";

function bins(counts: number[], lo = -1, hi = 1): HistogramData {
  const edges = counts.map((_, i) => lo + (i * (hi - lo)) / counts.length);
  edges.push(hi);
  return { edges, counts, total: counts.reduce((a, b) => a + b, 0) };
}

describe("claimShareFromBins", () => {
  it("counts whole bins below a bin-aligned threshold", () => {
    // 40 bins of width 0.05 on [-1, 1]; threshold -0.25 is edge-aligned
    const counts = new Array(40).fill(10);
    const data = bins(counts);
    // bins strictly below -0.25: from -1.0 to -0.25 = 15 bins
    expect(claimShareFromBins(data, -0.25)).toBeCloseTo(15 / 40, 12);
  });

  it("interpolates inside a bin for off-grid thresholds", () => {
    const data = bins([10, 10]);  // two bins on [-1, 1]
    expect(claimShareFromBins(data, -0.5)).toBeCloseTo(0.25, 12);
  });

  it("is zero on empty data and one above the top edge", () => {
    expect(claimShareFromBins({ edges: [0, 1], counts: [0], total: 0 }, 0.5)).toBe(0);
    expect(claimShareFromBins(bins([5, 5]), 2)).toBe(1);
  });
});

describe("histogramSvg", () => {
  const series = [
    { label: "counterfactual", color: "#00f", data: bins([1, 2, 3, 4]) },
    { label: "ssp", color: "#f00", data: bins([4, 3, 2, 1]) },
  ];

  it("shades the claim region left of the coverage threshold", () => {
    const svg = histogramSvg(series, { shadeBelow: -0.25 });
    const match = /<rect class="claim-region"[^>]*data-boundary="([^"]+)"/.exec(svg);
    expect(match?.[1]).toBe("-0.25");
    // shaded width covers (lo .. -0.25): 3/8 of the axis span
    const width = Number(/<rect class="claim-region"[^>]*width="([\d.]+)"/.exec(svg)?.[1]);
    const x0 = 42;
    const x1 = 640 - 12;
    expect(width).toBeCloseTo((x1 - x0) * (0.75 / 2), 0);
  });

  it("renders one labeled path per series", () => {
    const svg = histogramSvg(series);
    expect(svg.match(/<path class="series"/g)).toHaveLength(2);
    expect(svg).toContain('data-label="counterfactual"');
    expect(svg).toContain('data-label="ssp"');
  });

  it("identical inputs give identical markup", () => {
    expect(histogramSvg(series, { shadeBelow: -0.3 }))
      .toBe(histogramSvg(series, { shadeBelow: -0.3 }));
  });
});

describe("scatterSvg", () => {
  const points = [
    { id: "a", lat: 40, lon: -90, acres: 100, value: 0.1, label: "a" },
    { id: "b", lat: 41, lon: -91, acres: 0, value: 0.9, label: "b" },
    { id: "c", lat: 42, lon: -92, acres: 400, value: 0.5, label: "c" },
  ];

  it("hides zero-acreage neighborhoods", () => {
    const svg = scatterSvg(points);
    expect(svg.match(/<circle/g)).toHaveLength(2);
    expect(svg).not.toContain('data-id="b"');
  });

  it("marks the pinned dot", () => {
    const svg = scatterSvg(points, { pinned: "c" });
    expect(svg).toMatch(/class="dot pinned" data-id="c"/);
  });

  it("scales dot radius with acreage", () => {
    const svg = scatterSvg(points);
    const radii = [...svg.matchAll(/data-id="([ac])"[^>]*r="([\d.]+)"/g)]
      .map((m) => [m[1], Number(m[2])] as const);
    const byId = Object.fromEntries(radii);
    expect(byId.c).toBeGreaterThan(byId.a!);
  });

  it("shows an explicit empty state", () => {
    const svg = scatterSvg([]);
    expect(svg).toContain("empty-state");
  });
});

describe("leaderboardTable", () => {
  const rows: LeaderboardRow[] = [
    { rank: 1, layers: [32, 8], dropout: 0, l2: 0, dropped_attribute: null,
      mae_mean_val: 0.01, mae_std_val: 0.02, n_parameters: 100, status: "ok" },
    { rank: 2, layers: [8], dropout: 0.5, l2: 0.1, dropped_attribute: "year",
      mae_mean_val: 0.03, mae_std_val: 0.01, n_parameters: 50, status: "ok" },
  ];

  it("highlights the winning rank", () => {
    const html = leaderboardTable(rows);
    expect(html).toContain('class="winner" data-rank="1"');
    expect(html).not.toContain('class="winner" data-rank="2"');
  });

  it("renders every row", () => {
    expect(leaderboardTable(rows).match(/<tr data-rank=|<tr class="winner"/g))
      .toHaveLength(2);
  });
});

describe("linearScale", () => {
  it("maps the domain ends to the range ends", () => {
    const scale = linearScale(0, 10, 100, 200);
    expect(scale(0)).toBe(100);
    expect(scale(10)).toBe(200);
    expect(scale(5)).toBe(150);
  });
});
