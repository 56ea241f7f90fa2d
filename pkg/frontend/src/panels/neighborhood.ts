/** Neighborhood panel: map-like scatter of neighborhoods, dot size tracking
 * maize acreage and color tracking the selected overlay (outcome change or a
 * climate delta). Clicking a dot pins its detail card. */

import { scatterSvg, ScatterPoint } from "../charts.js";
import { escapeHtml, num, pct, signedPct } from "../format.js";
import type { NeighborhoodState } from "../state.js";
import type { NeighborhoodRow } from "../types.js";

export const OVERLAYS = [
  "claims_rate_change",
  "claims_rate",
  "mean_yield_change",
  "precipitation:7:mean",
] as const;

export interface NeighborhoodData {
  treatment: NeighborhoodRow[];
  counterfactual: NeighborhoodRow[];
}

export function overlayValue(row: NeighborhoodRow, twin: NeighborhoodRow | undefined,
                             overlay: string): number | null {
  switch (overlay) {
    case "claims_rate":
      return row.claims_rate;
    case "claims_rate_change":
      return twin ? row.claims_rate - twin.claims_rate : null;
    case "mean_yield_change":
      return row.mean_yield_change;
    default: {
      const value = row.climate[overlay];
      return value === undefined ? null : value;
    }
  }
}

export function neighborhoodPoints(data: NeighborhoodData, overlay: string,
                                   ): ScatterPoint[] {
  const twins = new Map(data.counterfactual.map((r) => [r.geohash4, r]));
  const points: ScatterPoint[] = [];
  for (const row of data.treatment) {
    if (row.lat === null || row.lon === null) continue;
    const value = overlayValue(row, twins.get(row.geohash4), overlay);
    if (value === null) continue;
    points.push({
      id: row.geohash4,
      lat: row.lat,
      lon: row.lon,
      acres: row.acres,
      value,
      label: `${row.geohash4}: ${overlay} ${num(value, 4)}`,
    });
  }
  return points;
}

export interface DetailCard {
  geohash4: string;
  claimsRate: string;
  meanChange: string;
  severity: string;
  acres: string;
  significant: string;
  pValue: string;
}

export function detailCard(row: NeighborhoodRow): DetailCard {
  return {
    geohash4: row.geohash4,
    claimsRate: pct(row.claims_rate),
    meanChange: signedPct(row.mean_yield_change),
    severity: row.mean_severity_given_claim === null
      ? "no claims" : pct(row.mean_severity_given_claim),
    acres: num(row.acres, 0),
    significant: row.significant === null ? "n/a" : (row.significant ? "yes" : "no"),
    pValue: row.p_value === null ? "n/a" : row.p_value.toExponential(2),
  };
}

export function neighborhoodHtml(state: NeighborhoodState,
                                 data: NeighborhoodData | null): string {
  let view = '<p class="loading">loading neighborhoods…</p>';
  let card = "";
  if (data) {
    if (data.treatment.length === 0) {
      view = '<p class="empty-state">no neighborhood outcomes for this selection</p>';
    } else {
      const points = neighborhoodPoints(data, state.overlay);
      view = scatterSvg(points, { pinned: state.pinned });
      const pinnedRow = data.treatment.find((r) => r.geohash4 === state.pinned);
      if (pinnedRow) {
        const c = detailCard(pinnedRow);
        card = `<aside class="detail-card" data-role="detail" data-id="${escapeHtml(c.geohash4)}">
          <h3>${escapeHtml(c.geohash4)}</h3>
          <dl>
            <div><dt>claims rate</dt><dd>${c.claimsRate}</dd></div>
            <div><dt>mean yield change</dt><dd>${c.meanChange}</dd></div>
            <div><dt>severity | claim</dt><dd>${c.severity}</dd></div>
            <div><dt>maize acres</dt><dd>${c.acres}</dd></div>
            <div><dt>significant</dt><dd>${c.significant} (p=${c.pValue})</dd></div>
          </dl>
        </aside>`;
      }
    }
  }
  return `
  <section class="panel" data-panel="neighborhood">
    <h2>Neighborhood</h2>
    <p class="question">How do simulation results change across geography and
      climate conditions?</p>
    <form class="controls" data-role="controls">
      <label>scenario
        <select name="scenario">
          ${["ssp245_2030", "ssp245_2050"].map((s) =>
            `<option value="${s}"${s === state.scenario ? " selected" : ""}>${s}</option>`).join("")}
        </select>
      </label>
      <label>year <input type="number" name="year" value="${state.year}" step="1"></label>
      <label>overlay
        <select name="overlay">
          ${OVERLAYS.map((o) =>
            `<option value="${o}"${o === state.overlay ? " selected" : ""}>${o}</option>`).join("")}
        </select>
      </label>
    </form>
    <div class="geo-wrap">
      <div data-role="view">${view}</div>
      <div data-role="card">${card}</div>
    </div>
  </section>`;
}
