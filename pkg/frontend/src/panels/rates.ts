/** Rates panel: steer policy variables, read the premium/subsidy response.
 * All figures come verbatim from the service's illustrative stub. */

import { escapeHtml, money, pct } from "../format.js";
import type { RatesState } from "../state.js";
import { DEFAULTS } from "../state.js";
import type { RatesResponse } from "../types.js";

export interface RatesViewModel {
  rows: { label: string; value: string }[];
  modelTag: string;
}

export function ratesViewModel(response: RatesResponse): RatesViewModel {
  return {
    modelTag: response.model,
    rows: [
      { label: "premium per acre", value: money(response.premium_per_acre) },
      { label: "total premium", value: money(response.total_premium) },
      { label: "subsidy share", value: pct(response.subsidy_pct) },
      { label: "subsidy amount", value: money(response.subsidy_amount) },
      { label: "producer premium", value: money(response.producer_premium) },
    ],
  };
}

export function ratesHtml(state: RatesState, response: RatesResponse | null): string {
  const vm = response ? ratesViewModel(response) : null;
  const readout = vm
    ? `<dl class="readout">${vm.rows.map((r) =>
        `<div><dt>${escapeHtml(r.label)}</dt><dd>${r.value}</dd></div>`).join("")}</dl>
       <p class="note">formula: ${escapeHtml(vm.modelTag)} (for exploration, not rating)</p>`
    : '<p class="loading">loading…</p>';
  return `
  <section class="panel" data-panel="rates">
    <h2>Rates</h2>
    <p class="question">What factors influence the price and subsidy of a policy?</p>
    <form class="controls" data-role="controls">
      <label>coverage level
        <input type="range" name="coverage" min="0.5" max="0.85" step="0.05"
               value="${state.coveragePct}">
        <output>${pct(state.coveragePct, 0)}</output>
      </label>
      <label>unit acres
        <input type="number" name="acres" min="1" step="10" value="${state.acres}">
      </label>
      <label>historic volatility
        <input type="range" name="volatility" min="0" max="0.5" step="0.01"
               value="${state.volatility}">
        <output>${pct(state.volatility, 0)}</output>
      </label>
      <button type="button" data-role="reset">reset</button>
    </form>
    <div data-role="readout">${readout}</div>
  </section>`;
}

export function resetRates(): RatesState {
  return { ...DEFAULTS.rates };
}
