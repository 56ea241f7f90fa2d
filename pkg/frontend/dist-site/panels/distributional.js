/** Distributional panel: overlaid yield-delta histograms for a projected
 * scenario against its counterfactual, with claims-rate callouts. Moving the
 * coverage slider re-shades the claim region from cached bins without
 * another simulation request. */
import { claimShareFromBins, histogramSvg } from "../charts.js";
import { escapeHtml, pct, signedPct } from "../format.js";
export const TREATMENT_COLOR = "#c54133";
export const COUNTERFACTUAL_COLOR = "#3b6ea5";
function histogramFor(response, scenario, year) {
    const perYear = response.histograms[scenario];
    const data = perYear?.[String(year)];
    if (!data)
        throw new Error(`no histogram for ${scenario}/${year}`);
    return data;
}
export function distributionalViewModel(state, response) {
    const threshold = state.coveragePct - 1;
    const treatment = histogramFor(response, response.treatment, state.year);
    const counterfactual = histogramFor(response, response.counterfactual, state.year);
    return {
        threshold,
        treatment: {
            label: response.treatment,
            data: treatment,
            claimShare: claimShareFromBins(treatment, threshold),
        },
        counterfactual: {
            label: response.counterfactual,
            data: counterfactual,
            claimShare: claimShareFromBins(counterfactual, threshold),
        },
        aggregates: response.aggregates
            .filter((a) => a.year === state.year)
            .map((a) => ({ scenario: a.scenario, loss: a.unit_loss_probability,
            change: a.unit_mean_yield_change })),
        pctSignificant: response.pct_acreage_significant,
    };
}
export function distributionalHtml(state, response) {
    let view = '<p class="loading">simulating…</p>';
    if (response) {
        const vm = distributionalViewModel(state, response);
        const svg = histogramSvg([
            { label: vm.counterfactual.label, color: COUNTERFACTUAL_COLOR,
                data: vm.counterfactual.data },
            { label: vm.treatment.label, color: TREATMENT_COLOR, data: vm.treatment.data },
        ], { shadeBelow: vm.threshold });
        const callouts = `
      <dl class="readout callouts">
        <div><dt>${escapeHtml(vm.treatment.label)} claims</dt>
          <dd class="treatment" data-role="treatment-claims">${pct(vm.treatment.claimShare)}</dd></div>
        <div><dt>${escapeHtml(vm.counterfactual.label)} claims</dt>
          <dd class="counterfactual">${pct(vm.counterfactual.claimShare)}</dd></div>
        ${vm.aggregates.map((a) => `<div><dt>${escapeHtml(a.scenario)} mean change</dt>
          <dd>${signedPct(a.change)}</dd></div>`).join("")}
        <div><dt>acreage with significant change</dt>
          <dd>${pct(vm.pctSignificant)}</dd></div>
      </dl>`;
        view = svg + callouts;
    }
    return `
  <section class="panel" data-panel="distributional">
    <h2>Distributional</h2>
    <p class="question">How do overall simulation results change under
      different simulation parameters?</p>
    <form class="controls" data-role="controls">
      <label>scenario
        <select name="scenario">
          ${["ssp245_2030", "ssp245_2050"].map((s) => `<option value="${s}"${s === state.scenario ? " selected" : ""}>${s}</option>`).join("")}
        </select>
      </label>
      <label>series year
        <input type="number" name="year" value="${state.year}" step="1">
      </label>
      <label>neighborhood size
        <select name="precision">
          ${[[4, "4-char (~28×20 km)"], [3, "3-char (~109×156 km)"]].map(([v, label]) => `<option value="${v}"${Number(v) === state.precision ? " selected" : ""}>${label}</option>`).join("")}
        </select>
      </label>
      <label>coverage level (re-shades instantly)
        <input type="range" name="coverage" min="0.5" max="0.95" step="0.05"
               value="${state.coveragePct}">
        <output>${pct(state.coveragePct, 0)}</output>
      </label>
      <label>trials
        <input type="number" name="trials" min="100" max="50000" step="100"
               value="${state.trials}">
      </label>
      <label>seed
        <input type="number" name="seed" value="${state.seed}" step="1">
      </label>
    </form>
    <div data-role="view">${view}</div>
  </section>`;
}
