/** Claims panel: edit a production history and see which years claim under
 * the percent-of-history rule versus the stability-aware rule. The side
 * table is the service's verdict; the headline card is the local echo,
 * which integration tests hold to exact agreement. */
import { localClaims } from "../claimsLocal.js";
import { escapeHtml, num, pct } from "../format.js";
export function claimsRows(response) {
    return response.per_year.map((entry) => ({
        index: entry.index ?? 0,
        y: entry.y,
        yExpected: entry.y_expected,
        percentClaim: entry.percent.claim,
        percentLoss: entry.percent.loss,
        stddevClaim: entry.stddev ? entry.stddev.claim : null,
        stddevLoss: entry.stddev ? entry.stddev.loss : null,
    }));
}
export function verdictBadge(claim) {
    if (claim === null)
        return '<span class="badge na">n/a</span>';
    return claim ? '<span class="badge claim">claim</span>'
        : '<span class="badge ok">no claim</span>';
}
export function claimsHtml(state, response) {
    const local = localClaims(state.history, state.yActual, state.cPct, state.cSigma);
    const headline = `
    <dl class="readout" data-role="local-echo">
      <div><dt>expected yield</dt><dd data-role="expected">${num(local.yExpected)}</dd></div>
      <div><dt>history std</dt><dd>${num(local.historyStd)}</dd></div>
      <div><dt>percent guarantee (${pct(state.cPct, 0)})</dt>
        <dd>${num(local.percent.threshold)} ${verdictBadge(local.percent.claim)}
            loss ${num(local.percent.loss)}</dd></div>
      <div><dt>stability guarantee (μ − ${state.cSigma}σ)</dt>
        <dd>${local.stddev ? `${num(local.stddev.threshold)} ${verdictBadge(local.stddev.claim)}
            loss ${num(local.stddev.loss)}` : "needs ≥ 2 history years"}</dd></div>
    </dl>`;
    let table = '<p class="loading">checking history…</p>';
    if (response) {
        const rows = claimsRows(response);
        table = `<table class="claims-table" data-role="per-year">
      <tr><th>year #</th><th>yield</th><th>expectation</th>
          <th>percent rule</th><th>stability rule</th></tr>
      ${rows.map((r) => `<tr data-index="${r.index}">
        <td>${r.index + 1}</td><td>${num(r.y)}</td><td>${num(r.yExpected)}</td>
        <td>${verdictBadge(r.percentClaim)}</td>
        <td>${verdictBadge(r.stddevClaim)}</td></tr>`).join("")}
    </table>`;
    }
    return `
  <section class="panel" data-panel="claims">
    <h2>Claims</h2>
    <p class="question">How do different regulatory choices influence grower
      behavior?</p>
    <form class="controls" data-role="controls">
      <label>production history (comma separated)
        <input type="text" name="history" size="50"
               value="${escapeHtml(state.history.join(","))}">
      </label>
      <label>this year's yield
        <input type="number" name="yActual" step="0.1" value="${state.yActual}">
      </label>
      <label>coverage fraction
        <input type="number" name="cPct" min="0.05" max="1" step="0.05"
               value="${state.cPct}">
      </label>
      <label>stability multiple
        <input type="number" name="cSigma" min="0" step="0.01" value="${state.cSigma}">
      </label>
    </form>
    ${headline}
    ${table}
  </section>`;
}
