/** Hyper-parameter panel: inspect one configuration's validation error, or
 * press "sweep" to see the whole leaderboard at once. */

import { leaderboardTable } from "../charts.js";
import { escapeHtml, pct } from "../format.js";
import type { HyperState } from "../state.js";
import type { LeaderboardRow, SweepSurfaceResponse } from "../types.js";

export interface HyperViewModel {
  mode: "single" | "all" | "missing";
  selected?: LeaderboardRow;
  rows: LeaderboardRow[];
}

export function matchConfig(rows: LeaderboardRow[], state: HyperState,
                            ): LeaderboardRow | undefined {
  const dropped = state.droppedAttribute === "none" ? null : state.droppedAttribute;
  return rows.find((r) => r.layers.length === state.layers
    && Math.abs(r.dropout - state.dropout) < 1e-12
    && Math.abs(r.l2 - state.l2) < 1e-12
    && (r.dropped_attribute ?? null) === dropped);
}

export function hyperViewModel(state: HyperState,
                               response: SweepSurfaceResponse): HyperViewModel {
  const sorted = [...response.rows].sort((a, b) => {
    const ka = a[state.sortBy];
    const kb = b[state.sortBy];
    return ka === kb ? a.rank - b.rank : (ka < kb ? -1 : 1);  // stable reorder
  });
  if (state.sweepAll) {
    return { mode: "all", rows: sorted };
  }
  const selected = matchConfig(response.rows, state);
  if (!selected) return { mode: "missing", rows: [] };
  return { mode: "single", selected, rows: [selected] };
}

export function hyperHtml(state: HyperState,
                          response: SweepSurfaceResponse | null): string {
  let view = '<p class="loading">loading…</p>';
  if (response) {
    const vm = hyperViewModel(state, response);
    if (vm.mode === "missing") {
      view = '<p class="not-computed">this configuration was not part of the ' +
        "precomputed sweep — pick another or press sweep</p>";
    } else if (vm.mode === "single" && vm.selected) {
      const s = vm.selected;
      view = `<dl class="readout" data-role="single">
        <div><dt>rank</dt><dd>#${s.rank}</dd></div>
        <div><dt>val MAE (mean)</dt><dd>${pct(s.mae_mean_val, 2)}</dd></div>
        <div><dt>val MAE (std)</dt><dd>${pct(s.mae_std_val, 2)}</dd></div>
        <div><dt>parameters</dt><dd>${s.n_parameters}</dd></div>
      </dl>`;
    } else {
      view = leaderboardTable(vm.rows);
    }
  }
  const options = (values: (string | number)[], current: string | number) =>
    values.map((v) => `<option value="${v}"${String(v) === String(current)
      ? " selected" : ""}>${escapeHtml(String(v))}</option>`).join("");
  return `
  <section class="panel" data-panel="hyper">
    <h2>Hyper-Parameters</h2>
    <p class="question">How do hyper-parameters impact regressor performance?</p>
    <form class="controls" data-role="controls">
      <label>layers <select name="layers">${options([1, 2, 3, 4, 5, 6], state.layers)}</select></label>
      <label>dropout <select name="dropout">${options([0, 0.01, 0.05, 0.1, 0.5], state.dropout)}</select></label>
      <label>L2 <select name="l2">${options([0, 0.05, 0.1, 0.15, 0.2], state.l2)}</select></label>
      <label>drop input <select name="drop">${options(["none", "year", "precipitation",
        "tmin", "tmax", "rh", "heat_index", "wet_bulb", "vpd", "svp"],
        state.droppedAttribute)}</select></label>
      <label>sort by <select name="sort">${options(["mae_mean_val", "mae_std_val",
        "rank", "n_parameters"], state.sortBy)}</select></label>
      <button type="button" data-role="sweep">${state.sweepAll
        ? "single config" : "sweep — show all"}</button>
    </form>
    <div data-role="view">${view}</div>
  </section>`;
}
