/** Single-page explorer: five routed panels driven by the service API.
 * Control state lives in the URL hash, so any view is reproducible from its
 * address; in-flight requests are superseded per panel. */

import { ApiClient, isAbort } from "./api.js";
import { DEFAULTS, decodeState, encodeState, PANEL_ORDER, PanelId,
  PanelStates } from "./state.js";
import { claimsHtml } from "./panels/claims.js";
import { distributionalHtml } from "./panels/distributional.js";
import { hyperHtml } from "./panels/hyper.js";
import { NeighborhoodData, neighborhoodHtml } from "./panels/neighborhood.js";
import { ratesHtml, resetRates } from "./panels/rates.js";
import type { ClaimsResponse, RatesResponse, SimulateResponse,
  SweepSurfaceResponse } from "./types.js";

const client = new ApiClient("");
const root = () => document.getElementById("app")!;

const PANEL_TITLES: Record<PanelId, string> = {
  rates: "Rates",
  hyper: "Hyper-Parameters",
  distributional: "Distributional",
  claims: "Claims",
  neighborhood: "Neighborhood",
};

function navHtml(active: PanelId): string {
  return `<nav class="tabs">${PANEL_ORDER.map((p) =>
    `<a href="${encodeState(p, DEFAULTS[p] as never)}" class="${p === active ? "active" : ""}"
        data-panel="${p}">${PANEL_TITLES[p]}</a>`).join("")}</nav>`;
}

function setHash(panel: PanelId, state: PanelStates[PanelId]): void {
  const encoded = encodeState(panel, state as never);
  if (location.hash !== encoded) {
    history.replaceState(null, "", encoded);
  }
}

function showError(container: Element, err: unknown): void {
  if (isAbort(err)) return;  // superseded request: keep the stale view
  const view = container.querySelector('[data-role="view"], [data-role="readout"]');
  if (view) {
    const message = err instanceof Error ? err.message : String(err);
    view.insertAdjacentHTML("afterbegin",
      `<p class="error">request failed — adjust a control to retry
       <code>${message.slice(0, 200)}</code></p>`);
  }
}

/* ------------------------------- rates -------------------------------- */

async function mountRates(state: PanelStates["rates"]): Promise<void> {
  const render = (response: RatesResponse | null) => {
    root().innerHTML = navHtml("rates") + ratesHtml(state, response);
    const form = root().querySelector('[data-role="controls"]')!;
    form.querySelectorAll("input").forEach((input) => {
      input.addEventListener("change", () => {
        state = {
          coveragePct: Number((form.querySelector('[name="coverage"]') as HTMLInputElement).value),
          acres: Number((form.querySelector('[name="acres"]') as HTMLInputElement).value),
          volatility: Number((form.querySelector('[name="volatility"]') as HTMLInputElement).value),
        };
        setHash("rates", state);
        void fetchAndRender();
      });
    });
    form.querySelector('[data-role="reset"]')?.addEventListener("click", () => {
      state = resetRates();
      setHash("rates", state);
      void fetchAndRender();
    });
  };
  const fetchAndRender = async () => {
    try {
      const response = await client.rates("rates", {
        coverage_pct: state.coveragePct, acres: state.acres,
        volatility: state.volatility,
      });
      render(response);
    } catch (err) {
      showError(root(), err);
    }
  };
  render(null);
  await fetchAndRender();
}

/* ------------------------------- hyper -------------------------------- */

async function mountHyper(state: PanelStates["hyper"]): Promise<void> {
  let leaderboard: SweepSurfaceResponse | null = null;
  const render = () => {
    root().innerHTML = navHtml("hyper") + hyperHtml(state, leaderboard);
    const form = root().querySelector('[data-role="controls"]')!;
    form.querySelectorAll("select").forEach((select) => {
      select.addEventListener("change", () => {
        state = {
          ...state,
          layers: Number((form.querySelector('[name="layers"]') as HTMLSelectElement).value),
          dropout: Number((form.querySelector('[name="dropout"]') as HTMLSelectElement).value),
          l2: Number((form.querySelector('[name="l2"]') as HTMLSelectElement).value),
          droppedAttribute: (form.querySelector('[name="drop"]') as HTMLSelectElement).value,
          sortBy: (form.querySelector('[name="sort"]') as HTMLSelectElement)
            .value as PanelStates["hyper"]["sortBy"],
        };
        setHash("hyper", state);
        render();
      });
    });
    form.querySelector('[data-role="sweep"]')?.addEventListener("click", () => {
      state = { ...state, sweepAll: !state.sweepAll };
      setHash("hyper", state);
      render();
    });
  };
  render();
  try {
    leaderboard = await client.sweepSurface("hyper", {});
    render();
  } catch (err) {
    showError(root(), err);
  }
}

/* --------------------------- distributional --------------------------- */

async function mountDistributional(state: PanelStates["distributional"]): Promise<void> {
  let response: SimulateResponse | null = null;
  const render = () => {
    root().innerHTML = navHtml("distributional") + distributionalHtml(state, response);
    const form = root().querySelector('[data-role="controls"]')!;
    const coverage = form.querySelector('[name="coverage"]') as HTMLInputElement;
    // slider re-shades from cached bins; no refetch
    coverage.addEventListener("input", () => {
      state = { ...state, coveragePct: Number(coverage.value) };
      setHash("distributional", state);
      render();
    });
    for (const name of ["scenario", "year", "precision", "trials", "seed"]) {
      form.querySelector(`[name="${name}"]`)?.addEventListener("change", () => {
        state = {
          ...state,
          scenario: (form.querySelector('[name="scenario"]') as HTMLSelectElement).value,
          year: Number((form.querySelector('[name="year"]') as HTMLInputElement).value),
          precision: Number((form.querySelector('[name="precision"]') as HTMLSelectElement).value),
          trials: Number((form.querySelector('[name="trials"]') as HTMLInputElement).value),
          seed: Number((form.querySelector('[name="seed"]') as HTMLInputElement).value),
        };
        setHash("distributional", state);
        void fetchAndRender();
      });
    }
  };
  const fetchAndRender = async () => {
    try {
      response = await client.simulate("distributional", {
        scenario: state.scenario, trials: state.trials, seed: state.seed,
        coverage_pct: state.coveragePct, year: state.year,
        precision: state.precision,
      });
      render();
    } catch (err) {
      showError(root(), err);
    }
  };
  render();
  await fetchAndRender();
}

/* ----------------------------- neighborhood --------------------------- */

async function mountNeighborhood(state: PanelStates["neighborhood"]): Promise<void> {
  let data: NeighborhoodData | null = null;
  const render = () => {
    root().innerHTML = navHtml("neighborhood") + neighborhoodHtml(state, data);
    const form = root().querySelector('[data-role="controls"]')!;
    form.querySelectorAll("select,input").forEach((control) => {
      control.addEventListener("change", () => {
        state = {
          ...state,
          scenario: (form.querySelector('[name="scenario"]') as HTMLSelectElement).value,
          year: Number((form.querySelector('[name="year"]') as HTMLInputElement).value),
          overlay: (form.querySelector('[name="overlay"]') as HTMLSelectElement).value,
        };
        setHash("neighborhood", state);
        void mountNeighborhood(state);
      });
    });
    root().querySelectorAll(".dot").forEach((dot) => {
      dot.addEventListener("click", () => {
        state = { ...state, pinned: (dot as SVGElement).dataset.id ?? "" };
        setHash("neighborhood", state);
        render();
      });
    });
  };
  render();
  try {
    const response = await client.neighborhoods(
      "neighborhood", state.scenario, state.year, true);
    data = { treatment: response.rows,
             counterfactual: response.counterfactual_rows ?? [] };
    render();
  } catch (err) {
    showError(root(), err);
  }
}

/* -------------------------------- claims ------------------------------ */

async function mountClaims(state: PanelStates["claims"]): Promise<void> {
  let response: ClaimsResponse | null = null;
  const render = () => {
    root().innerHTML = navHtml("claims") + claimsHtml(state, response);
    const form = root().querySelector('[data-role="controls"]')!;
    form.querySelectorAll("input").forEach((input) => {
      input.addEventListener("change", () => {
        const historyRaw = (form.querySelector('[name="history"]') as HTMLInputElement).value;
        const history = historyRaw.split(",").map((v) => Number(v.trim()))
          .filter((v) => Number.isFinite(v) && v >= 0);
        if (history.length === 0) {
          (form.querySelector('[name="history"]') as HTMLInputElement)
            .setCustomValidity("enter at least one nonnegative yield");
          (form.querySelector('[name="history"]') as HTMLInputElement).reportValidity();
          return;
        }
        state = {
          history,
          yActual: Number((form.querySelector('[name="yActual"]') as HTMLInputElement).value),
          cPct: Number((form.querySelector('[name="cPct"]') as HTMLInputElement).value),
          cSigma: Number((form.querySelector('[name="cSigma"]') as HTMLInputElement).value),
        };
        setHash("claims", state);
        void fetchAndRender();
      });
    });
  };
  const fetchAndRender = async () => {
    try {
      response = await client.claims("claims", {
        history: state.history, y_actual: state.yActual,
        c_pct: state.cPct, c_sigma: state.cSigma,
      });
      render();
    } catch (err) {
      showError(root(), err);
    }
  };
  render();
  await fetchAndRender();
}

/* -------------------------------- router ------------------------------ */

const MOUNTS: Record<PanelId, (state: never) => Promise<void>> = {
  rates: mountRates,
  hyper: mountHyper,
  distributional: mountDistributional,
  neighborhood: mountNeighborhood,
  claims: mountClaims,
};

function route(): void {
  const { panel, state } = decodeState(location.hash);
  void MOUNTS[panel](state as never);
}

window.addEventListener("hashchange", route);
window.addEventListener("DOMContentLoaded", () => {
  if (!location.hash) {
    history.replaceState(null, "", encodeState("rates", DEFAULTS.rates));
  }
  route();
});
