/** Single-page explorer: five routed panels driven by the service API.
 * Control state lives in the URL hash, so any view is reproducible from its
 * address; in-flight requests are superseded per panel. */
import { ApiClient, isAbort } from "./api.js";
import { DEFAULTS, decodeState, encodeState, PANEL_ORDER } from "./state.js";
import { claimsHtml } from "./panels/claims.js";
import { distributionalHtml } from "./panels/distributional.js";
import { hyperHtml } from "./panels/hyper.js";
import { neighborhoodHtml } from "./panels/neighborhood.js";
import { ratesHtml, resetRates } from "./panels/rates.js";
const client = new ApiClient("");
const root = () => document.getElementById("app");
const PANEL_TITLES = {
    rates: "Rates",
    hyper: "Hyper-Parameters",
    distributional: "Distributional",
    claims: "Claims",
    neighborhood: "Neighborhood",
};
function navHtml(active) {
    return `<nav class="tabs">${PANEL_ORDER.map((p) => `<a href="${encodeState(p, DEFAULTS[p])}" class="${p === active ? "active" : ""}"
        data-panel="${p}">${PANEL_TITLES[p]}</a>`).join("")}</nav>`;
}
function setHash(panel, state) {
    const encoded = encodeState(panel, state);
    if (location.hash !== encoded) {
        history.replaceState(null, "", encoded);
    }
}
function showError(container, err) {
    if (isAbort(err))
        return; // superseded request: keep the stale view
    const view = container.querySelector('[data-role="view"], [data-role="readout"]');
    if (view) {
        const message = err instanceof Error ? err.message : String(err);
        view.insertAdjacentHTML("afterbegin", `<p class="error">request failed — adjust a control to retry
       <code>${message.slice(0, 200)}</code></p>`);
    }
}
/* ------------------------------- rates -------------------------------- */
async function mountRates(state) {
    const render = (response) => {
        root().innerHTML = navHtml("rates") + ratesHtml(state, response);
        const form = root().querySelector('[data-role="controls"]');
        form.querySelectorAll("input").forEach((input) => {
            input.addEventListener("change", () => {
                state = {
                    coveragePct: Number(form.querySelector('[name="coverage"]').value),
                    acres: Number(form.querySelector('[name="acres"]').value),
                    volatility: Number(form.querySelector('[name="volatility"]').value),
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
        }
        catch (err) {
            showError(root(), err);
        }
    };
    render(null);
    await fetchAndRender();
}
/* ------------------------------- hyper -------------------------------- */
async function mountHyper(state) {
    let leaderboard = null;
    const render = () => {
        root().innerHTML = navHtml("hyper") + hyperHtml(state, leaderboard);
        const form = root().querySelector('[data-role="controls"]');
        form.querySelectorAll("select").forEach((select) => {
            select.addEventListener("change", () => {
                state = {
                    ...state,
                    layers: Number(form.querySelector('[name="layers"]').value),
                    dropout: Number(form.querySelector('[name="dropout"]').value),
                    l2: Number(form.querySelector('[name="l2"]').value),
                    droppedAttribute: form.querySelector('[name="drop"]').value,
                    sortBy: form.querySelector('[name="sort"]')
                        .value,
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
    }
    catch (err) {
        showError(root(), err);
    }
}
/* --------------------------- distributional --------------------------- */
async function mountDistributional(state) {
    let response = null;
    const render = () => {
        root().innerHTML = navHtml("distributional") + distributionalHtml(state, response);
        const form = root().querySelector('[data-role="controls"]');
        const coverage = form.querySelector('[name="coverage"]');
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
                    scenario: form.querySelector('[name="scenario"]').value,
                    year: Number(form.querySelector('[name="year"]').value),
                    precision: Number(form.querySelector('[name="precision"]').value),
                    trials: Number(form.querySelector('[name="trials"]').value),
                    seed: Number(form.querySelector('[name="seed"]').value),
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
        }
        catch (err) {
            showError(root(), err);
        }
    };
    render();
    await fetchAndRender();
}
/* ----------------------------- neighborhood --------------------------- */
async function mountNeighborhood(state) {
    let data = null;
    const render = () => {
        root().innerHTML = navHtml("neighborhood") + neighborhoodHtml(state, data);
        const form = root().querySelector('[data-role="controls"]');
        form.querySelectorAll("select,input").forEach((control) => {
            control.addEventListener("change", () => {
                state = {
                    ...state,
                    scenario: form.querySelector('[name="scenario"]').value,
                    year: Number(form.querySelector('[name="year"]').value),
                    overlay: form.querySelector('[name="overlay"]').value,
                };
                setHash("neighborhood", state);
                void mountNeighborhood(state);
            });
        });
        root().querySelectorAll(".dot").forEach((dot) => {
            dot.addEventListener("click", () => {
                state = { ...state, pinned: dot.dataset.id ?? "" };
                setHash("neighborhood", state);
                render();
            });
        });
    };
    render();
    try {
        const response = await client.neighborhoods("neighborhood", state.scenario, state.year, true);
        data = { treatment: response.rows,
            counterfactual: response.counterfactual_rows ?? [] };
        render();
    }
    catch (err) {
        showError(root(), err);
    }
}
/* -------------------------------- claims ------------------------------ */
async function mountClaims(state) {
    let response = null;
    const render = () => {
        root().innerHTML = navHtml("claims") + claimsHtml(state, response);
        const form = root().querySelector('[data-role="controls"]');
        form.querySelectorAll("input").forEach((input) => {
            input.addEventListener("change", () => {
                const historyRaw = form.querySelector('[name="history"]').value;
                const history = historyRaw.split(",").map((v) => Number(v.trim()))
                    .filter((v) => Number.isFinite(v) && v >= 0);
                if (history.length === 0) {
                    form.querySelector('[name="history"]')
                        .setCustomValidity("enter at least one nonnegative yield");
                    form.querySelector('[name="history"]').reportValidity();
                    return;
                }
                state = {
                    history,
                    yActual: Number(form.querySelector('[name="yActual"]').value),
                    cPct: Number(form.querySelector('[name="cPct"]').value),
                    cSigma: Number(form.querySelector('[name="cSigma"]').value),
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
        }
        catch (err) {
            showError(root(), err);
        }
    };
    render();
    await fetchAndRender();
}
/* -------------------------------- router ------------------------------ */
const MOUNTS = {
    rates: mountRates,
    hyper: mountHyper,
    distributional: mountDistributional,
    neighborhood: mountNeighborhood,
    claims: mountClaims,
};
function route() {
    const { panel, state } = decodeState(location.hash);
    void MOUNTS[panel](state);
}
window.addEventListener("hashchange", route);
window.addEventListener("DOMContentLoaded", () => {
    if (!location.hash) {
        history.replaceState(null, "", encodeState("rates", DEFAULTS.rates));
    }
    route();
});
