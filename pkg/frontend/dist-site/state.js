/** URL-hash codecs: any panel view is reproducible from its URL.
 *
 * Hash layout: `#/<panel>?k=v&...`. Unknown keys are ignored; missing keys
 * fall back to defaults, so encode(decode(h)) is canonical.
 */
export const PANEL_ORDER = [
    "rates", "hyper", "distributional", "claims", "neighborhood",
];
export const DEFAULTS = {
    rates: { coveragePct: 0.75, acres: 320, volatility: 0.12 },
    hyper: { layers: 2, dropout: 0, l2: 0, droppedAttribute: "none",
        sweepAll: false, sortBy: "mae_mean_val" },
    distributional: { scenario: "ssp245_2050", year: 2050, coveragePct: 0.75,
        trials: 2000, seed: 7, precision: 4 },
    neighborhood: { scenario: "ssp245_2050", year: 2050,
        overlay: "claims_rate_change", pinned: "" },
    claims: { history: [100, 100, 100, 100, 100, 100, 100, 100, 100, 100],
        yActual: 70, cPct: 0.75, cSigma: 2.11 },
};
function num(params, key, fallback) {
    const raw = params.get(key);
    if (raw === null || raw === "")
        return fallback;
    const value = Number(raw);
    return Number.isFinite(value) ? value : fallback;
}
function str(params, key, fallback) {
    return params.get(key) ?? fallback;
}
function numberList(params, key, fallback) {
    const raw = params.get(key);
    if (!raw)
        return [...fallback];
    const values = raw.split(",").map(Number);
    if (values.some((v) => !Number.isFinite(v)))
        return [...fallback];
    return values;
}
export function encodeState(panel, state) {
    const params = new URLSearchParams();
    switch (panel) {
        case "rates": {
            const s = state;
            params.set("c", String(s.coveragePct));
            params.set("acres", String(s.acres));
            params.set("vol", String(s.volatility));
            break;
        }
        case "hyper": {
            const s = state;
            params.set("layers", String(s.layers));
            params.set("dropout", String(s.dropout));
            params.set("l2", String(s.l2));
            params.set("drop", s.droppedAttribute);
            params.set("all", s.sweepAll ? "1" : "0");
            params.set("sort", s.sortBy);
            break;
        }
        case "distributional": {
            const s = state;
            params.set("scenario", s.scenario);
            params.set("year", String(s.year));
            params.set("c", String(s.coveragePct));
            params.set("trials", String(s.trials));
            params.set("seed", String(s.seed));
            params.set("p", String(s.precision));
            break;
        }
        case "neighborhood": {
            const s = state;
            params.set("scenario", s.scenario);
            params.set("year", String(s.year));
            params.set("overlay", s.overlay);
            if (s.pinned)
                params.set("pin", s.pinned);
            break;
        }
        case "claims": {
            const s = state;
            params.set("h", s.history.join(","));
            params.set("y", String(s.yActual));
            params.set("c", String(s.cPct));
            params.set("cs", String(s.cSigma));
            break;
        }
    }
    return `#/${panel}?${params.toString()}`;
}
export function decodeState(hash) {
    const match = /^#\/([a-z]+)(?:\?(.*))?$/.exec(hash || "");
    const panel = (match && PANEL_ORDER.includes(match[1])
        ? match[1] : PANEL_ORDER[0]);
    const params = new URLSearchParams(match?.[2] ?? "");
    switch (panel) {
        case "rates":
            return { panel, state: {
                    coveragePct: num(params, "c", DEFAULTS.rates.coveragePct),
                    acres: num(params, "acres", DEFAULTS.rates.acres),
                    volatility: num(params, "vol", DEFAULTS.rates.volatility),
                } };
        case "hyper": {
            const sort = str(params, "sort", DEFAULTS.hyper.sortBy);
            const sortBy = (["mae_mean_val", "mae_std_val", "rank", "n_parameters"]
                .includes(sort) ? sort : DEFAULTS.hyper.sortBy);
            return { panel, state: {
                    layers: num(params, "layers", DEFAULTS.hyper.layers),
                    dropout: num(params, "dropout", DEFAULTS.hyper.dropout),
                    l2: num(params, "l2", DEFAULTS.hyper.l2),
                    droppedAttribute: str(params, "drop", DEFAULTS.hyper.droppedAttribute),
                    sweepAll: params.get("all") === "1",
                    sortBy,
                } };
        }
        case "distributional":
            return { panel, state: {
                    scenario: str(params, "scenario", DEFAULTS.distributional.scenario),
                    year: num(params, "year", DEFAULTS.distributional.year),
                    coveragePct: num(params, "c", DEFAULTS.distributional.coveragePct),
                    trials: num(params, "trials", DEFAULTS.distributional.trials),
                    seed: num(params, "seed", DEFAULTS.distributional.seed),
                    precision: num(params, "p", DEFAULTS.distributional.precision),
                } };
        case "neighborhood":
            return { panel, state: {
                    scenario: str(params, "scenario", DEFAULTS.neighborhood.scenario),
                    year: num(params, "year", DEFAULTS.neighborhood.year),
                    overlay: str(params, "overlay", DEFAULTS.neighborhood.overlay),
                    pinned: str(params, "pin", ""),
                } };
        case "claims":
            return { panel, state: {
                    history: numberList(params, "h", DEFAULTS.claims.history),
                    yActual: num(params, "y", DEFAULTS.claims.yActual),
                    cPct: num(params, "c", DEFAULTS.claims.cPct),
                    cSigma: num(params, "cs", DEFAULTS.claims.cSigma),
                } };
    }
}
