/** Typed API client with per-panel cancel-on-supersede.
 *
 * Each panel passes its own key; firing a new request under the same key
 * aborts the in-flight one, so rapid slider movement never interleaves
 * stale renders.
 */
export class ApiError extends Error {
    status;
    constructor(status, message) {
        super(message);
        this.status = status;
    }
}
export class ApiClient {
    baseUrl;
    fetcher;
    inflight = new Map();
    constructor(baseUrl = "", fetcher = fetch) {
        this.baseUrl = baseUrl;
        this.fetcher = fetcher;
    }
    async request(key, path, init) {
        this.inflight.get(key)?.abort();
        const controller = new AbortController();
        this.inflight.set(key, controller);
        try {
            const response = await this.fetcher(this.baseUrl + path, {
                ...init,
                signal: controller.signal,
                headers: { "content-type": "application/json", ...(init?.headers ?? {}) },
            });
            if (!response.ok) {
                const text = await response.text();
                throw new ApiError(response.status, text || response.statusText);
            }
            return (await response.json());
        }
        finally {
            if (this.inflight.get(key) === controller) {
                this.inflight.delete(key);
            }
        }
    }
    meta() {
        return this.request("meta", "/api/meta");
    }
    neighborhoods(key, scenario, year, withCounterfactual = false) {
        const query = new URLSearchParams({ scenario });
        if (year !== undefined)
            query.set("year", String(year));
        if (withCounterfactual)
            query.set("with_counterfactual", "true");
        return this.request(key, `/api/neighborhoods?${query}`);
    }
    histogram(key, scenario, year) {
        const query = new URLSearchParams({ scenario, year: String(year) });
        return this.request(key, `/api/histogram?${query}`);
    }
    simulate(key, body) {
        return this.request(key, "/api/simulate", {
            method: "POST", body: JSON.stringify(body),
        });
    }
    claims(key, body) {
        return this.request(key, "/api/claims", {
            method: "POST", body: JSON.stringify(body),
        });
    }
    sweepSurface(key, body) {
        return this.request(key, "/api/sweep-surface", {
            method: "POST", body: JSON.stringify(body),
        });
    }
    rates(key, body) {
        return this.request(key, "/api/rates", {
            method: "POST", body: JSON.stringify(body),
        });
    }
}
export function isAbort(err) {
    return err instanceof DOMException && err.name === "AbortError";
}
