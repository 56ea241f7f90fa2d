/** Display formatting; all values shown to users pass through here. */
export function pct(x, digits = 1) {
    return `${(100 * x).toFixed(digits)}%`;
}
export function num(x, digits = 2) {
    return x.toFixed(digits);
}
export function money(x) {
    return `$${x.toFixed(2)}`;
}
export function signedPct(x, digits = 1) {
    const text = pct(Math.abs(x), digits);
    return x < 0 ? `−${text}` : `+${text}`;
}
export function escapeHtml(text) {
    return text.replace(/[&<>"']/g, (ch) => ({
        "&": "&amp;", "<": "&lt;", ">": "&gt;", '"': "&quot;", "'": "&#39;",
    }[ch]));
}
