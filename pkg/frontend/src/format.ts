/** Display formatting; all values shown to users pass through here. */

export function pct(x: number, digits = 1): string {
  return `${(100 * x).toFixed(digits)}%`;
}

export function num(x: number, digits = 2): string {
  return x.toFixed(digits);
}

export function money(x: number): string {
  return `$${x.toFixed(2)}`;
}

export function signedPct(x: number, digits = 1): string {
  const text = pct(Math.abs(x), digits);
  return x < 0 ? `−${text}` : `+${text}`;
}

export function escapeHtml(text: string): string {
  return text.replace(/[&<>"']/g, (ch) => ({
    "&": "&amp;", "<": "&lt;", ">": "&gt;", '"': "&quot;", "'": "&#39;",
  }[ch] as string));
}
