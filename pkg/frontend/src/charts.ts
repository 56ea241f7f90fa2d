/** Pure SVG/HTML builders. Charts are assembled from raw bin/point data so
 * tests compare data and markup, not pixels. */

import { escapeHtml, pct } from "./format.js";
import type { HistogramData, LeaderboardRow } from "./types.js";

export interface Scale {
  (value: number): number;
}

export function linearScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const span = d1 - d0 || 1;
  return (value: number) => r0 + ((value - d0) / span) * (r1 - r0);
}

export interface HistogramSeries {
  label: string;
  color: string;
  data: HistogramData;
}

export interface HistogramOptions {
  width?: number;
  height?: number;
  shadeBelow?: number | null;  // claim region boundary on the delta axis
}

/** Fraction of trials strictly below a bin-aligned threshold. */
export function claimShareFromBins(data: HistogramData, threshold: number): number {
  if (data.total === 0) return 0;
  let below = 0;
  for (let i = 0; i < data.counts.length; i += 1) {
    const lo = data.edges[i]!;
    const hi = data.edges[i + 1]!;
    if (hi <= threshold) {
      below += data.counts[i]!;
    } else if (lo < threshold) {
      // partial bin: threshold between edges (only when not bin-aligned)
      below += data.counts[i]! * ((threshold - lo) / (hi - lo));
    }
  }
  return below / data.total;
}

export function histogramSvg(series: HistogramSeries[], options: HistogramOptions = {}): string {
  const width = options.width ?? 640;
  const height = options.height ?? 260;
  const pad = { left: 42, right: 12, top: 10, bottom: 26 };
  if (series.length === 0) return `<svg class="hist" width="${width}" height="${height}"></svg>`;
  const lo = Math.min(...series.map((s) => s.data.edges[0] ?? -1));
  const hi = Math.max(...series.map((s) => s.data.edges[s.data.edges.length - 1] ?? 1));
  const peak = Math.max(1e-12,
    ...series.map((s) => Math.max(...s.data.counts.map((c) => c / Math.max(s.data.total, 1)))));
  const x = linearScale(lo, hi, pad.left, width - pad.right);
  const y = linearScale(0, peak, height - pad.bottom, pad.top);

  const parts: string[] = [];
  parts.push(`<svg class="hist" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`);
  if (options.shadeBelow !== null && options.shadeBelow !== undefined) {
    const bound = Math.max(lo, Math.min(hi, options.shadeBelow));
    parts.push(`<rect class="claim-region" x="${x(lo).toFixed(1)}" y="${pad.top}" ` +
      `width="${(x(bound) - x(lo)).toFixed(1)}" height="${height - pad.top - pad.bottom}" ` +
      `data-boundary="${options.shadeBelow}"></rect>`);
  }
  for (const s of series) {
    const steps: string[] = [];
    const total = Math.max(s.data.total, 1);
    steps.push(`M ${x(s.data.edges[0]!).toFixed(1)} ${y(0).toFixed(1)}`);
    for (let i = 0; i < s.data.counts.length; i += 1) {
      const top = y(s.data.counts[i]! / total).toFixed(1);
      steps.push(`L ${x(s.data.edges[i]!).toFixed(1)} ${top}`);
      steps.push(`L ${x(s.data.edges[i + 1]!).toFixed(1)} ${top}`);
    }
    steps.push(`L ${x(s.data.edges[s.data.edges.length - 1]!).toFixed(1)} ${y(0).toFixed(1)}`);
    parts.push(`<path class="series" data-label="${escapeHtml(s.label)}" ` +
      `d="${steps.join(" ")}" fill="none" stroke="${s.color}" stroke-width="2"></path>`);
  }
  const zeroX = x(0).toFixed(1);
  parts.push(`<line x1="${zeroX}" x2="${zeroX}" y1="${pad.top}" ` +
    `y2="${height - pad.bottom}" class="axis-zero"></line>`);
  for (const tick of [-1, -0.5, 0, 0.5, 1]) {
    if (tick < lo || tick > hi) continue;
    parts.push(`<text class="tick" x="${x(tick).toFixed(1)}" y="${height - 8}" ` +
      `text-anchor="middle">${tick}</text>`);
  }
  parts.push("</svg>");
  return parts.join("");
}

export interface ScatterPoint {
  id: string;
  lat: number;
  lon: number;
  acres: number;
  value: number;
  label: string;
}

export interface ScatterOptions {
  width?: number;
  height?: number;
  pinned?: string;
}

/** Map-like scatter: dot area tracks acreage, color tracks the overlay
 * value (blue low, red high). Zero-acreage dots are omitted. */
export function scatterSvg(points: ScatterPoint[], options: ScatterOptions = {}): string {
  const width = options.width ?? 640;
  const height = options.height ?? 420;
  const visible = points.filter((p) => p.acres > 0);
  if (visible.length === 0) {
    return `<svg class="geo" width="${width}" height="${height}">` +
      `<text class="empty-state" x="${width / 2}" y="${height / 2}" ` +
      `text-anchor="middle">no neighborhoods to display</text></svg>`;
  }
  const lats = visible.map((p) => p.lat);
  const lons = visible.map((p) => p.lon);
  const values = visible.map((p) => p.value);
  const acres = visible.map((p) => p.acres);
  const x = linearScale(Math.min(...lons) - 0.2, Math.max(...lons) + 0.2, 24, width - 24);
  const y = linearScale(Math.min(...lats) - 0.2, Math.max(...lats) + 0.2, height - 24, 24);
  const vLo = Math.min(...values);
  const vHi = Math.max(...values);
  const aHi = Math.max(...acres);
  const parts = [`<svg class="geo" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`];
  for (const p of visible) {
    const t = vHi > vLo ? (p.value - vLo) / (vHi - vLo) : 0.5;
    const hue = 220 - 220 * t; // blue -> red
    const r = 4 + 14 * Math.sqrt(p.acres / aHi);
    const pinned = options.pinned === p.id ? " pinned" : "";
    parts.push(`<circle class="dot${pinned}" data-id="${escapeHtml(p.id)}" ` +
      `cx="${x(p.lon).toFixed(1)}" cy="${y(p.lat).toFixed(1)}" r="${r.toFixed(1)}" ` +
      `fill="hsl(${hue.toFixed(0)} 70% 50% / 0.75)" data-value="${p.value}">` +
      `<title>${escapeHtml(p.label)}</title></circle>`);
  }
  parts.push("</svg>");
  return parts.join("");
}

export function leaderboardTable(rows: LeaderboardRow[], highlightRank = 1): string {
  const header = "<tr><th>rank</th><th>layers</th><th>dropout</th><th>L2</th>" +
    "<th>dropped</th><th>val MAE (mean)</th><th>val MAE (std)</th><th>params</th></tr>";
  const body = rows.map((r) => {
    const cls = r.rank === highlightRank ? ' class="winner"' : "";
    return `<tr${cls} data-rank="${r.rank}"><td>${r.rank}</td>` +
      `<td>${r.layers.join("×")}</td><td>${r.dropout}</td><td>${r.l2}</td>` +
      `<td>${escapeHtml(r.dropped_attribute ?? "none")}</td>` +
      `<td>${pct(r.mae_mean_val, 2)}</td><td>${pct(r.mae_std_val, 2)}</td>` +
      `<td>${r.n_parameters}</td></tr>`;
  }).join("");
  return `<table class="leaderboard">${header}${body}</table>`;
}
