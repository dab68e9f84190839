// SVG renderer: axes with ticks, one polyline per series, legend.

import { Figure } from "./figure.js";

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
const W = 640;
const H = 440;
const M = { left: 70, right: 20, top: 36, bottom: 48 };

function niceTicks(lo: number, hi: number, n = 6): number[] {
  if (!(hi > lo)) return [lo];
  const span = hi - lo;
  const step = 10 ** Math.floor(Math.log10(span / n));
  const candidates = [step, 2 * step, 5 * step, 10 * step];
  const chosen = candidates.find((s) => span / s <= n) ?? 10 * step;
  const start = Math.ceil(lo / chosen) * chosen;
  const out: number[] = [];
  for (let v = start; v <= hi + 1e-12 * span; v += chosen) out.push(v);
  return out;
}

function logTicks(lo: number, hi: number): number[] {
  const out: number[] = [];
  for (let e = Math.ceil(Math.log10(lo)); e <= Math.floor(Math.log10(hi)); e++) {
    out.push(10 ** e);
  }
  return out.length ? out : [lo];
}

function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(0).replace("+", "");
  return String(Math.round(v * 1e6) / 1e6);
}

export function renderSvg(fig: Figure): string {
  const [x0, x1] = fig.xRange;
  let [y0, y1] = fig.yRange;
  if (y0 === y1) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  const plotW = W - M.left - M.right;
  const plotH = H - M.top - M.bottom;
  const sx = (v: number) => M.left + ((v - x0) / (x1 - x0 || 1)) * plotW;
  const ty = (v: number) => (fig.logY ? Math.log10(v) : v);
  const sy = (v: number) =>
    M.top + plotH - ((ty(v) - ty(y0)) / (ty(y1) - ty(y0) || 1)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${W}" height="${H}" viewBox="0 0 ${W} ${H}">`,
    `<rect width="${W}" height="${H}" fill="white"/>`,
  );
  if (fig.title) {
    parts.push(
      `<text x="${W / 2}" y="20" text-anchor="middle" font-size="14" font-family="sans-serif">${fig.title}</text>`,
    );
  }
  // frame
  parts.push(
    `<rect x="${M.left}" y="${M.top}" width="${plotW}" height="${plotH}" fill="none" stroke="#333"/>`,
  );
  // ticks
  const xt = niceTicks(x0, x1);
  for (const v of xt) {
    const px = sx(v);
    parts.push(
      `<line x1="${px}" y1="${M.top + plotH}" x2="${px}" y2="${M.top + plotH + 4}" stroke="#333"/>`,
      `<text x="${px}" y="${M.top + plotH + 18}" text-anchor="middle" font-size="11" font-family="sans-serif">${fmt(v)}</text>`,
    );
  }
  const yt = fig.logY ? logTicks(y0, y1) : niceTicks(y0, y1);
  for (const v of yt) {
    const py = sy(v);
    parts.push(
      `<line x1="${M.left - 4}" y1="${py}" x2="${M.left}" y2="${py}" stroke="#333"/>`,
      `<text x="${M.left - 8}" y="${py + 4}" text-anchor="end" font-size="11" font-family="sans-serif">${fmt(v)}</text>`,
    );
  }
  parts.push(
    `<text x="${M.left + plotW / 2}" y="${H - 10}" text-anchor="middle" font-size="12" font-family="sans-serif">${fig.xLabel}</text>`,
    `<text x="16" y="${M.top + plotH / 2}" text-anchor="middle" font-size="12" font-family="sans-serif" transform="rotate(-90 16 ${M.top + plotH / 2})">${fig.yLabel}</text>`,
  );
  // series
  fig.series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const pts = s.x.map((xv, k) => `${sx(xv).toFixed(2)},${sy(s.y[k]).toFixed(2)}`).join(" ");
    parts.push(
      `<polyline points="${pts}" fill="none" stroke="${color}" stroke-width="1.8"/>`,
    );
    const ly = M.top + 14 + 16 * i;
    parts.push(
      `<line x1="${W - M.right - 130}" y1="${ly - 4}" x2="${W - M.right - 104}" y2="${ly - 4}" stroke="${color}" stroke-width="2"/>`,
      `<text x="${W - M.right - 98}" y="${ly}" font-size="11" font-family="sans-serif">${s.label}</text>`,
    );
  });
  parts.push("</svg>");
  return parts.join("\n");
}
