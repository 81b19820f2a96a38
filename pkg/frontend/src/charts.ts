// Dependency-free SVG charts rendered as HTML strings.

import type { BandPoint } from "./stats.js";

export interface Scale {
  (value: number): number;
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  return (v) => r0 + ((clamp(v, d0, d1) - d0) / span) * (r1 - r0);
}

export function log10Scale(domain: [number, number], range: [number, number]): Scale {
  const lo = Math.log10(domain[0]);
  const hi = Math.log10(domain[1]);
  const inner = linearScale([lo, hi], range);
  return (v) => inner(Math.log10(Math.max(v, Number.MIN_VALUE)));
}

export function clamp(v: number, lo: number, hi: number): number {
  return Math.min(Math.max(v, lo), hi);
}

export function polylinePath(xs: number[], ys: number[]): string {
  return xs.map((x, i) => `${i === 0 ? "M" : "L"}${x.toFixed(2)},${ys[i].toFixed(2)}`).join(" ");
}

const W = 560;
const H = 260;
const PAD = 42;
const COLORS = ["#4063d8", "#cb3c33", "#389826", "#9558b2", "#aa7f2c", "#17a2b8"];

export function seriesColor(index: number): string {
  return COLORS[index % COLORS.length];
}

export interface LineSeries {
  label: string;
  points: BandPoint[];
}

export function lineChartSvg(series: LineSeries[], opts: { yLabel: string; title?: string } = { yLabel: "" }): string {
  series = series.filter((s) => s.points.length > 0);
  const allPoints = series.flatMap((s) => s.points);
  if (allPoints.length === 0) return `<svg class="chart" viewBox="0 0 ${W} ${H}"></svg>`;
  const xMax = Math.max(...allPoints.map((p) => p.iteration));
  const yMax = Math.max(...allPoints.map((p) => p.mean + p.se), 1e-9);
  const sx = linearScale([0, Math.max(xMax, 1)], [PAD, W - 12]);
  const sy = linearScale([0, yMax * 1.05], [H - PAD, 14]);
  const parts: string[] = [];
  parts.push(`<svg class="chart" viewBox="0 0 ${W} ${H}" role="img">`);
  if (opts.title) parts.push(`<text x="${W / 2}" y="12" class="chart-title" text-anchor="middle">${opts.title}</text>`);
  parts.push(`<line x1="${PAD}" y1="${H - PAD}" x2="${W - 12}" y2="${H - PAD}" class="axis"/>`);
  parts.push(`<line x1="${PAD}" y1="${H - PAD}" x2="${PAD}" y2="14" class="axis"/>`);
  for (let t = 0; t <= xMax; t++) {
    parts.push(`<text x="${sx(t)}" y="${H - PAD + 16}" class="tick" text-anchor="middle">${t}</text>`);
  }
  for (const frac of [0, 0.5, 1]) {
    const v = yMax * frac;
    parts.push(`<text x="${PAD - 6}" y="${sy(v) + 4}" class="tick" text-anchor="end">${v.toPrecision(3)}</text>`);
  }
  parts.push(`<text x="${W / 2}" y="${H - 6}" class="tick" text-anchor="middle">iteration</text>`);
  parts.push(`<text x="12" y="${H / 2}" class="tick" transform="rotate(-90 12 ${H / 2})" text-anchor="middle">${opts.yLabel}</text>`);
  series.forEach((s, i) => {
    const color = seriesColor(i);
    const xs = s.points.map((p) => sx(p.iteration));
    const upper = s.points.map((p) => sy(p.mean + p.se));
    const lower = s.points.map((p) => sy(Math.max(p.mean - p.se, 0)));
    const band =
      `M${xs[0].toFixed(2)},${upper[0].toFixed(2)} ` +
      xs.slice(1).map((x, k) => `L${x.toFixed(2)},${upper[k + 1].toFixed(2)}`).join(" ") +
      " " +
      [...xs].reverse().map((x, k) => `L${x.toFixed(2)},${lower[lower.length - 1 - k].toFixed(2)}`).join(" ") +
      " Z";
    parts.push(`<path d="${band}" fill="${color}" opacity="0.15"/>`);
    parts.push(`<path d="${polylinePath(xs, s.points.map((p) => sy(p.mean)))}" fill="none" stroke="${color}" stroke-width="2"/>`);
    parts.push(`<circle cx="${W - 140}" cy="${20 + i * 16}" r="4" fill="${color}"/>`);
    parts.push(`<text x="${W - 130}" y="${24 + i * 16}" class="tick">${s.label}</text>`);
  });
  parts.push("</svg>");
  return parts.join("");
}

export interface ScatterPoint {
  x: number; // physical flow rate, drawn on a log axis
  y: number;
  feasible: boolean;
  solvent: string;
  order: number; // iteration/observation index, encoded as color depth
}

export function scatterSvg(
  points: ScatterPoint[],
  opts: { xDomain: [number, number]; yDomain: [number, number]; xLabel: string; yLabel: string },
): string {
  const sx = log10Scale(opts.xDomain, [PAD, W - 12]);
  const sy = linearScale(opts.yDomain, [H - PAD, 14]);
  const maxOrder = Math.max(...points.map((p) => p.order), 1);
  const parts: string[] = [];
  parts.push(`<svg class="chart" viewBox="0 0 ${W} ${H}" role="img">`);
  parts.push(`<line x1="${PAD}" y1="${H - PAD}" x2="${W - 12}" y2="${H - PAD}" class="axis"/>`);
  parts.push(`<line x1="${PAD}" y1="${H - PAD}" x2="${PAD}" y2="14" class="axis"/>`);
  for (const decade of decadesWithin(opts.xDomain)) {
    parts.push(`<text x="${sx(decade)}" y="${H - PAD + 16}" class="tick" text-anchor="middle">${decade}</text>`);
  }
  parts.push(`<text x="${W / 2}" y="${H - 6}" class="tick" text-anchor="middle">${opts.xLabel} (log)</text>`);
  parts.push(`<text x="12" y="${H / 2}" class="tick" transform="rotate(-90 12 ${H / 2})" text-anchor="middle">${opts.yLabel}</text>`);
  for (const p of points) {
    const shade = 25 + Math.round((p.order / maxOrder) * 60);
    const color = p.solvent === "CHCl3" ? `hsl(220 70% ${shade}%)` : `hsl(140 60% ${shade}%)`;
    const cx = sx(p.x).toFixed(2);
    const cy = sy(p.y).toFixed(2);
    if (p.feasible) {
      parts.push(`<circle cx="${cx}" cy="${cy}" r="5" fill="${color}"><title>${p.solvent}</title></circle>`);
    } else {
      parts.push(
        `<g stroke="${color}" stroke-width="2"><line x1="${+cx - 4}" y1="${+cy - 4}" x2="${+cx + 4}" y2="${+cy + 4}"/>` +
          `<line x1="${+cx - 4}" y1="${+cy + 4}" x2="${+cx + 4}" y2="${+cy - 4}"/></g>`,
      );
    }
  }
  parts.push("</svg>");
  return parts.join("");
}

export function decadesWithin([lo, hi]: [number, number]): number[] {
  const out: number[] = [];
  for (let e = Math.ceil(Math.log10(lo)); Math.pow(10, e) <= hi * 1.0001; e++) {
    out.push(Number(Math.pow(10, e).toPrecision(12)));
  }
  return out;
}
