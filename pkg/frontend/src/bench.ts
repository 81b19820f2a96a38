// Benchmark report viewer: regret curves with standard-error bands and an AUC
// summary, both derived from the exported CSV files.

import { lineChartSvg, linearScale, seriesColor } from "./charts.js";
import { escapeHtml, formatNumber } from "./format.js";
import { parseAucSummary, parseRegretCurves, SchemaError, type AucRow, type RegretRow } from "./csv.js";
import { regretBands, strategiesIn, targetsIn } from "./stats.js";

export function renderRegretFigure(rows: RegretRow[], target: number): string {
  const series = strategiesIn(rows, target).map((strategy) => ({
    label: strategy,
    points: regretBands(rows, target, strategy),
  }));
  return lineChartSvg(series, {
    yLabel: "regret (µm)",
    title: `target ${target} µm · mean ± standard error`,
  });
}

export function renderAucStrip(rows: AucRow[], target: number): string {
  const subset = rows.filter((r) => r.target === target);
  if (!subset.length) return "";
  const W = 560;
  const H = 90 + subset.length * 4;
  const max = Math.max(...subset.map((r) => r.auc_mean + r.auc_sd));
  const sx = linearScale([0, max * 1.1], [120, W - 20]);
  const parts = [`<svg class="chart" viewBox="0 0 ${W} ${H}">`];
  subset.forEach((r, i) => {
    const y = 24 + i * 22;
    const color = seriesColor(i);
    parts.push(`<text x="110" y="${y + 4}" class="tick" text-anchor="end">${escapeHtml(r.strategy)}</text>`);
    parts.push(
      `<line x1="${sx(Math.max(r.auc_mean - r.auc_sd, 0))}" y1="${y}" x2="${sx(r.auc_mean + r.auc_sd)}" y2="${y}" stroke="${color}" stroke-width="2"/>`,
    );
    parts.push(`<circle cx="${sx(r.auc_mean)}" cy="${y}" r="5" fill="${color}"/>`);
    parts.push(
      `<text x="${sx(r.auc_mean + r.auc_sd) + 8}" y="${y + 4}" class="tick">${formatNumber(r.auc_mean, 2)} ± ${formatNumber(r.auc_sd, 2)} (n=${r.n})</text>`,
    );
  });
  parts.push(`<text x="${W / 2}" y="${H - 6}" class="tick" text-anchor="middle">area under the regret curve</text>`);
  parts.push("</svg>");
  return parts.join("");
}

export function renderBenchmarkViewer(curvesCsv: string, aucCsv: string): string {
  let rows: RegretRow[];
  let auc: AucRow[];
  try {
    rows = parseRegretCurves(curvesCsv);
    auc = parseAucSummary(aucCsv);
  } catch (err) {
    if (err instanceof SchemaError) {
      return `<div class="banner banner-error" data-error="schema">${escapeHtml(err.message)}</div>`;
    }
    throw err;
  }
  const sections = targetsIn(rows)
    .map(
      (target) => `<div class="bench-target">
        ${renderRegretFigure(rows, target)}
        ${renderAucStrip(auc, target)}
      </div>`,
    )
    .join("");
  return `<section class="bench">${sections}</section>`;
}
