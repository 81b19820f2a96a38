// Campaign dashboard: suggestion cards, observation entry, regret chart,
// parameter-space scatter. Pure render functions returning HTML strings so the
// view-model is testable without a DOM; main.ts wires events after insertion.

import { lineChartSvg, scatterSvg } from "./charts.js";
import { escapeHtml, formatNumber, formatQuantity, unitOf } from "./format.js";
import type { CampaignView, Point, SpaceDef, VariableDef } from "./types.js";

export interface ObservationInput {
  size: string;
  feasible: boolean;
}

export interface ValidationResult {
  ok: boolean;
  errors: Record<string, string>;
  size?: number;
}

export function validateObservation(input: ObservationInput): ValidationResult {
  const errors: Record<string, string> = {};
  const size = Number(input.size);
  if (input.size.trim() === "" || Number.isNaN(size)) {
    errors.size = "enter the measured mean size";
  } else if (size < 0) {
    errors.size = "size cannot be negative";
  } else if (!Number.isFinite(size)) {
    errors.size = "size must be finite";
  }
  return { ok: Object.keys(errors).length === 0, errors, size };
}

export function statusBanner(view: CampaignView): string {
  if (view.stopped) {
    const label = view.stopped_reason === "target-reached" ? "target reached" : view.stopped_reason;
    return `<div class="banner banner-done" data-status="target-reached">Campaign stopped: ${escapeHtml(label ?? "stopped")}.</div>`;
  }
  const regret = view.regret === null ? "no feasible observation yet" : `current regret ${formatQuantity("regret", view.regret)}`;
  return `<div class="banner" data-status="running">Iteration ${view.iteration} · ${regret} · stop within ±${(view.tolerance * 100).toFixed(0)}% of ${formatQuantity("target", view.target)}</div>`;
}

export function suggestionCards(view: CampaignView): string {
  const points = view.pending_suggestion.length ? view.pending_suggestion : view.pending_points;
  if (!points.length) {
    return `<p class="hint">No pending points — request a suggestion or initialize the campaign.</p>`;
  }
  const cards = points.map((p, i) => pointCard(p, view.space, `Candidate ${i + 1}`)).join("");
  return `<div class="cards">${cards}</div>`;
}

export function pointCard(point: Point, space: SpaceDef, title: string): string {
  const rows = space.variables
    .map((v) => {
      const value = point[v.name];
      const pretty = typeof value === "number" ? formatQuantity(v.name, value) : escapeHtml(String(value));
      return `<tr><td>${escapeHtml(v.name)}</td><td>${pretty}</td></tr>`;
    })
    .join("");
  return `<div class="card" data-point='${escapeHtml(JSON.stringify(point))}'>
    <h4>${escapeHtml(title)}</h4>
    <table>${rows}</table>
    <button class="observe-btn" data-point='${escapeHtml(JSON.stringify(point))}'>record result…</button>
  </div>`;
}

export function observationForm(point: Point | null): string {
  const target = point ? escapeHtml(JSON.stringify(point)) : "";
  return `<form id="observation-form" data-point='${target}'>
    <label>measured mean size (${unitOf("size")})
      <input name="size" id="obs-size" type="number" step="any" min="0" required>
      <span class="field-error" id="obs-size-error"></span>
    </label>
    <label class="toggle">feasible
      <input name="feasible" id="obs-feasible" type="checkbox" checked>
    </label>
    <button type="submit">save observation</button>
  </form>`;
}

export function regretChart(view: CampaignView): string {
  const points = view.regret_series
    .map((r, i) => ({ iteration: i + 1, mean: r ?? NaN, se: 0 }))
    .filter((p) => Number.isFinite(p.mean));
  if (!points.length) return `<p class="hint">Regret appears after the first feasible observation.</p>`;
  return lineChartSvg([{ label: "best feasible |size − target|", points }], {
    yLabel: "regret (µm)",
    title: "regret by observation",
  });
}

export function parameterScatter(view: CampaignView): string {
  const flow = view.space.variables.find((v) => v.name === "flow_rate") as VariableDef | undefined;
  const conc = view.space.variables.find((v) => v.name === "concentration") as VariableDef | undefined;
  if (!flow?.bounds || !conc?.bounds || view.observations.length === 0) {
    return `<p class="hint">The parameter map fills in as observations arrive.</p>`;
  }
  const points = view.observations.map((o, i) => ({
    x: Number(o.point.flow_rate),
    y: Number(o.point.concentration),
    feasible: o.feasible,
    solvent: String(o.point.solvent),
    order: i,
  }));
  return scatterSvg(points, {
    xDomain: flow.bounds,
    yDomain: conc.bounds,
    xLabel: `flow rate (${unitOf("flow_rate")})`,
    yLabel: `concentration (${unitOf("concentration")})`,
  });
}

export function historyTable(view: CampaignView): string {
  if (!view.observations.length) return "";
  const rows = view.observations
    .map((o, i) => {
      const cells = view.space.variables
        .map((v) => `<td>${typeof o.point[v.name] === "number" ? formatNumber(o.point[v.name] as number) : escapeHtml(String(o.point[v.name]))}</td>`)
        .join("");
      return `<tr><td>${i + 1}</td>${cells}<td>${formatQuantity("size", o.size)}</td><td>${o.feasible ? "✓" : "✗"}</td></tr>`;
    })
    .join("");
  const head = view.space.variables.map((v) => `<th>${escapeHtml(v.name)}${v.unit ? ` (${escapeHtml(v.unit)})` : ""}</th>`).join("");
  return `<table class="history"><thead><tr><th>#</th>${head}<th>size</th><th>ok</th></tr></thead><tbody>${rows}</tbody></table>`;
}

export function renderDashboard(view: CampaignView): string {
  return `<section class="dashboard" data-campaign="${view.id}">
    ${statusBanner(view)}
    <div class="columns">
      <div>
        <h3>Next experiments</h3>
        ${suggestionCards(view)}
        <div class="actions">
          <button id="suggest-btn" ${view.stopped ? "disabled" : ""}>suggest next batch</button>
          <button id="init-btn" ${view.stopped ? "disabled" : ""}>initialize (8 points)</button>
          <a href="#" id="export-link">export CSV</a>
        </div>
        <h3>Record an observation</h3>
        <div id="observation-slot">${observationForm(null)}</div>
      </div>
      <div>
        <h3>Regret</h3>
        ${regretChart(view)}
        <h3>Parameter space</h3>
        ${parameterScatter(view)}
      </div>
    </div>
    <h3>History</h3>
    ${historyTable(view)}
  </section>`;
}
