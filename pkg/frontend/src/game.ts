// Human-vs-optimizer game: compose two candidate experiments per round inside
// the declared bounds, submit, and compare regret curves with the hidden
// optimizer run. The oracle constants never reach this layer.

import { clamp, lineChartSvg } from "./charts.js";
import { escapeHtml, formatNumber, formatQuantity } from "./format.js";
import type { GameView, Point, SpaceDef, VariableDef } from "./types.js";

export function clampToBounds(space: SpaceDef, point: Point): Point {
  const out: Point = {};
  for (const v of space.variables) {
    const value = point[v.name];
    if (v.kind === "categorical" || v.categories) {
      const cats = v.categories ?? [];
      out[v.name] = cats.includes(String(value)) ? String(value) : cats[0];
    } else if (v.bounds) {
      out[v.name] = clamp(Number(value), v.bounds[0], v.bounds[1]);
    } else {
      out[v.name] = Number(value);
    }
  }
  return out;
}

export function sliderPosition(v: VariableDef, value: number): number {
  if (!v.bounds) return 0;
  const [lo, hi] = v.bounds;
  if (v.transform === "log") {
    return (Math.log10(value) - Math.log10(lo)) / (Math.log10(hi) - Math.log10(lo));
  }
  return (value - lo) / (hi - lo);
}

export function sliderValue(v: VariableDef, position: number): number {
  if (!v.bounds) return 0;
  const t = clamp(position, 0, 1);
  const [lo, hi] = v.bounds;
  if (v.transform === "log") {
    return Math.pow(10, Math.log10(lo) + t * (Math.log10(hi) - Math.log10(lo)));
  }
  return lo + t * (hi - lo);
}

function variableInput(v: VariableDef, slot: number): string {
  if (v.kind === "categorical" || v.categories) {
    const options = (v.categories ?? [])
      .map((c) => `<option value="${escapeHtml(c)}">${escapeHtml(c)}</option>`)
      .join("");
    return `<label>${escapeHtml(v.name)}
      <select data-slot="${slot}" data-variable="${escapeHtml(v.name)}">${options}</select></label>`;
  }
  const [lo, hi] = v.bounds ?? [0, 1];
  const scale = v.transform === "log" ? "log" : "linear";
  return `<label>${escapeHtml(v.name)}${v.unit ? ` (${escapeHtml(v.unit)})` : ""}
    <input type="range" min="0" max="1000" value="500" data-scale="${scale}"
           data-slot="${slot}" data-variable="${escapeHtml(v.name)}"
           data-lo="${lo}" data-hi="${hi}">
    <output data-output-slot="${slot}" data-output-variable="${escapeHtml(v.name)}"></output>
  </label>`;
}

export function renderComposer(space: SpaceDef, q: number): string {
  const slots = Array.from({ length: q }, (_, slot) => {
    const controls = space.variables.map((v) => variableInput(v, slot)).join("");
    return `<fieldset class="composer" data-slot="${slot}"><legend>Experiment ${slot + 1}</legend>${controls}</fieldset>`;
  }).join("");
  return `<form id="game-form">${slots}<button type="submit" id="game-submit">run both experiments</button>
    <span class="field-error" id="game-error"></span></form>`;
}

export function regretComparison(view: GameView): string {
  const mk = (xs: (number | null)[]) =>
    xs
      .map((r, i) => ({ iteration: i, mean: r ?? NaN, se: 0 }))
      .filter((p) => Number.isFinite(p.mean));
  return lineChartSvg(
    [
      { label: "you", points: mk(view.player_regrets) },
      { label: "optimizer", points: mk(view.shadow_regrets) },
    ],
    { yLabel: "regret (µm)", title: `target ${formatQuantity("target", view.target)}` },
  );
}

export function renderRevealed(view: GameView): string {
  if (!view.player_history.length) return "";
  const rows = view.player_history
    .map(
      (o, i) =>
        `<tr><td>${Math.floor(i / view.q) + 1}</td><td>${formatQuantity("size", o.size)}</td><td>${o.feasible ? "produced particles" : "failed"}</td></tr>`,
    )
    .join("");
  return `<table class="history"><thead><tr><th>round</th><th>result</th><th>outcome</th></tr></thead><tbody>${rows}</tbody></table>`;
}

export function finalPanel(view: GameView): string {
  if (!view.done || !view.final) return "";
  const f = view.final;
  const winner = f.player_auc <= f.shadow_auc ? "You edged out the optimizer." : "The optimizer won this one.";
  return `<div class="banner banner-done" id="game-final">
    <strong>Final comparison (area under the regret curve, lower is better):</strong>
    you ${formatNumber(f.player_auc, 2)} vs optimizer ${formatNumber(f.shadow_auc, 2)} — ${winner}
  </div>`;
}

export function renderGame(view: GameView): string {
  const countdown = `round ${Math.min(view.iteration + 1, view.iteration_limit)} of ${view.iteration_limit}`;
  const startRows = view.start_observations
    .map(
      (o) =>
        `<tr>${view.space.variables.map((v) => `<td>${typeof o.point[v.name] === "number" ? formatNumber(o.point[v.name] as number) : escapeHtml(String(o.point[v.name]))}</td>`).join("")}<td>${formatQuantity("size", o.size)}</td><td>${o.feasible ? "✓" : "✗"}</td></tr>`,
    )
    .join("");
  const head = view.space.variables.map((v) => `<th>${escapeHtml(v.name)}</th>`).join("");
  return `<section class="game" data-game="${view.id}">
    <div class="banner" data-round="${view.iteration}">Reach ${formatQuantity("target", view.target)} · ${view.done ? "game over" : countdown}</div>
    <h3>Starting data (shared with the optimizer)</h3>
    <table class="history"><thead><tr>${head}<th>size</th><th>ok</th></tr></thead><tbody>${startRows}</tbody></table>
    <div class="columns">
      <div><h3>Your next two experiments</h3>${view.done ? "" : renderComposer(view.space, view.q)}</div>
      <div><h3>Score</h3>${regretComparison(view)}${renderRevealed(view)}</div>
    </div>
    ${finalPanel(view)}
  </section>`;
}
