// Entry point: tab routing plus event wiring over the string-rendered views.
// Every mutation re-fetches server state before re-rendering (no optimistic UI).

import { ApiClient, ApiError } from "./api.js";
import { renderBenchmarkViewer } from "./bench.js";
import { observationForm, renderDashboard, validateObservation } from "./dashboard.js";
import { formatQuantity } from "./format.js";
import { clampToBounds, renderGame, sliderValue } from "./game.js";
import type { GameView, Point, VariableDef } from "./types.js";

const api = new ApiClient("");
const app = document.getElementById("app")!;

let campaignId: string | null = null;
let gameView: GameView | null = null;

function setError(message: string) {
  const box = document.getElementById("global-error")!;
  box.textContent = message;
  box.classList.toggle("hidden", !message);
}

async function guard<T>(work: () => Promise<T>): Promise<T | undefined> {
  try {
    setError("");
    return await work();
  } catch (err) {
    if (err instanceof ApiError) {
      setError(err.status === 0 ? `${err.message} — retry when the service is back` : err.message);
    } else {
      setError(String(err));
    }
    return undefined;
  }
}

// -- campaign tab ------------------------------------------------------------

async function refreshCampaign() {
  if (!campaignId) return;
  const view = await guard(() => api.getCampaign(campaignId!));
  if (!view) return;
  app.innerHTML = renderDashboard(view);
  wireDashboard();
}

function wireDashboard() {
  document.getElementById("suggest-btn")?.addEventListener("click", async () => {
    await guard(() => api.suggest(campaignId!, 2));
    await refreshCampaign();
  });
  document.getElementById("init-btn")?.addEventListener("click", async () => {
    await guard(() => api.initialize(campaignId!, 8));
    await refreshCampaign();
  });
  const exportLink = document.getElementById("export-link") as HTMLAnchorElement | null;
  if (exportLink) exportLink.href = api.exportCsvUrl(campaignId!);
  for (const btn of document.querySelectorAll<HTMLButtonElement>(".observe-btn")) {
    btn.addEventListener("click", () => {
      const slot = document.getElementById("observation-slot")!;
      slot.innerHTML = observationForm(JSON.parse(btn.dataset.point!));
      wireObservationForm();
    });
  }
  wireObservationForm();
}

function wireObservationForm() {
  const form = document.getElementById("observation-form") as HTMLFormElement | null;
  if (!form) return;
  form.addEventListener("submit", async (ev) => {
    ev.preventDefault();
    const sizeInput = (document.getElementById("obs-size") as HTMLInputElement).value;
    const feasible = (document.getElementById("obs-feasible") as HTMLInputElement).checked;
    const check = validateObservation({ size: sizeInput, feasible });
    const errorSlot = document.getElementById("obs-size-error")!;
    errorSlot.textContent = check.errors.size ?? "";
    if (!check.ok) return;
    const raw = form.dataset.point;
    if (!raw) {
      errorSlot.textContent = "pick a suggested point first (record result…)";
      return;
    }
    const point: Point = JSON.parse(raw);
    await guard(() => api.observe(campaignId!, point, check.size!, feasible));
    await refreshCampaign();
  });
}

async function showCampaignTab() {
  const listing = await guard(() => api.listCampaigns());
  if (!listing) return;
  const rows = listing.campaigns
    .map(
      (c) =>
        `<tr><td><a href="#" data-open="${c.id}">${c.id}</a></td><td>${formatQuantity("target", c.target)}</td><td>${c.strategy}</td><td>${c.iteration}</td><td>${c.stopped ? "stopped" : "running"}</td></tr>`,
    )
    .join("");
  app.innerHTML = `<section>
    <h3>Campaigns</h3>
    <table class="history"><thead><tr><th>id</th><th>target</th><th>strategy</th><th>iteration</th><th>status</th></tr></thead><tbody>${rows}</tbody></table>
    <form id="new-campaign">
      <label>target size (µm) <input name="target" type="number" step="any" min="0.001" value="3.0"></label>
      <label>strategy <select name="strategy"><option>ccbo</option><option>constrained</option><option>vanilla</option><option>random</option></select></label>
      <button type="submit">create campaign</button>
    </form>
  </section>`;
  document.getElementById("new-campaign")!.addEventListener("submit", async (ev) => {
    ev.preventDefault();
    const data = new FormData(ev.target as HTMLFormElement);
    const view = await guard(() =>
      api.createCampaign({ target: Number(data.get("target")), strategy: String(data.get("strategy")) }),
    );
    if (view) {
      campaignId = view.id;
      await refreshCampaign();
    }
  });
  for (const link of document.querySelectorAll<HTMLAnchorElement>("[data-open]")) {
    link.addEventListener("click", async (ev) => {
      ev.preventDefault();
      campaignId = link.dataset.open!;
      await refreshCampaign();
    });
  }
}

// -- game tab ------------------------------------------------------------------

function composerPoints(): Point[] {
  const points: Point[] = [];
  if (!gameView) return points;
  for (let slot = 0; slot < gameView.q; slot++) {
    const point: Point = {};
    for (const input of document.querySelectorAll<HTMLInputElement>(`[data-slot="${slot}"][data-variable]`)) {
      const name = input.dataset.variable!;
      if (input.tagName === "SELECT") {
        point[name] = (input as unknown as HTMLSelectElement).value;
      } else {
        const v = gameView.space.variables.find((x) => x.name === name) as VariableDef;
        point[name] = sliderValue(v, Number(input.value) / 1000);
      }
    }
    points.push(clampToBounds(gameView.space, point));
  }
  return points;
}

function wireGame() {
  for (const input of document.querySelectorAll<HTMLInputElement>("input[type=range][data-variable]")) {
    const update = () => {
      const slot = input.dataset.slot!;
      const name = input.dataset.variable!;
      const v = gameView!.space.variables.find((x) => x.name === name) as VariableDef;
      const out = document.querySelector<HTMLOutputElement>(
        `[data-output-slot="${slot}"][data-output-variable="${name}"]`,
      );
      if (out) out.textContent = formatQuantity(name, sliderValue(v, Number(input.value) / 1000));
    };
    input.addEventListener("input", update);
    update();
  }
  document.getElementById("game-form")?.addEventListener("submit", async (ev) => {
    ev.preventDefault();
    const points = composerPoints();
    const errorSlot = document.getElementById("game-error")!;
    if (points.length !== (gameView?.q ?? 2)) {
      errorSlot.textContent = `compose ${gameView?.q ?? 2} experiments before submitting`;
      return;
    }
    const result = await guard(() => api.submitGame(gameView!.id, points));
    if (!result) return;
    gameView = await guard(() => api.getGame(gameView!.id)) ?? gameView;
    if (gameView) {
      app.innerHTML = renderGame(gameView);
      wireGame();
    }
  });
}

async function showGameTab() {
  app.innerHTML = `<section>
    <h3>Play against the optimizer</h3>
    <form id="new-game">
      <label>target size (µm) <input name="target" type="number" step="any" value="3.0"></label>
      <button type="submit">start (5 rounds, 2 experiments each)</button>
    </form>
  </section>`;
  document.getElementById("new-game")!.addEventListener("submit", async (ev) => {
    ev.preventDefault();
    const data = new FormData(ev.target as HTMLFormElement);
    const view = await guard(() => api.createGame(Number(data.get("target"))));
    if (view) {
      gameView = view;
      app.innerHTML = renderGame(view);
      wireGame();
    }
  });
}

// -- benchmark tab -----------------------------------------------------------------

async function showBenchTab() {
  app.innerHTML = `<section>
    <h3>Benchmark reports</h3>
    <p class="hint">Load the exported <code>regret_curves.csv</code> and <code>auc_summary.csv</code>.</p>
    <label>regret curves <input type="file" id="curves-file" accept=".csv"></label>
    <label>AUC summary <input type="file" id="auc-file" accept=".csv"></label>
    <button id="render-bench">render</button>
    <div id="bench-slot"></div>
  </section>`;
  document.getElementById("render-bench")!.addEventListener("click", async () => {
    const curves = (document.getElementById("curves-file") as HTMLInputElement).files?.[0];
    const auc = (document.getElementById("auc-file") as HTMLInputElement).files?.[0];
    const slot = document.getElementById("bench-slot")!;
    if (!curves || !auc) {
      slot.innerHTML = `<div class="banner banner-error">select both CSV files</div>`;
      return;
    }
    slot.innerHTML = renderBenchmarkViewer(await curves.text(), await auc.text());
  });
}

// -- router -------------------------------------------------------------------------

const tabs: Record<string, () => Promise<void>> = {
  campaigns: showCampaignTab,
  game: showGameTab,
  bench: showBenchTab,
};

for (const button of document.querySelectorAll<HTMLButtonElement>("nav [data-tab]")) {
  button.addEventListener("click", () => {
    for (const other of document.querySelectorAll("nav [data-tab]")) other.classList.remove("active");
    button.classList.add("active");
    void tabs[button.dataset.tab!]();
  });
}

void guard(() => api.health()).then(() => void showCampaignTab());
