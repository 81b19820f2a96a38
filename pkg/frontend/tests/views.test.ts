import { describe, expect, it } from "vitest";

import { renderBenchmarkViewer } from "../src/bench.js";
import { renderDashboard, statusBanner } from "../src/dashboard.js";
import { finalPanel, renderGame } from "../src/game.js";
import type { CampaignView, GameView, SpaceDef } from "../src/types.js";

const SPACE: SpaceDef = {
  variables: [
    { name: "concentration", kind: "continuous", bounds: [0.05, 5.0], unit: "% w/v" },
    { name: "flow_rate", kind: "continuous", bounds: [0.01, 60.0], transform: "log", unit: "uL/min" },
    { name: "voltage", kind: "continuous", bounds: [10, 18], unit: "kV" },
    { name: "solvent", kind: "categorical", categories: ["CHCl3", "DMAc"] },
  ],
};

function campaign(partial: Partial<CampaignView> = {}): CampaignView {
  return {
    id: "abc123",
    created_at: 0,
    target: 3.0,
    strategy: "ccbo",
    tolerance: 0.1,
    seed: 0,
    space: SPACE,
    iteration: 1,
    observations: [
      { point: { concentration: 1.0, flow_rate: 2.0, voltage: 12, solvent: "CHCl3" }, size: 4.0, feasible: true },
      { point: { concentration: 0.5, flow_rate: 0.5, voltage: 11, solvent: "DMAc" }, size: 1.0, feasible: false },
    ],
    pending_points: [],
    pending_suggestion: [{ concentration: 2.0, flow_rate: 1.5, voltage: 13, solvent: "CHCl3" }],
    regret: 1.0,
    regret_series: [1.0, 1.0],
    stopped: false,
    stopped_reason: null,
    n_events: 5,
    ...partial,
  };
}

describe("dashboard rendering", () => {
  it("shows regret straight from the server payload (no recomputation)", () => {
    const html = renderDashboard(campaign());
    expect(html).toContain("current regret 1 µm");
    expect(html).toContain('data-status="running"');
  });

  it("flips to target-reached when the server says stopped", () => {
    const view = campaign({ stopped: true, stopped_reason: "target-reached", regret: 0.29 });
    expect(statusBanner(view)).toContain('data-status="target-reached"');
    expect(renderDashboard(view)).toContain("target reached");
  });

  it("renders a suggestion card per pending point with units", () => {
    const html = renderDashboard(campaign());
    expect(html).toContain("Candidate 1");
    expect(html).toContain("% w/v");
    expect(html).toContain("kV");
  });

  it("draws the parameter scatter with infeasible markers", () => {
    const html = renderDashboard(campaign());
    expect(html).toContain("<svg");
    expect(html.match(/<circle/g)!.length).toBeGreaterThan(0); // feasible dot
    expect(html).toContain("<g stroke="); // infeasible cross
  });
});

describe("game rendering", () => {
  function game(partial: Partial<GameView> = {}): GameView {
    return {
      id: "g1",
      target: 3.0,
      q: 2,
      iteration: 0,
      iteration_limit: 5,
      done: false,
      start_observations: [
        { point: { concentration: 0.5, flow_rate: 15, voltage: 10, solvent: "DMAc" }, size: 5.88, feasible: false },
      ],
      player_history: [],
      player_regrets: [null],
      shadow_regrets: [7.66],
      space: SPACE,
      ...partial,
    };
  }

  it("caps the round counter at the limit", () => {
    expect(renderGame(game({ iteration: 4 }))).toContain("round 5 of 5");
    expect(renderGame(game({ iteration: 5, done: true }))).toContain("game over");
  });

  it("renders the final AUC comparison once done", () => {
    const view = game({
      iteration: 5,
      done: true,
      final: { player_auc: 9.1, shadow_auc: 2.3, player_regret: 1.2, shadow_regret: 0.1 },
    });
    const html = finalPanel(view);
    expect(html).toContain("9.1");
    expect(html).toContain("2.3");
    expect(html).toContain("optimizer won");
  });

  it("never mentions oracle constants", () => {
    const html = renderGame(game());
    for (const secret of ["alpha_size", "alpha_feas", "size_offset", "feas_offset", "log_base"]) {
      expect(html).not.toContain(secret);
    }
  });
});

describe("benchmark viewer", () => {
  const curves = [
    "target,strategy,repetition,iteration,regret",
    ...[0, 1].flatMap((rep) =>
      [0, 1, 2].map((it) => `18.0,ccbo,${rep},${it},${8 - 3 * it + rep}`),
    ),
    ...[0, 1].flatMap((rep) =>
      [0, 1, 2].map((it) => `18.0,random,${rep},${it},${8 - it + rep}`),
    ),
  ].join("\n");
  const auc = "target,strategy,auc_mean,auc_sd,n\n18.0,ccbo,2.47,0.85,20\n18.0,random,19.48,8.12,20\n";

  it("renders one curve per strategy plus the AUC strip", () => {
    const html = renderBenchmarkViewer(curves, auc);
    expect(html.match(/stroke-width="2"/g)!.length).toBeGreaterThanOrEqual(2);
    expect(html).toContain("2.47 ± 0.85");
    expect(html).toContain("19.48 ± 8.12");
  });

  it("surfaces schema problems as diagnostics", () => {
    const html = renderBenchmarkViewer("oops,columns\n1,2\n", auc);
    expect(html).toContain('data-error="schema"');
    expect(html).toContain("missing column");
  });
});
