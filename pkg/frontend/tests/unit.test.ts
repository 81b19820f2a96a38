import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { parseAucSummary, parseRegretCurves, SchemaError } from "../src/csv.js";
import { mean, regretBands, standardError, strategiesIn, targetsIn } from "../src/stats.js";
import { clamp, decadesWithin, linearScale, log10Scale, polylinePath } from "../src/charts.js";
import { formatNumber, formatQuantity, unitOf } from "../src/format.js";
import { clampToBounds, sliderPosition, sliderValue } from "../src/game.js";
import { validateObservation } from "../src/dashboard.js";
import type { SpaceDef } from "../src/types.js";

const CURVES_CSV = `target,strategy,repetition,iteration,regret
18.0,ccbo,0,0,8.0
18.0,ccbo,0,1,2.0
18.0,ccbo,1,0,6.0
18.0,ccbo,1,1,4.0
18.0,random,0,0,8.0
18.0,random,0,1,7.0
`;

const SPACE: SpaceDef = {
  variables: [
    { name: "concentration", kind: "continuous", bounds: [0.05, 5.0], unit: "% w/v" },
    { name: "flow_rate", kind: "continuous", bounds: [0.01, 60.0], transform: "log" },
    { name: "voltage", kind: "continuous", bounds: [10, 18] },
    { name: "solvent", kind: "categorical", categories: ["CHCl3", "DMAc"] },
  ],
};

describe("csv parsing", () => {
  it("parses the regret schema", () => {
    const rows = parseRegretCurves(CURVES_CSV);
    expect(rows).toHaveLength(6);
    expect(rows[0]).toEqual({ target: 18, strategy: "ccbo", repetition: 0, iteration: 0, regret: 8 });
  });

  it("reports missing columns explicitly", () => {
    expect(() => parseRegretCurves("target,strategy\n18,ccbo\n")).toThrowError(SchemaError);
    try {
      parseRegretCurves("target,strategy\n18,ccbo\n");
    } catch (err) {
      expect(String(err)).toMatch(/missing column/);
      expect(String(err)).toMatch(/repetition/);
    }
  });

  it("parses the AUC schema", () => {
    const rows = parseAucSummary("target,strategy,auc_mean,auc_sd,n\n18.0,ccbo,2.47,0.85,20\n");
    expect(rows[0].auc_mean).toBeCloseTo(2.47);
    expect(rows[0].n).toBe(20);
  });
});

describe("display statistics", () => {
  it("recomputes mean and standard error from repetition rows", () => {
    const rows = parseRegretCurves(CURVES_CSV);
    const bands = regretBands(rows, 18, "ccbo");
    expect(bands).toHaveLength(2);
    // iteration 0: values {8, 6} -> mean 7, se = sd/sqrt(2) = sqrt(2)/sqrt(2) = 1
    expect(bands[0].mean).toBeCloseTo(7);
    expect(bands[0].se).toBeCloseTo(1);
    // iteration 1: values {2, 4} -> mean 3, se 1
    expect(bands[1].mean).toBeCloseTo(3);
    expect(bands[1].se).toBeCloseTo(1);
  });

  it("lists strategies and targets", () => {
    const rows = parseRegretCurves(CURVES_CSV);
    expect(strategiesIn(rows, 18)).toEqual(["ccbo", "random"]);
    expect(targetsIn(rows)).toEqual([18]);
  });

  it("mean and se basics", () => {
    expect(mean([1, 2, 3])).toBeCloseTo(2);
    expect(standardError([1, 2, 3])).toBeCloseTo(1 / Math.sqrt(3));
    expect(standardError([5])).toBe(0);
  });
});

describe("scales", () => {
  it("linear scale maps and clamps", () => {
    const s = linearScale([0, 10], [0, 100]);
    expect(s(5)).toBeCloseTo(50);
    expect(s(-3)).toBeCloseTo(0);
    expect(s(20)).toBeCloseTo(100);
  });

  it("log scale puts the geometric midpoint in the middle", () => {
    const s = log10Scale([0.01, 60], [0, 1]);
    expect(s(Math.sqrt(0.01 * 60))).toBeCloseTo(0.5, 6);
  });

  it("clamp and paths", () => {
    expect(clamp(5, 0, 1)).toBe(1);
    expect(polylinePath([0, 1], [2, 3])).toBe("M0.00,2.00 L1.00,3.00");
    expect(decadesWithin([0.01, 60])).toEqual([0.01, 0.1, 1, 10]);
  });
});

describe("formatting carries units", () => {
  it("unit table", () => {
    expect(unitOf("flow_rate")).toContain("L");
    expect(formatQuantity("size", 3.29)).toBe("3.29 µm");
    expect(formatQuantity("voltage", 14)).toBe("14 kV");
    expect(formatQuantity("concentration", 0.5)).toContain("% w/v");
  });

  it("number shaping", () => {
    expect(formatNumber(0.000001)).toBe("1.00e-6");
    expect(formatNumber(123456)).toBe("1.23e+5");
    expect(formatNumber(2.5)).toBe("2.5");
  });
});

describe("game composer", () => {
  it("clamps submissions to the declared bounds", () => {
    const clamped = clampToBounds(SPACE, {
      concentration: 99,
      flow_rate: 0.0001,
      voltage: 14,
      solvent: "acetone",
    });
    expect(clamped.concentration).toBe(5.0);
    expect(clamped.flow_rate).toBe(0.01);
    expect(clamped.voltage).toBe(14);
    expect(clamped.solvent).toBe("CHCl3"); // unknown categories fall back to the first
  });

  it("log slider round-trips", () => {
    const flow = SPACE.variables[1];
    for (const q of [0.01, 0.5, 7.7, 60]) {
      expect(sliderValue(flow, sliderPosition(flow, q))).toBeCloseTo(q, 6);
    }
    expect(sliderValue(flow, 0.5)).toBeCloseTo(Math.sqrt(0.01 * 60), 6);
  });
});

describe("thin-client rule", () => {
  it("the API layer contains no local optimizer or surrogate math", () => {
    const source = readFileSync(join(__dirname, "..", "src", "api.ts"), "utf-8");
    for (const banned of [/matern/i, /cholesky/i, /acquisition/i, /posterior/i, /standardize/i, /Math\.(exp|log|sqrt)/]) {
      expect(source).not.toMatch(banned);
    }
  });
});

describe("observation form validation", () => {
  it("rejects negative sizes inline", () => {
    const res = validateObservation({ size: "-1", feasible: true });
    expect(res.ok).toBe(false);
    expect(res.errors.size).toMatch(/negative/);
  });

  it("rejects empty input", () => {
    expect(validateObservation({ size: "", feasible: true }).ok).toBe(false);
  });

  it("accepts a plain number", () => {
    const res = validateObservation({ size: "3.29", feasible: true });
    expect(res.ok).toBe(true);
    expect(res.size).toBeCloseTo(3.29);
  });
});
