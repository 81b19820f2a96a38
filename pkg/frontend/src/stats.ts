// Display statistics only: per-iteration mean and standard error recomputed
// from the raw per-repetition rows (pre-aggregated values are not trusted).

import type { RegretRow } from "./csv.js";

export interface BandPoint {
  iteration: number;
  mean: number;
  se: number;
}

export function mean(values: number[]): number {
  return values.reduce((a, b) => a + b, 0) / values.length;
}

export function standardError(values: number[]): number {
  if (values.length < 2) return 0;
  const m = mean(values);
  const varSum = values.reduce((acc, v) => acc + (v - m) * (v - m), 0);
  return Math.sqrt(varSum / (values.length - 1)) / Math.sqrt(values.length);
}

export function regretBands(rows: RegretRow[], target: number, strategy: string): BandPoint[] {
  const byIteration = new Map<number, number[]>();
  for (const row of rows) {
    if (row.target !== target || row.strategy !== strategy) continue;
    const bucket = byIteration.get(row.iteration) ?? [];
    bucket.push(row.regret);
    byIteration.set(row.iteration, bucket);
  }
  return [...byIteration.entries()]
    .sort((a, b) => a[0] - b[0])
    .map(([iteration, values]) => ({
      iteration,
      mean: mean(values),
      se: standardError(values),
    }));
}

export function strategiesIn(rows: RegretRow[], target: number): string[] {
  const seen = new Set<string>();
  for (const row of rows) if (row.target === target) seen.add(row.strategy);
  return [...seen].sort();
}

export function targetsIn(rows: RegretRow[]): number[] {
  return [...new Set(rows.map((r) => r.target))].sort((a, b) => a - b);
}
