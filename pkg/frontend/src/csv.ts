// Parser for the benchmark export schema (plain comma-separated, header row).

export interface RegretRow {
  target: number;
  strategy: string;
  repetition: number;
  iteration: number;
  regret: number;
}

export interface AucRow {
  target: number;
  strategy: string;
  auc_mean: number;
  auc_sd: number;
  n: number;
}

export class SchemaError extends Error {}

export function parseTable(text: string): Record<string, string>[] {
  const lines = text.trim().split(/\r?\n/);
  if (lines.length === 0 || !lines[0]) throw new SchemaError("empty CSV document");
  const header = lines[0].split(",").map((h) => h.trim());
  return lines.slice(1).filter(Boolean).map((line) => {
    const cells = line.split(",");
    const row: Record<string, string> = {};
    header.forEach((name, i) => (row[name] = (cells[i] ?? "").trim()));
    return row;
  });
}

function requireColumns(rows: Record<string, string>[], columns: string[], what: string) {
  if (rows.length === 0) return;
  const present = Object.keys(rows[0]);
  const missing = columns.filter((c) => !present.includes(c));
  if (missing.length) {
    throw new SchemaError(`${what}: missing column(s) ${missing.join(", ")}; found ${present.join(", ")}`);
  }
}

export function parseRegretCurves(text: string): RegretRow[] {
  const rows = parseTable(text);
  requireColumns(rows, ["target", "strategy", "repetition", "iteration", "regret"], "regret curves");
  return rows.map((r) => ({
    target: Number(r.target),
    strategy: r.strategy,
    repetition: Number(r.repetition),
    iteration: Number(r.iteration),
    regret: Number(r.regret),
  }));
}

export function parseAucSummary(text: string): AucRow[] {
  const rows = parseTable(text);
  requireColumns(rows, ["target", "strategy", "auc_mean", "auc_sd", "n"], "AUC summary");
  return rows.map((r) => ({
    target: Number(r.target),
    strategy: r.strategy,
    auc_mean: Number(r.auc_mean),
    auc_sd: Number(r.auc_sd),
    n: Number(r.n),
  }));
}
