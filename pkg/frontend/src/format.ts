// Every displayed number carries its unit.

const UNITS: Record<string, string> = {
  concentration: "% w/v",
  flow_rate: "µL·min⁻¹",
  voltage: "kV",
  size: "µm",
  target: "µm",
  regret: "µm",
};

export function unitOf(name: string): string {
  return UNITS[name] ?? "";
}

export function formatQuantity(name: string, value: number | string, digits = 3): string {
  if (typeof value === "string") return value;
  const unit = unitOf(name);
  const num = formatNumber(value, digits);
  return unit ? `${num} ${unit}` : num;
}

export function formatNumber(value: number, digits = 3): string {
  if (!Number.isFinite(value)) return "—";
  if (value !== 0 && (Math.abs(value) < 0.001 || Math.abs(value) >= 10000)) {
    return value.toExponential(2);
  }
  const rounded = value.toFixed(digits);
  if (!rounded.includes(".")) return rounded;
  return rounded.replace(/0+$/, "").replace(/\.$/, "");
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
