// Tract fills for the risk layer. Normal is the orange base tone; the
// below and above classes pull toward yellow and red.

export const RISK_FILL: Record<string, string> = {
  below_average: "#f2c94c", // yellow
  normal: "#ef8a3c", // orange
  above_average: "#d0342c", // red
};

export const RISK_FILL_UNKNOWN = "#9aa0a6";

export function riskFill(riskClass: string): string {
  return RISK_FILL[riskClass] ?? RISK_FILL_UNKNOWN;
}
