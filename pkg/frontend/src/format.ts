/** Display rounding rules; all numbers shown come from service responses. */

import type { ScoreResponse } from "./types.js";

export function formatProbability(response: ScoreResponse): string {
  return response.probability.toFixed(3);
}

export function formatPoints(points: number): string {
  return points.toFixed(1);
}

export function formatDelta(delta: number, digits = 3): string {
  const text = delta.toFixed(digits);
  return delta > 0 ? `+${text}` : text;
}

/** Badge text for nomograms without a usable intercept. */
export function calibrationBadge(calibrated: boolean): string | null {
  return calibrated ? null : "UNCALIBRATED: relative risk only";
}

export function probabilityLabel(response: ScoreResponse): string {
  const value = formatProbability(response);
  return response.calibrated ? value : `${value} (uncalibrated)`;
}
