/** Client-side schema checks so invalid maps never reach the display. */

import type { FeatureMap, NomogramDoc, Predictor } from "./types.js";

export interface ValidationIssue {
  field: string;
  message: string;
}

function checkOne(predictor: Predictor, value: string | number | undefined): string | null {
  if (value === undefined || value === "") return "missing value";
  if (predictor.kind === "categorical") {
    if (typeof value === "string") {
      return predictor.levels.includes(value)
        ? null
        : `unknown level "${value}"`;
    }
    const code = Number(value);
    if (!Number.isFinite(code) || !Number.isInteger(code)) return "level code must be an integer";
    if (code < predictor.range[0] || code > predictor.range[1]) {
      return `code ${code} outside ${predictor.range[0]}..${predictor.range[1]}`;
    }
    return null;
  }
  const num = Number(value);
  if (typeof value === "string" && value.trim() === "") return "missing value";
  if (!Number.isFinite(num)) return "not a finite number";
  return null;
}

/** Issues for the current map; empty means schema-valid (scoring allowed). */
export function validateFeatureMap(doc: NomogramDoc, features: FeatureMap): ValidationIssue[] {
  const issues: ValidationIssue[] = [];
  const known = new Set(doc.predictors.map((p) => p.name));
  for (const name of Object.keys(features)) {
    if (!known.has(name)) issues.push({ field: name, message: "unknown predictor" });
  }
  for (const predictor of doc.predictors) {
    const problem = checkOne(predictor, features[predictor.name]);
    if (problem) issues.push({ field: predictor.name, message: problem });
  }
  return issues;
}

/** Range hints for continuous inputs; out-of-range is allowed (service clamps). */
export function rangeHint(predictor: Predictor): string {
  const [lo, hi] = predictor.range;
  return predictor.kind === "continuous" ? `${formatShort(lo)} to ${formatShort(hi)}` : "";
}

function formatShort(x: number): string {
  return Math.abs(x) >= 100 ? x.toFixed(0) : x.toPrecision(3);
}
