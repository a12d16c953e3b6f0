/** Axis layout for rendering: ticks from the document's point tables,
 * markers from the service's per-predictor breakdown. No risk math here,
 * only mapping points to pixel fractions. */

import type { NomogramDoc, Predictor, ScoreResponse } from "./types.js";

export interface AxisTick {
  label: string;
  points: number;
  /** 0..1 position along the shared point scale */
  fraction: number;
}

export interface AxisLayout {
  name: string;
  kind: "categorical" | "continuous";
  maxPoints: number;
  ticks: AxisTick[];
}

export function axisLayouts(doc: NomogramDoc): AxisLayout[] {
  const cap = doc.point_cap;
  return doc.predictors.map((predictor) => ({
    name: predictor.name,
    kind: predictor.kind,
    maxPoints: predictor.max_points,
    ticks: ticksFor(predictor, cap),
  }));
}

function ticksFor(predictor: Predictor, cap: number): AxisTick[] {
  if (predictor.kind === "categorical") {
    return predictor.levels.map((level) => {
      const points = predictor.points_table[level];
      return { label: level, points, fraction: points / cap };
    });
  }
  const [[x0, p0], [x1, p1]] = predictor.points_table;
  const ticks: AxisTick[] = [];
  const steps = 5;
  for (let i = 0; i <= steps; i++) {
    const t = i / steps;
    const x = x0 + t * (x1 - x0);
    const points = p0 + t * (p1 - p0);
    ticks.push({ label: x.toPrecision(3), points, fraction: points / cap });
  }
  return ticks;
}

export interface Marker {
  name: string;
  points: number;
  fraction: number;
}

/** Marker per axis, positioned by the service's reported points. */
export function markersFrom(doc: NomogramDoc, response: ScoreResponse): Marker[] {
  return response.per_predictor_points.map((entry) => ({
    name: entry.name,
    points: entry.points,
    fraction: entry.points / doc.point_cap,
  }));
}

export function totalPointsFraction(doc: NomogramDoc, response: ScoreResponse): number {
  const maxTotal = doc.predictors.reduce((acc, p) => acc + p.max_points, 0);
  return maxTotal > 0 ? response.total_points / maxTotal : 0;
}
