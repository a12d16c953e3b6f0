/** Side-by-side comparison of the current map against a pinned map. */

import type { ScoreResponse } from "./types.js";

export interface PredictorDelta {
  name: string;
  currentPoints: number;
  pinnedPoints: number;
  delta: number;
}

export interface DeltaView {
  perPredictor: PredictorDelta[];
  totalPointsDelta: number;
  probabilityDelta: number;
}

export function deltaView(current: ScoreResponse, pinned: ScoreResponse): DeltaView {
  const pinnedPoints = new Map(pinned.per_predictor_points.map((e) => [e.name, e.points]));
  const perPredictor = current.per_predictor_points.map((entry) => {
    const before = pinnedPoints.get(entry.name) ?? 0;
    return {
      name: entry.name,
      currentPoints: entry.points,
      pinnedPoints: before,
      delta: entry.points - before,
    };
  });
  return {
    perPredictor,
    totalPointsDelta: current.total_points - pinned.total_points,
    probabilityDelta: current.probability - pinned.probability,
  };
}
