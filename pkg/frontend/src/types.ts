/** Wire types mirroring the scoring service's JSON schemas. */

export interface NomogramSummary {
  id: string;
  task: string;
  version: string;
  checksum: string;
  source: string;
  calibrated: boolean;
  compatibility_note: string | null;
}

export interface CategoricalPredictor {
  name: string;
  kind: "categorical";
  beta: number;
  range: [number, number];
  max_points: number;
  levels: string[];
  points_table: Record<string, number>;
}

export interface ContinuousPredictor {
  name: string;
  kind: "continuous";
  beta: number;
  range: [number, number];
  max_points: number;
  points_table: [number, number][];
}

export type Predictor = CategoricalPredictor | ContinuousPredictor;

export interface NomogramDoc {
  version: string;
  id: string;
  task: string;
  source: string;
  calibrated: boolean;
  point_cap: number;
  quantize: number | null;
  intercept: number;
  predictors: Predictor[];
  total_points_to_probability: { beta0: number; scale: number };
  bands: { label: string; min_probability: number }[];
  provenance: Record<string, unknown>;
  checksum: string;
}

/** Feature map: categorical levels by name, continuous values by name. */
export type FeatureMap = Record<string, string | number>;

export interface PredictorPoints {
  name: string;
  value: number;
  level: string | null;
  points: number;
}

export interface ScoreResponse {
  nomogram_id: string;
  nomogram_version: string;
  nomogram_checksum: string;
  total_points: number;
  linear_predictor: number;
  probability: number;
  calibrated: boolean;
  band: string | null;
  per_predictor_points: PredictorPoints[];
  warnings: string[];
}

export interface FieldError {
  field: string;
  message: string;
}
