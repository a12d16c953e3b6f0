/** Display fidelity against frozen responses from the real scoring service. */

import { describe, expect, it } from "vitest";

import { axisLayouts, markersFrom } from "../src/axes.js";
import { calibrationBadge, formatProbability, probabilityLabel } from "../src/format.js";
import type { NomogramDoc, ScoreResponse } from "../src/types.js";
import { deltaView } from "../src/whatif.js";

import fixtures from "./fixtures/ui_fixtures.json";

interface ScoredFixture {
  nomogram_id: string;
  features: Record<string, string | number>;
  response: ScoreResponse;
}

const docs = fixtures.docs as unknown as Record<string, NomogramDoc>;
const scored = fixtures.scored as unknown as ScoredFixture[];

describe("probability display", () => {
  it("equals the service response to 3 decimals for all 20 scripted inputs", () => {
    expect(scored.length).toBe(20);
    for (const entry of scored) {
      const shown = formatProbability(entry.response);
      expect(shown).toBe(entry.response.probability.toFixed(3));
      expect(Math.abs(Number(shown) - entry.response.probability)).toBeLessThanOrEqual(5e-4);
    }
  });

  it("labels uncalibrated responses", () => {
    for (const entry of scored) {
      const label = probabilityLabel(entry.response);
      if (entry.response.calibrated) {
        expect(label).not.toContain("uncalibrated");
      } else {
        expect(label).toContain("uncalibrated");
      }
    }
  });
});

describe("uncalibrated badge", () => {
  it("is shown for the published-coefficients nomograms", () => {
    for (const id of ["biopsy-fixture", "malignancy-fixture"]) {
      expect(docs[id].source).toBe("paper-fixture");
      expect(calibrationBadge(docs[id].calibrated)).toMatch(/UNCALIBRATED/);
    }
  });

  it("is absent for the fitted nomogram", () => {
    expect(calibrationBadge(docs["biopsy-demo-fitted"].calibrated)).toBeNull();
  });
});

describe("axis markers", () => {
  it("positions come straight from the service per-predictor breakdown", () => {
    for (const entry of scored) {
      const doc = docs[entry.nomogram_id];
      const markers = markersFrom(doc, entry.response);
      const breakdown = new Map(
        entry.response.per_predictor_points.map((p) => [p.name, p.points]),
      );
      for (const marker of markers) {
        expect(marker.points).toBe(breakdown.get(marker.name));
        expect(marker.fraction).toBeCloseTo(marker.points / doc.point_cap, 12);
      }
    }
  });
});

describe("what-if deltas", () => {
  it("are all zero when current and pinned maps are identical", () => {
    for (const entry of scored) {
      const view = deltaView(entry.response, entry.response);
      expect(view.totalPointsDelta).toBe(0);
      expect(view.probabilityDelta).toBe(0);
      for (const row of view.perPredictor) {
        expect(row.delta).toBe(0);
      }
    }
  });

  it("moving margin from circumscribed to spiculated raises biopsy risk", () => {
    const pair = scored.filter(
      (e) =>
        e.nomogram_id === "biopsy-fixture" &&
        e.features["shape"] === "oval" &&
        e.features["posterior"] === "none" &&
        e.features["calcifications"] === "none" &&
        e.features["orientation"] === "parallel",
    );
    const pinned = pair.find((e) => e.features["margin"] === "circumscribed")!;
    const current = pair.find((e) => e.features["margin"] === "spiculated")!;
    const view = deltaView(current.response, pinned.response);
    expect(view.probabilityDelta).toBeGreaterThan(0);
    expect(view.totalPointsDelta).toBeGreaterThan(0);
    const marginRow = view.perPredictor.find((r) => r.name === "margin")!;
    expect(marginRow.delta).toBeGreaterThan(0);
  });

  it("per-predictor deltas sum to the total points delta", () => {
    const a = scored[0].response;
    const b = scored[3].response;
    const view = deltaView(a, b);
    const sum = view.perPredictor.reduce((acc, row) => acc + row.delta, 0);
    expect(sum).toBeCloseTo(view.totalPointsDelta, 9);
  });
});

describe("axis layouts", () => {
  it("biopsy fixture renders its five predictor axes", () => {
    const layouts = axisLayouts(docs["biopsy-fixture"]);
    expect(layouts.map((a) => a.name)).toEqual([
      "shape", "orientation", "margin", "posterior", "calcifications",
    ]);
  });

  it("widest axis spans the full point cap", () => {
    for (const doc of Object.values(docs)) {
      const layouts = axisLayouts(doc);
      const widest = Math.max(...layouts.map((a) => a.maxPoints));
      expect(widest).toBeCloseTo(doc.point_cap, 9);
      for (const axis of layouts) {
        for (const tick of axis.ticks) {
          expect(tick.fraction).toBeGreaterThanOrEqual(-1e-12);
          expect(tick.fraction).toBeLessThanOrEqual(1 + 1e-12);
        }
      }
    }
  });

  it("categorical ticks mirror the document points table", () => {
    const doc = docs["biopsy-fixture"];
    const margin = axisLayouts(doc).find((a) => a.name === "margin")!;
    const table = (doc.predictors.find((p) => p.name === "margin") as any).points_table;
    for (const tick of margin.ticks) {
      expect(tick.points).toBe(table[tick.label]);
    }
  });
});
