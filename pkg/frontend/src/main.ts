/** DOM wiring. All numbers on screen trace to service responses; this file
 * only lays out inputs, axes, markers and deltas. */

import { axisLayouts, markersFrom, totalPointsFraction } from "./axes.js";
import { ServiceClient } from "./client.js";
import { calibrationBadge, formatDelta, formatPoints, probabilityLabel } from "./format.js";
import { UiSession } from "./state.js";
import type { NomogramDoc, Predictor } from "./types.js";
import { rangeHint } from "./validate.js";
import { deltaView } from "./whatif.js";

const SUPPORTED_MAJOR = 1;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function versionSupported(doc: NomogramDoc): boolean {
  const major = Number(doc.version.split(".")[0]);
  return Number.isFinite(major) && major === SUPPORTED_MAJOR;
}

function inputFor(predictor: Predictor, onChange: (value: string | number) => void): HTMLElement {
  const wrap = el("label", "predictor-input");
  wrap.append(el("span", "predictor-name", predictor.name));
  if (predictor.kind === "categorical") {
    const select = el("select");
    select.append(el("option", undefined, "(choose)"));
    for (const level of predictor.levels) {
      const option = el("option", undefined, level);
      option.value = level;
      select.append(option);
    }
    select.addEventListener("change", () => onChange(select.value));
    wrap.append(select);
  } else {
    const input = el("input");
    input.type = "number";
    input.step = "any";
    input.placeholder = rangeHint(predictor);
    input.addEventListener("input", () => onChange(input.value === "" ? "" : Number(input.value)));
    wrap.append(input);
  }
  return wrap;
}

function renderAxes(container: HTMLElement, doc: NomogramDoc, session: UiSession): void {
  container.replaceChildren();
  const snapshot = session.snapshot();
  const markers = snapshot.response
    ? new Map(markersFrom(doc, snapshot.response).map((m) => [m.name, m]))
    : new Map();
  for (const axis of axisLayouts(doc)) {
    const row = el("div", "axis-row");
    row.append(el("span", "axis-label", axis.name));
    const track = el("div", "axis-track");
    for (const tick of axis.ticks) {
      const tickEl = el("span", "axis-tick", tick.label);
      tickEl.style.left = `${(tick.fraction * 100).toFixed(2)}%`;
      tickEl.title = `${formatPoints(tick.points)} points`;
      track.append(tickEl);
    }
    const marker = markers.get(axis.name);
    if (marker) {
      const dot = el("span", "axis-marker");
      dot.style.left = `${(marker.fraction * 100).toFixed(2)}%`;
      dot.title = `${formatPoints(marker.points)} points`;
      track.append(dot);
    }
    row.append(track);
    container.append(row);
  }
}

function renderResult(container: HTMLElement, session: UiSession): void {
  container.replaceChildren();
  const snapshot = session.snapshot();
  if (snapshot.issues.length > 0) {
    container.append(el("div", "status", "score unavailable: fix the flagged inputs"));
    for (const issue of snapshot.issues) {
      container.append(el("div", "issue", `${issue.field}: ${issue.message}`));
    }
    return;
  }
  if (snapshot.serviceErrors.length > 0) {
    for (const message of snapshot.serviceErrors) {
      container.append(el("div", "issue", message));
    }
    return;
  }
  const response = snapshot.response;
  if (!response) {
    container.append(el("div", "status", "enter all inputs to score"));
    return;
  }
  const badge = calibrationBadge(response.calibrated);
  if (badge) container.append(el("div", "badge", badge));
  container.append(el("div", "total-points", `total points: ${formatPoints(response.total_points)}`));
  container.append(el("div", "probability", `probability: ${probabilityLabel(response)}`));
  if (response.band) container.append(el("div", "band", response.band));
  for (const warning of response.warnings) {
    container.append(el("div", "warning", warning));
  }
  const doc = session.document;
  if (doc) {
    const bar = el("div", "total-bar");
    const fill = el("span", "total-fill");
    fill.style.width = `${(totalPointsFraction(doc, response) * 100).toFixed(2)}%`;
    bar.append(fill);
    container.append(bar);
  }
}

function renderPinned(container: HTMLElement, session: UiSession): void {
  container.replaceChildren();
  const snapshot = session.snapshot();
  if (!snapshot.response || snapshot.pinned.length === 0) return;
  snapshot.pinned.forEach((pin, index) => {
    const view = deltaView(snapshot.response!, pin.response);
    const card = el("div", "pin-card");
    card.append(el("div", "pin-title", `pinned #${index + 1}`));
    for (const row of view.perPredictor) {
      card.append(el("div", "pin-row",
        `${row.name}: ${formatPoints(row.currentPoints)} vs ${formatPoints(row.pinnedPoints)} (${formatDelta(row.delta, 1)})`));
    }
    card.append(el("div", "pin-total", `points delta: ${formatDelta(view.totalPointsDelta, 1)}`));
    card.append(el("div", "pin-prob", `probability delta: ${formatDelta(view.probabilityDelta)}`));
    container.append(card);
  });
}

export async function boot(root: HTMLElement, baseUrl: string): Promise<void> {
  const client = new ServiceClient(baseUrl);
  const session = new UiSession(client);

  const picker = el("select", "nomogram-picker");
  const inputs = el("div", "inputs");
  const axes = el("div", "axes");
  const result = el("div", "result");
  const pinButton = el("button", "pin", "pin for comparison");
  const pins = el("div", "pins");
  const errorPanel = el("div", "error-panel");
  root.append(picker, errorPanel, inputs, axes, result, pinButton, pins);

  const redraw = () => {
    const doc = session.document;
    if (doc) renderAxes(axes, doc, session);
    renderResult(result, session);
    renderPinned(pins, session);
  };

  pinButton.addEventListener("click", () => {
    session.pinCurrent();
    redraw();
  });

  const summaries = await client.listNomograms();
  for (const summary of summaries) {
    const option = el("option", undefined,
      `${summary.id} (${summary.task}${summary.calibrated ? "" : ", uncalibrated"})`);
    option.value = summary.id;
    picker.append(option);
  }

  const choose = async (id: string) => {
    errorPanel.replaceChildren();
    await session.selectNomogram(id);
    const doc = session.document!;
    if (!versionSupported(doc)) {
      errorPanel.append(el("div", "issue",
        `unsupported nomogram document version ${doc.version}; this calculator reads major version ${SUPPORTED_MAJOR}`));
      inputs.replaceChildren();
      axes.replaceChildren();
      result.replaceChildren();
      return;
    }
    inputs.replaceChildren();
    for (const predictor of doc.predictors) {
      inputs.append(inputFor(predictor, async (value) => {
        await session.setFeature(predictor.name, value);
        redraw();
      }));
    }
    redraw();
  };

  picker.addEventListener("change", () => choose(picker.value));
  if (summaries.length > 0) await choose(summaries[0].id);
}

declare global {
  interface Window {
    lesionkitCalculator?: { boot: typeof boot };
  }
}

if (typeof window !== "undefined") {
  window.lesionkitCalculator = { boot };
}
