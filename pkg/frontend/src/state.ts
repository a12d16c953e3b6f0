/** Session state: one nomogram, a current map, pinned maps, last responses.
 * Score requests are sequenced latest-wins so a slow response can never
 * overwrite a newer one. Nothing is persisted beyond the page. */

import { ServiceClient, ServiceError } from "./client.js";
import type { FeatureMap, NomogramDoc, ScoreResponse } from "./types.js";
import { validateFeatureMap, ValidationIssue } from "./validate.js";

export interface SessionSnapshot {
  nomogramId: string | null;
  doc: NomogramDoc | null;
  features: FeatureMap;
  issues: ValidationIssue[];
  /** null whenever the current map is invalid or not yet scored */
  response: ScoreResponse | null;
  pinned: { features: FeatureMap; response: ScoreResponse }[];
  serviceErrors: string[];
}

export class UiSession {
  private doc: NomogramDoc | null = null;
  private nomogramId: string | null = null;
  private features: FeatureMap = {};
  private response: ScoreResponse | null = null;
  private pinned: { features: FeatureMap; response: ScoreResponse }[] = [];
  private serviceErrors: string[] = [];
  private requestCounter = 0;
  private appliedRequest = 0;

  constructor(private readonly client: ServiceClient) {}

  async selectNomogram(id: string): Promise<void> {
    this.doc = await this.client.getNomogram(id);
    this.nomogramId = id;
    this.features = {};
    this.response = null;
    this.pinned = [];
    this.serviceErrors = [];
  }

  get document(): NomogramDoc | null {
    return this.doc;
  }

  snapshot(): SessionSnapshot {
    return {
      nomogramId: this.nomogramId,
      doc: this.doc,
      features: { ...this.features },
      issues: this.issues(),
      response: this.issues().length === 0 ? this.response : null,
      pinned: [...this.pinned],
      serviceErrors: [...this.serviceErrors],
    };
  }

  issues(): ValidationIssue[] {
    if (!this.doc) return [];
    return validateFeatureMap(this.doc, this.features);
  }

  /** Update one input and rescore when the map is schema-valid. */
  async setFeature(name: string, value: string | number): Promise<void> {
    this.features[name] = value;
    await this.rescore();
  }

  async setFeatures(features: FeatureMap): Promise<void> {
    this.features = { ...features };
    await this.rescore();
  }

  private async rescore(): Promise<void> {
    if (!this.doc || !this.nomogramId) return;
    if (this.issues().length > 0) {
      this.response = null;  // stale values must never show
      return;
    }
    const token = ++this.requestCounter;
    try {
      const response = await this.client.score(this.nomogramId, { ...this.features });
      if (token > this.appliedRequest) {
        this.appliedRequest = token;
        this.response = response;
        this.serviceErrors = [];
      }
    } catch (err) {
      if (token > this.appliedRequest) {
        this.appliedRequest = token;
        this.response = null;
        this.serviceErrors =
          err instanceof ServiceError && err.fieldErrors.length
            ? err.fieldErrors.map((e) => `${e.field}: ${e.message}`)
            : [String(err)];
      }
    }
  }

  /** Pin the current (scored) map for side-by-side comparison. */
  pinCurrent(): boolean {
    if (!this.response) return false;
    this.pinned.push({ features: { ...this.features }, response: this.response });
    return true;
  }

  unpin(index: number): void {
    this.pinned.splice(index, 1);
  }
}
