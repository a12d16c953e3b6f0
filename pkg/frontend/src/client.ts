/** Thin fetch wrapper over the scoring service; the only data source. */

import type { FeatureMap, FieldError, NomogramDoc, NomogramSummary, ScoreResponse } from "./types.js";

export class ServiceError extends Error {
  constructor(
    message: string,
    readonly status: number,
    readonly fieldErrors: FieldError[] = [],
  ) {
    super(message);
  }
}

export class ServiceClient {
  constructor(readonly baseUrl: string, private readonly fetchImpl: typeof fetch = fetch) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, "") + path;
  }

  async listNomograms(): Promise<NomogramSummary[]> {
    const res = await this.fetchImpl(this.url("/nomograms"));
    if (!res.ok) throw new ServiceError(`list failed (${res.status})`, res.status);
    return res.json();
  }

  async getNomogram(id: string): Promise<NomogramDoc> {
    const res = await this.fetchImpl(this.url(`/nomograms/${encodeURIComponent(id)}`));
    if (!res.ok) throw new ServiceError(`fetch failed (${res.status})`, res.status);
    return res.json();
  }

  async score(id: string, features: FeatureMap): Promise<ScoreResponse> {
    const res = await this.fetchImpl(this.url(`/nomograms/${encodeURIComponent(id)}/score`), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ features }),
    });
    if (res.status === 400) {
      const body = await res.json();
      const errors: FieldError[] = body?.detail?.errors ?? [];
      throw new ServiceError("request rejected", 400, errors);
    }
    if (!res.ok) throw new ServiceError(`score failed (${res.status})`, res.status);
    return res.json();
  }
}
