/**
 * Typed client for the facetprep service. Every mutation in the UI funnels
 * through exactly one of these calls; errors carry the service's detail so
 * the shell can render 409/422 messages inline.
 */

import type {
  FacetsResponse,
  IntervalSpecParams,
  IntervalsPreviewResponse,
  LogResponse,
  OpenResponse,
  Outcome,
  ProjectInfo,
  RowsResponse,
  TransformResponse,
  Transformation,
  ValuesResponse,
} from "./types.js";

export class ServiceError extends Error {
  constructor(public status: number, detail: string) {
    super(detail);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, init);
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = await response.json();
      if (body && typeof body.detail === "string") detail = body.detail;
      else detail = JSON.stringify(body);
    } catch {
      /* non-JSON error body; keep the status text */
    }
    throw new ServiceError(response.status, detail);
  }
  return (await response.json()) as T;
}

function post(body?: unknown): RequestInit {
  return {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: body === undefined ? "{}" : JSON.stringify(body),
  };
}

export class Api {
  constructor(private base: string = "") {}

  listProjects(): Promise<ProjectInfo[]> {
    return request(`${this.base}/projects`);
  }

  createProject(name: string, kind: string, source: Record<string, unknown>): Promise<unknown> {
    return request(`${this.base}/projects`, post({ name, kind, source }));
  }

  openProject(name: string): Promise<OpenResponse> {
    return request(`${this.base}/projects/${encodeURIComponent(name)}/open`, post());
  }

  saveProject(name: string): Promise<unknown> {
    return request(`${this.base}/projects/${encodeURIComponent(name)}/save`, post());
  }

  refreshProject(name: string): Promise<{ outcomes: Outcome[]; row_count: number }> {
    return request(`${this.base}/projects/${encodeURIComponent(name)}/refresh`, post({}));
  }

  facets(sid: string): Promise<FacetsResponse> {
    return request(`${this.base}/sessions/${sid}/facets`);
  }

  values(sid: string, facet: string): Promise<ValuesResponse> {
    return request(`${this.base}/sessions/${sid}/facets/${encodeURIComponent(facet)}/values`);
  }

  rows(sid: string, filter: object | null, offset = 0, limit = 50): Promise<RowsResponse> {
    const params = new URLSearchParams({ offset: String(offset), limit: String(limit) });
    if (filter) params.set("filter", JSON.stringify(filter));
    return request(`${this.base}/sessions/${sid}/rows?${params}`);
  }

  log(sid: string): Promise<LogResponse> {
    return request(`${this.base}/sessions/${sid}/log`);
  }

  transform(sid: string, t: Transformation): Promise<TransformResponse> {
    return request(`${this.base}/sessions/${sid}/transform`, post(t));
  }

  undo(sid: string): Promise<{ row_count: number }> {
    return request(`${this.base}/sessions/${sid}/undo`, post());
  }

  redo(sid: string): Promise<{ row_count: number }> {
    return request(`${this.base}/sessions/${sid}/redo`, post());
  }

  async exportBytes(sid: string, format: string): Promise<Uint8Array> {
    const response = await fetch(`${this.base}/sessions/${sid}/export?format=${format}`);
    if (!response.ok) {
      throw new ServiceError(response.status, await response.text());
    }
    return new Uint8Array(await response.arrayBuffer());
  }

  intervalsPreview(chain: IntervalSpecParams[]): Promise<IntervalsPreviewResponse> {
    return request(`${this.base}/intervals/preview`, post({ chain }));
  }

  expressionCheck(expression: string): Promise<{ ok: boolean; canonical: string }> {
    return request(`${this.base}/expressions/check`, post({ expression }));
  }
}
