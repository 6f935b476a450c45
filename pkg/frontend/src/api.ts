// Typed client for the suggestion service.  All calls are asynchronous;
// callers discard stale responses by sequence number (see state.ts).

import type {
  ApiErrorDetail,
  HealthResponse,
  LearnRequest,
  LearnResponse,
  SuggestRequest,
  SuggestResponse,
} from './types.js';

export class ApiError extends Error {
  readonly status: number;
  readonly position?: number;

  constructor(status: number, detail: ApiErrorDetail | string) {
    super(typeof detail === 'string' ? detail : detail.error);
    this.status = status;
    if (typeof detail !== 'string' && detail.position !== undefined) {
      this.position = detail.position;
    }
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly base: string,
    private readonly fetchFn: FetchLike = (...args) => fetch(...args),
  ) {}

  suggest(req: SuggestRequest): Promise<SuggestResponse> {
    return this.post('/suggest', req);
  }

  learn(req: LearnRequest): Promise<LearnResponse> {
    return this.post('/learn', req);
  }

  async health(): Promise<HealthResponse> {
    const resp = await this.fetchFn(`${this.base}/health`);
    return this.decode(resp);
  }

  private async post<T>(endpoint: string, body: unknown): Promise<T> {
    const resp = await this.fetchFn(`${this.base}${endpoint}`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(body),
    });
    return this.decode(resp);
  }

  private async decode<T>(resp: Response): Promise<T> {
    if (resp.ok) {
      return (await resp.json()) as T;
    }
    let detail: ApiErrorDetail | string;
    try {
      const body = (await resp.json()) as { detail?: unknown };
      detail = normalizeDetail(body.detail);
    } catch {
      detail = `request failed with status ${resp.status}`;
    }
    throw new ApiError(resp.status, detail);
  }
}

function normalizeDetail(detail: unknown): ApiErrorDetail | string {
  if (typeof detail === 'string') return detail;
  if (detail && typeof detail === 'object' && 'error' in detail) {
    return detail as ApiErrorDetail;
  }
  // Validation errors arrive as a list of {msg, loc, ...} entries.
  if (Array.isArray(detail) && detail.length > 0) {
    const first = detail[0] as { msg?: string };
    if (first.msg) return first.msg;
  }
  return JSON.stringify(detail);
}
