// Wire types of the suggestion service (documented field-by-field in the
// repository README).

export type ModelKind = 'forest' | 'knn';

export interface StatementPayload {
  conclusion: string;
  hypotheses: string[];
}

export interface SuggestRequest {
  statement?: StatementPayload;
  features?: string[];
  model: ModelKind;
  max_suggestions?: number;
}

export interface Suggestion {
  name: string;
  score: number;
  action_hint: string;
}

export interface SuggestResponse {
  suggestions: Suggestion[];
  model_version: number;
  elapsed: number;
}

export interface LearnRequest {
  statement?: StatementPayload;
  features?: string[];
  premises: string[];
}

export interface LearnResponse {
  model_version: number;
}

export interface HealthResponse {
  status: 'ok';
  model_version: number;
  models: Record<string, Record<string, unknown>>;
}

/** Structured 4xx payload; `position` is a 0-based offset into the input. */
export interface ApiErrorDetail {
  error: string;
  position?: number;
}
