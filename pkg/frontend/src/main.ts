// DOM shell: wires the pure state/render core to the page.  Server state
// is only ever changed through the learn endpoint; reloading the page
// rebuilds everything else from /health.

import { ApiClient, ApiError } from './api.js';
import { parseStatementText } from './statement.js';
import {
  applyCompare,
  applyHealth,
  applyLearn,
  applyLearnError,
  applySuggest,
  applySuggestError,
  beginCompare,
  beginSubmit,
  newSession,
  setModel,
  setStatementText,
  toggleSelection,
  type SessionState,
} from './state.js';
import {
  acceptEnabled,
  renderCompare,
  renderHistory,
  renderStatus,
  renderSuggestions,
} from './render.js';
import type { ModelKind, SuggestRequest } from './types.js';

const api = new ApiClient(resolveBase());
let state: SessionState = newSession();

function resolveBase(): string {
  // Served from /ui of the service itself, or a static host + ?api=URL.
  const param = new URLSearchParams(window.location.search).get('api');
  if (param) return param.replace(/\/$/, '');
  return window.location.origin;
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function update(next: SessionState): void {
  state = next;
  el('suggestions').innerHTML = renderSuggestions(state);
  el('compare').innerHTML = renderCompare(state);
  el('history').innerHTML = renderHistory(state);
  el('status').innerHTML = renderStatus(state);
  el<HTMLButtonElement>('accept').disabled = !acceptEnabled(state);
}

function statementRequest(model: ModelKind): SuggestRequest | null {
  const parsed = parseStatementText(state.statementText);
  if (!parsed.ok) {
    const [begun, seq] = beginSubmit(state);
    update(applySuggestError(begun, seq, parsed.error, parsed.position));
    return null;
  }
  return { statement: parsed.statement, model, max_suggestions: 32 };
}

async function submit(): Promise<void> {
  const request = statementRequest(state.selectedModel);
  if (!request) return;
  const [begun, seq] = beginSubmit(state);
  update(begun);
  try {
    const response = await api.suggest(request);
    update(applySuggest(state, seq, response));
  } catch (err) {
    const message = err instanceof Error ? err.message : String(err);
    const position = err instanceof ApiError ? err.position : undefined;
    update(applySuggestError(state, seq, message, position));
  }
}

async function accept(): Promise<void> {
  const parsed = parseStatementText(state.statementText);
  if (!parsed.ok || state.selection.length === 0) return;
  try {
    const response = await api.learn({
      statement: parsed.statement,
      premises: [...state.selection],
    });
    update(applyLearn(state, response.model_version));
  } catch (err) {
    update(applyLearnError(state, err instanceof Error ? err.message : String(err)));
  }
}

async function compareModels(): Promise<void> {
  const request = statementRequest('forest');
  if (!request) return;
  const [begun, seq] = beginCompare(state);
  update(begun);
  // Both calls go out concurrently; each panel settles on its own.
  for (const model of ['forest', 'knn'] as ModelKind[]) {
    api
      .suggest({ ...request, model })
      .then((response) => update(applyCompare(state, model, seq, { response })))
      .catch((err) =>
        update(
          applyCompare(state, model, seq, {
            error: err instanceof Error ? err.message : String(err),
          }),
        ),
      );
  }
}

function wire(): void {
  const statement = el<HTMLTextAreaElement>('statement');
  statement.addEventListener('input', () => {
    state = setStatementText(state, statement.value);
  });
  el<HTMLSelectElement>('model').addEventListener('change', (event) => {
    state = setModel(state, (event.target as HTMLSelectElement).value as ModelKind);
    el('status').innerHTML = renderStatus(state);
  });
  el('submit').addEventListener('click', () => void submit());
  el('accept').addEventListener('click', () => void accept());
  el('compare-button').addEventListener('click', () => void compareModels());
  statement.addEventListener('keydown', (event) => {
    if (event.key === 'Enter' && (event.ctrlKey || event.metaKey)) void submit();
  });

  // Delegated clicks: checkboxes toggle acceptance, names copy themselves.
  document.body.addEventListener('click', (event) => {
    const target = event.target as HTMLElement;
    const select = target.getAttribute('data-select');
    if (select) {
      update(toggleSelection(state, select));
      return;
    }
    const copy = target.getAttribute('data-copy');
    if (copy) void navigator.clipboard?.writeText(copy);
  });

  api
    .health()
    .then((health) => update(applyHealth(state, health.model_version)))
    .catch(() => update(state));
}

wire();
update(state);
