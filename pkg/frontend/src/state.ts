// Session state and its pure transitions.
//
// Every server call carries a sequence number; a response only lands if
// its sequence is still the newest for its panel, so a slow reply
// superseded by a newer submission is discarded instead of overwriting
// fresher results.  All transitions return new state objects; rendering
// (render.ts) is a pure function of this state, which is what the
// snapshot tests pin down.

import type { ModelKind, SuggestResponse } from './types.js';

export interface PanelState {
  status: 'idle' | 'loading' | 'ready' | 'error';
  seq: number;
  response?: SuggestResponse;
  error?: string;
  errorPosition?: number;
}

export interface HistoryEntry {
  statement: string;
  premises: string[];
  modelVersion: number;
}

export interface SessionState {
  statementText: string;
  selectedModel: ModelKind;
  modelVersion: number | null;
  nextSeq: number;
  main: PanelState;
  compare: Record<ModelKind, PanelState> | null;
  selection: string[]; // premises ticked for acceptance, insertion order
  accepted: string[]; // premise names already fed back
  history: HistoryEntry[];
  notice: string | null;
}

const idlePanel: PanelState = { status: 'idle', seq: -1 };

export function newSession(): SessionState {
  return {
    statementText: '',
    selectedModel: 'forest',
    modelVersion: null,
    nextSeq: 0,
    main: idlePanel,
    compare: null,
    selection: [],
    accepted: [],
    history: [],
    notice: null,
  };
}

export function setStatementText(state: SessionState, text: string): SessionState {
  return { ...state, statementText: text };
}

export function setModel(state: SessionState, model: ModelKind): SessionState {
  return { ...state, selectedModel: model };
}

export function applyHealth(state: SessionState, version: number): SessionState {
  return { ...state, modelVersion: version };
}

/** Issue a sequence number and mark the main panel as loading. */
export function beginSubmit(state: SessionState): [SessionState, number] {
  const seq = state.nextSeq;
  return [
    {
      ...state,
      nextSeq: seq + 1,
      selection: [],
      compare: null,
      notice: null,
      main: { status: 'loading', seq },
    },
    seq,
  ];
}

function freshest(panel: PanelState, seq: number): boolean {
  return seq >= panel.seq;
}

export function applySuggest(
  state: SessionState,
  seq: number,
  response: SuggestResponse,
): SessionState {
  if (!freshest(state.main, seq)) return state; // stale reply: drop it
  return {
    ...state,
    modelVersion: response.model_version,
    main: { status: 'ready', seq, response },
  };
}

export function applySuggestError(
  state: SessionState,
  seq: number,
  error: string,
  errorPosition?: number,
): SessionState {
  if (!freshest(state.main, seq)) return state;
  return { ...state, main: { status: 'error', seq, error, errorPosition } };
}

export function toggleSelection(state: SessionState, name: string): SessionState {
  const selection = state.selection.includes(name)
    ? state.selection.filter((n) => n !== name)
    : [...state.selection, name];
  return { ...state, selection };
}

/** A successful learn: record history, bump the version, mark accepted. */
export function applyLearn(state: SessionState, version: number): SessionState {
  if (state.selection.length === 0) return state;
  const entry: HistoryEntry = {
    statement: state.statementText,
    premises: [...state.selection],
    modelVersion: version,
  };
  return {
    ...state,
    modelVersion: version,
    accepted: [...new Set([...state.accepted, ...state.selection])],
    selection: [],
    history: [...state.history, entry],
    notice: `learned ${entry.premises.length} premise(s); model version ${version}`,
  };
}

/** A rejected learn leaves history and selection untouched. */
export function applyLearnError(state: SessionState, error: string): SessionState {
  return { ...state, notice: `learn failed: ${error}` };
}

export function beginCompare(state: SessionState): [SessionState, number] {
  const seq = state.nextSeq;
  return [
    {
      ...state,
      nextSeq: seq + 1,
      notice: null,
      compare: {
        forest: { status: 'loading', seq },
        knn: { status: 'loading', seq },
      },
    },
    seq,
  ];
}

export function applyCompare(
  state: SessionState,
  model: ModelKind,
  seq: number,
  outcome: { response?: SuggestResponse; error?: string },
): SessionState {
  if (!state.compare || !freshest(state.compare[model], seq)) return state;
  const panel: PanelState = outcome.response
    ? { status: 'ready', seq, response: outcome.response }
    : { status: 'error', seq, error: outcome.error ?? 'unknown error' };
  const version = outcome.response?.model_version;
  return {
    ...state,
    modelVersion: version ?? state.modelVersion,
    compare: { ...state.compare, [model]: panel },
  };
}
