// Client-side split of the statement input into conclusion + hypotheses.
// The server re-validates every s-expression; this only finds the
// top-level CONCL/HYP markers so one textarea can hold a whole statement.

import type { StatementPayload } from './types.js';

export interface ParseOk {
  ok: true;
  statement: StatementPayload;
}

export interface ParseErr {
  ok: false;
  error: string;
  position: number;
}

interface Segment {
  keyword: string;
  text: string;
  at: number;
}

/**
 * Accepts either a bare s-expression (the conclusion) or
 * `CONCL <sexp> HYP <sexp> HYP <sexp> ...`; markers only count at
 * parenthesis depth 0.
 */
export function parseStatementText(text: string): ParseOk | ParseErr {
  const trimmed = text.trim();
  if (!trimmed) {
    return { ok: false, error: 'empty statement', position: 0 };
  }

  const segments: Segment[] = [];
  let depth = 0;
  let current: Segment | null = null;
  const tokens = tokenize(text);
  for (const token of tokens) {
    if (depth === 0 && (token.text === 'CONCL' || token.text === 'HYP')) {
      if (current) segments.push(current);
      current = { keyword: token.text, text: '', at: token.at };
      continue;
    }
    if (token.text === '(') depth += 1;
    if (token.text === ')') depth -= 1;
    if (depth < 0) {
      return { ok: false, error: "unmatched ')'", position: token.at };
    }
    if (!current) {
      // Bare expression: implicit conclusion.
      current = { keyword: 'CONCL', text: '', at: token.at };
    }
    current.text += token.source;
  }
  if (current) segments.push(current);
  if (depth !== 0) {
    return { ok: false, error: "unclosed '('", position: text.lastIndexOf('(') };
  }

  const conclusions = segments.filter((s) => s.keyword === 'CONCL');
  if (conclusions.length !== 1) {
    return {
      ok: false,
      error: 'exactly one CONCL section expected',
      position: conclusions.length > 1 ? conclusions[1]!.at : 0,
    };
  }
  for (const segment of segments) {
    if (!segment.text.trim()) {
      return { ok: false, error: `${segment.keyword} has no expression`, position: segment.at };
    }
  }
  return {
    ok: true,
    statement: {
      conclusion: conclusions[0]!.text.trim(),
      hypotheses: segments
        .filter((s) => s.keyword === 'HYP')
        .map((s) => s.text.trim()),
    },
  };
}

interface Token {
  text: string; // '(' | ')' | word
  source: string; // original slice including leading whitespace
  at: number;
}

function tokenize(text: string): Token[] {
  const tokens: Token[] = [];
  let i = 0;
  while (i < text.length) {
    let start = i;
    while (i < text.length && /\s/.test(text[i]!)) i += 1;
    if (i >= text.length) break;
    const ws = text.slice(start, i);
    const ch = text[i]!;
    if (ch === '(' || ch === ')') {
      tokens.push({ text: ch, source: ws + ch, at: i });
      i += 1;
      continue;
    }
    start = i;
    while (i < text.length && !/[\s()]/.test(text[i]!)) i += 1;
    tokens.push({ text: text.slice(start, i), source: ws + text.slice(start, i), at: start });
  }
  return tokens;
}
