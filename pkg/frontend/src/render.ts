// Pure rendering: SessionState in, HTML strings out.  The DOM layer in
// main.ts only assigns these to containers and wires events, so the
// snapshot tests over these functions pin the whole visual contract.

import type { PanelState, SessionState } from './state.js';
import type { Suggestion } from './types.js';

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

function scoreBadge(score: number): string {
  return `<span class="score">${score.toFixed(3)}</span>`;
}

function suggestionRow(s: Suggestion, state: SessionState): string {
  const selected = state.selection.includes(s.name);
  const accepted = state.accepted.includes(s.name);
  const marker = accepted ? ' <span class="accepted">accepted</span>' : '';
  return (
    `<li class="suggestion" data-name="${escapeHtml(s.name)}">` +
    `<input type="checkbox" data-select="${escapeHtml(s.name)}"${selected ? ' checked' : ''}>` +
    `<button class="copy" data-copy="${escapeHtml(s.name)}" title="copy name">` +
    `${escapeHtml(s.name)}</button> ${scoreBadge(s.score)}${marker}</li>`
  );
}

function sortedSuggestions(panel: PanelState): Suggestion[] {
  const suggestions = panel.response?.suggestions ?? [];
  // Responses arrive sorted; keep the guarantee even for odd servers.
  return [...suggestions].sort((a, b) => b.score - a.score || (a.name < b.name ? -1 : 1));
}

export function renderInlineError(text: string, message: string, position?: number): string {
  if (position === undefined || position < 0 || position > text.length) {
    return `<p class="error">${escapeHtml(message)}</p>`;
  }
  const before = text.slice(0, position);
  const bad = text.slice(position, position + 1) || ' ';
  const after = text.slice(position + 1);
  return (
    `<p class="error">${escapeHtml(message)} (at offset ${position})</p>` +
    `<pre class="error-context">${escapeHtml(before)}` +
    `<mark>${escapeHtml(bad)}</mark>${escapeHtml(after)}</pre>`
  );
}

export function renderPanel(panel: PanelState, state: SessionState, label: string): string {
  switch (panel.status) {
    case 'idle':
      return `<div class="panel" data-label="${escapeHtml(label)}"><p class="muted">no query yet</p></div>`;
    case 'loading':
      return `<div class="panel" data-label="${escapeHtml(label)}"><p class="muted">ranking&hellip;</p></div>`;
    case 'error':
      return (
        `<div class="panel" data-label="${escapeHtml(label)}">` +
        renderInlineError(state.statementText, panel.error ?? 'error', panel.errorPosition) +
        `</div>`
      );
    case 'ready': {
      const rows = sortedSuggestions(panel).map((s) => suggestionRow(s, state));
      const meta =
        `<p class="meta">model version ${panel.response!.model_version}, ` +
        `${(panel.response!.elapsed * 1000).toFixed(1)} ms</p>`;
      const list = rows.length
        ? `<ol class="ranking">${rows.join('')}</ol>`
        : '<p class="muted">empty ranking</p>';
      return `<div class="panel" data-label="${escapeHtml(label)}">${meta}${list}</div>`;
    }
  }
}

export function renderSuggestions(state: SessionState): string {
  return renderPanel(state.main, state, state.selectedModel);
}

export function renderCompare(state: SessionState): string {
  if (!state.compare) return '';
  // Panels are independent: one model failing leaves the other rendered.
  return (
    `<div class="compare"><div class="compare-col"><h3>forest</h3>` +
    renderPanel(state.compare.forest, state, 'forest') +
    `</div><div class="compare-col"><h3>knn</h3>` +
    renderPanel(state.compare.knn, state, 'knn') +
    `</div></div>`
  );
}

export function renderHistory(state: SessionState): string {
  if (state.history.length === 0) return '<p class="muted">nothing accepted yet</p>';
  const items = state.history
    .map(
      (h) =>
        `<li><code>${escapeHtml(h.statement)}</code> &rarr; ` +
        `${h.premises.map((p) => `<code>${escapeHtml(p)}</code>`).join(', ')} ` +
        `<span class="meta">(v${h.modelVersion})</span></li>`,
    )
    .join('');
  return `<ul class="history">${items}</ul>`;
}

export function renderStatus(state: SessionState): string {
  const version = state.modelVersion === null ? '?' : String(state.modelVersion);
  const notice = state.notice ? ` &middot; ${escapeHtml(state.notice)}` : '';
  return `model <strong>${state.selectedModel}</strong> &middot; server version ${version}${notice}`;
}

export function acceptEnabled(state: SessionState): boolean {
  return state.selection.length > 0;
}
