// Rendering is a pure function of SessionState: fixed states must produce
// byte-identical markup (inline snapshots).

import { describe, expect, it } from 'vitest';

import {
  applyCompare,
  applyLearn,
  applySuggest,
  applySuggestError,
  beginCompare,
  beginSubmit,
  newSession,
  setStatementText,
  toggleSelection,
  type SessionState,
} from '../src/state.js';
import {
  acceptEnabled,
  renderCompare,
  renderHistory,
  renderInlineError,
  renderStatus,
  renderSuggestions,
} from '../src/render.js';
import type { SuggestResponse } from '../src/types.js';

const RESPONSE: SuggestResponse = {
  suggestions: [
    { name: 'mul_ne_zero', score: 2, action_hint: 'mul_ne_zero' },
    { name: 'inv_ne_zero', score: 1, action_hint: 'inv_ne_zero' },
  ],
  model_version: 3,
  elapsed: 0.0042,
};

function readyState(): SessionState {
  const [loading, seq] = beginSubmit(setStatementText(newSession(), '(goal x)'));
  return applySuggest(loading, seq, RESPONSE);
}

describe('renderSuggestions', () => {
  it('renders the ranking sorted with score badges', () => {
    expect(renderSuggestions(readyState())).toMatchInlineSnapshot(
      `"<div class="panel" data-label="forest"><p class="meta">model version 3, 4.2 ms</p><ol class="ranking"><li class="suggestion" data-name="mul_ne_zero"><input type="checkbox" data-select="mul_ne_zero"><button class="copy" data-copy="mul_ne_zero" title="copy name">mul_ne_zero</button> <span class="score">2.000</span></li><li class="suggestion" data-name="inv_ne_zero"><input type="checkbox" data-select="inv_ne_zero"><button class="copy" data-copy="inv_ne_zero" title="copy name">inv_ne_zero</button> <span class="score">1.000</span></li></ol></div>"`,
    );
  });

  it('is pure: identical state renders identical markup', () => {
    const state = readyState();
    expect(renderSuggestions(state)).toBe(renderSuggestions(state));
    expect(renderStatus(state)).toBe(renderStatus(state));
  });

  it('marks accepted premises and ticks the selection', () => {
    let state = readyState();
    state = toggleSelection(state, 'mul_ne_zero');
    const html = renderSuggestions(state);
    expect(html).toContain('data-select="mul_ne_zero" checked');
    state = applyLearn(state, 4);
    expect(renderSuggestions(state)).toContain('<span class="accepted">accepted</span>');
  });

  it('escapes markup-significant characters', () => {
    const [loading, seq] = beginSubmit(newSession());
    const state = applySuggest(loading, seq, {
      suggestions: [{ name: '<evil>&"x', score: 1, action_hint: '<evil>&"x' }],
      model_version: 1,
      elapsed: 0,
    });
    const html = renderSuggestions(state);
    expect(html).toContain('&lt;evil&gt;&amp;&quot;x');
    expect(html).not.toContain('<evil>');
  });

  it('renders the loading and idle placeholders', () => {
    expect(renderSuggestions(newSession())).toContain('no query yet');
    const [loading] = beginSubmit(newSession());
    expect(renderSuggestions(loading)).toContain('ranking&hellip;');
  });
});

describe('renderInlineError', () => {
  it('points at the failing offset', () => {
    expect(renderInlineError('(f (g', "unclosed '('", 3)).toMatchInlineSnapshot(
      `"<p class="error">unclosed '(' (at offset 3)</p><pre class="error-context">(f <mark>(</mark>g</pre>"`,
    );
  });

  it('degrades to a bare message without a position', () => {
    expect(renderInlineError('text', 'server exploded')).toBe(
      '<p class="error">server exploded</p>',
    );
  });

  it('threads through suggest errors', () => {
    const [loading, seq] = beginSubmit(setStatementText(newSession(), '(f (g'));
    const state = applySuggestError(loading, seq, "unclosed '('", 3);
    expect(renderSuggestions(state)).toContain('<mark>(</mark>');
  });
});

describe('renderCompare', () => {
  it('shows both panels with elapsed times and isolates errors', () => {
    const base = setStatementText(newSession(), '(goal)');
    const [begun, seq] = beginCompare(base);
    let state = applyCompare(begun, 'forest', seq, { response: RESPONSE });
    state = applyCompare(state, 'knn', seq, { error: 'knn not loaded' });
    const html = renderCompare(state);
    expect(html).toContain('<h3>forest</h3>');
    expect(html).toContain('4.2 ms');
    expect(html).toContain('<h3>knn</h3>');
    expect(html).toContain('knn not loaded');
  });

  it('renders nothing before a comparison starts', () => {
    expect(renderCompare(newSession())).toBe('');
  });
});

describe('history and status', () => {
  it('lists accepted submissions with versions', () => {
    let state = setStatementText(newSession(), '(goal)');
    state = toggleSelection(state, 'p1');
    state = applyLearn(state, 6);
    expect(renderHistory(state)).toMatchInlineSnapshot(
      `"<ul class="history"><li><code>(goal)</code> &rarr; <code>p1</code> <span class="meta">(v6)</span></li></ul>"`,
    );
  });

  it('placeholder before anything is accepted', () => {
    expect(renderHistory(newSession())).toContain('nothing accepted yet');
  });

  it('status shows model and version; accept needs a selection', () => {
    const state = readyState();
    expect(renderStatus(state)).toContain('server version 3');
    expect(acceptEnabled(state)).toBe(false);
    expect(acceptEnabled(toggleSelection(state, 'mul_ne_zero'))).toBe(true);
  });
});
