import { describe, expect, it } from 'vitest';

import { ApiClient, ApiError } from '../src/api.js';

type Call = { url: string; init?: RequestInit };

function fakeFetch(status: number, body: unknown) {
  const calls: Call[] = [];
  const fn = async (url: string, init?: RequestInit): Promise<Response> => {
    calls.push({ url, init });
    return new Response(JSON.stringify(body), {
      status,
      headers: { 'Content-Type': 'application/json' },
    });
  };
  return { fn, calls };
}

describe('ApiClient', () => {
  it('posts suggest requests and decodes responses', async () => {
    const payload = {
      suggestions: [{ name: 'a', score: 1, action_hint: 'a' }],
      model_version: 2,
      elapsed: 0.01,
    };
    const { fn, calls } = fakeFetch(200, payload);
    const client = new ApiClient('http://svc:1', fn);
    const resp = await client.suggest({ features: ['T:a'], model: 'knn' });
    expect(resp).toEqual(payload);
    expect(calls[0]?.url).toBe('http://svc:1/suggest');
    expect(JSON.parse(String(calls[0]?.init?.body))).toEqual({
      features: ['T:a'],
      model: 'knn',
    });
  });

  it('raises ApiError with the failing position', async () => {
    const { fn } = fakeFetch(400, { detail: { error: "unclosed '('", position: 3 } });
    const client = new ApiClient('http://svc:1', fn);
    const err = await client.suggest({ features: ['T:a'], model: 'knn' }).catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(400);
    expect(err.message).toBe("unclosed '('");
    expect(err.position).toBe(3);
  });

  it('flattens validation-list errors to their first message', async () => {
    const { fn } = fakeFetch(422, {
      detail: [{ msg: "Value error, provide exactly one of 'statement' or 'features'" }],
    });
    const client = new ApiClient('http://svc:1', fn);
    const err = await client.learn({ premises: ['p'] }).catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.message).toContain('exactly one');
    expect(err.position).toBeUndefined();
  });

  it('fetches health', async () => {
    const { fn, calls } = fakeFetch(200, { status: 'ok', model_version: 9, models: {} });
    const client = new ApiClient('http://svc:1', fn);
    const health = await client.health();
    expect(health.model_version).toBe(9);
    expect(calls[0]?.url).toBe('http://svc:1/health');
  });
});
