// Fixture replay: a fetch stand-in that serves recorded API responses.

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { FetchLike } from "../src/api.js";

const FIXTURE_DIR = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

export function fixture<T = Record<string, unknown>>(name: string): T {
  return JSON.parse(readFileSync(join(FIXTURE_DIR, name), "utf8")) as T;
}

export function fixtureText(name: string): string {
  return readFileSync(join(FIXTURE_DIR, name), "utf8");
}

export interface RouteReply {
  status?: number;
  body: unknown;
}

export type RouteHandler = RouteReply | ((init?: RequestInit) => RouteReply);

/** Routes are "METHOD path" keys; unknown routes fail the test loudly. */
export function replayFetch(routes: Record<string, RouteHandler>): FetchLike & {
  calls: string[];
} {
  const calls: string[] = [];
  const impl = (async (input: string, init?: RequestInit) => {
    const method = init?.method ?? "GET";
    const key = `${method} ${input}`;
    calls.push(key);
    const handler = routes[key];
    if (handler === undefined) {
      throw new Error(`no recorded fixture for: ${key}`);
    }
    const reply = typeof handler === "function" ? handler(init) : handler;
    const status = reply.status ?? 200;
    return {
      ok: status >= 200 && status < 300,
      status,
      json: async () => reply.body,
    } as unknown as Response;
  }) as FetchLike & { calls: string[] };
  impl.calls = calls;
  return impl;
}

export function mount(): HTMLElement {
  document.body.innerHTML = "";
  const root = document.createElement("div");
  document.body.appendChild(root);
  return root;
}

export async function flushTasks(): Promise<void> {
  // settle chained promises from event handlers
  for (let i = 0; i < 12; i += 1) {
    await Promise.resolve();
  }
}
