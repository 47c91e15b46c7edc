import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { ClassDistribution, FetchInit, FetchLike } from "../src/api.js";

const here = dirname(fileURLToPath(import.meta.url));

export function fixture<T>(name: string): T {
  return JSON.parse(readFileSync(join(here, "fixtures", name), "utf8")) as T;
}

export function fixtureText(name: string): string {
  return readFileSync(join(here, "fixtures", name), "utf8");
}

export interface CannedResponse {
  status?: number;
  body: unknown;
}

export interface RecordedCall {
  url: string;
  init?: FetchInit;
}

export interface FakeFetch {
  fn: FetchLike;
  calls: RecordedCall[];
}

/** fetch stand-in: the handler maps a request to a canned response, possibly
 * a pending promise so tests can control response ordering. */
export function fakeFetch(
  handler: (url: string, init?: FetchInit) => CannedResponse | Promise<CannedResponse>,
): FakeFetch {
  const calls: RecordedCall[] = [];
  const fn: FetchLike = async (url, init) => {
    calls.push({ url, init });
    const canned = await handler(url, init);
    const status = canned.status ?? 200;
    return {
      ok: status >= 200 && status < 300,
      status,
      json: async () => canned.body,
    };
  };
  return { fn, calls };
}

export interface Deferred<T> {
  promise: Promise<T>;
  resolve: (value: T) => void;
}

export function deferred<T>(): Deferred<T> {
  let resolve!: (value: T) => void;
  const promise = new Promise<T>((r) => {
    resolve = r;
  });
  return { promise, resolve };
}

/** sweep.csv rows keyed by alpha, for comparing UI output to offline runs. */
export function parseSweepCsv(text: string): Map<number, ClassDistribution> {
  const lines = text.trim().split(/\r?\n/);
  const out = new Map<number, ClassDistribution>();
  for (const line of lines.slice(1)) {
    const parts = line.split(",").map(Number);
    const [alpha, lu, low, medium, high] = parts;
    if (parts.length !== 5 || parts.some(Number.isNaN)) {
      throw new Error(`bad sweep row: ${line}`);
    }
    out.set(alpha!, {
      largely_unsuitable_pct: lu!,
      low_pct: low!,
      medium_pct: medium!,
      high_pct: high!,
    });
  }
  return out;
}
