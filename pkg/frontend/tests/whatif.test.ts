import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { ApiClient, ClassDistribution, WhatifResponse } from "../src/api.js";
import { WhatifController, WhatifCallbacks } from "../src/whatif.js";
import { CannedResponse, deferred, fakeFetch, fixture, fixtureText, parseSweepCsv } from "./helpers.js";

const AT_BASE = fixture<WhatifResponse>("whatif_0.9.json"); // server's own alpha
const AT_ZERO = fixture<WhatifResponse>("whatif_0.0.json");
const AT_ONE = fixture<WhatifResponse>("whatif_1.0.json");

interface Recorded {
  distributions: Array<{ distribution: ClassDistribution; alpha: number }>;
  highlights: Array<ReadonlySet<number>>;
  reverts: number[];
  errors: string[];
}

function recordingCallbacks(): { callbacks: WhatifCallbacks; seen: Recorded } {
  const seen: Recorded = { distributions: [], highlights: [], reverts: [], errors: [] };
  return {
    seen,
    callbacks: {
      onDistribution: (distribution, alpha) => seen.distributions.push({ distribution, alpha }),
      onHighlights: (ids) => seen.highlights.push(ids),
      onRevert: (alpha) => seen.reverts.push(alpha),
      onError: (message) => seen.errors.push(message),
    },
  };
}

function controllerWith(
  handler: (body: string | undefined) => CannedResponse | Promise<CannedResponse>,
): { controller: WhatifController; seen: Recorded; calls: { length: number } } {
  const { fn, calls } = fakeFetch((_url, init) => handler(init?.body));
  const { callbacks, seen } = recordingCallbacks();
  const controller = new WhatifController(new ApiClient("http://svc", fn), 0.9, callbacks);
  return { controller, seen, calls };
}

function respondByAlpha(body: string | undefined): CannedResponse {
  const alpha = (JSON.parse(body ?? "{}") as { alpha: number }).alpha;
  if (alpha === 0) return { body: AT_ZERO };
  if (alpha === 1) return { body: AT_ONE };
  return { body: AT_BASE };
}

beforeEach(() => {
  vi.useFakeTimers();
});

afterEach(() => {
  vi.useRealTimers();
});

describe("WhatifController", () => {
  it("debounces a slider drag down to one request", async () => {
    const { controller, calls } = controllerWith(respondByAlpha);
    controller.request(0.3);
    vi.advanceTimersByTime(100);
    controller.request(0.6);
    vi.advanceTimersByTime(100);
    controller.request(0.9);
    expect(calls.length).toBe(0); // still inside the debounce window
    await vi.advanceTimersByTimeAsync(150);
    expect(calls.length).toBe(1);
  });

  it("highlights nothing when the slider sits at the server's alpha", async () => {
    const { controller, seen } = controllerWith(respondByAlpha);
    controller.request(0.9);
    await vi.advanceTimersByTimeAsync(150);
    expect(seen.highlights).toHaveLength(1);
    expect(seen.highlights[0]!.size).toBe(0);
    expect(seen.errors).toEqual([]);
  });

  it("reports the offline sweep's distribution at the extremes", async () => {
    const sweep = parseSweepCsv(fixtureText("golden_sweep.csv"));
    const { controller, seen } = controllerWith(respondByAlpha);

    controller.request(1);
    await vi.advanceTimersByTimeAsync(150);
    controller.request(0);
    await vi.advanceTimersByTimeAsync(150);

    expect(seen.distributions).toHaveLength(2);
    expect(seen.distributions[0]!.distribution).toEqual(sweep.get(1));
    expect(seen.distributions[1]!.distribution).toEqual(sweep.get(0));
    // alpha=1 reclassifies cells on this fixture, so highlights are non-empty
    expect(seen.highlights[0]!.size).toBe(AT_ONE.changed);
    expect(AT_ONE.changed).toBeGreaterThan(0);
  });

  it("rejects out-of-range alphas client-side and snaps back", async () => {
    const { controller, seen, calls } = controllerWith(respondByAlpha);
    controller.request(1.7);
    await vi.advanceTimersByTimeAsync(1000);
    expect(calls.length).toBe(0);
    expect(seen.errors).toEqual(["alpha 1.7 out of [0,1]"]);
    expect(seen.reverts).toEqual([0.9]);
  });

  it("snaps back to the last accepted alpha on a server 400", async () => {
    let reject = false;
    const { controller, seen } = controllerWith((body) => {
      if (reject) return { status: 400, body: { error: "alpha rejected" } };
      return respondByAlpha(body);
    });

    controller.request(0.5);
    await vi.advanceTimersByTimeAsync(150);
    reject = true;
    controller.request(0.8);
    await vi.advanceTimersByTimeAsync(150);

    expect(seen.errors).toEqual(["alpha rejected"]);
    expect(seen.reverts).toEqual([0.5]); // the last alpha the server accepted
    expect(controller.lastAccepted).toBe(0.5);
  });

  it("discards a stale response when a newer one already landed", async () => {
    const slow = deferred<CannedResponse>();
    let first = true;
    const { controller, seen } = controllerWith((body) => {
      if (first) {
        first = false;
        return slow.promise;
      }
      return respondByAlpha(body);
    });

    controller.request(0.2); // will stall in flight
    await vi.advanceTimersByTimeAsync(150);
    controller.request(1); // overtakes
    await vi.advanceTimersByTimeAsync(150);
    slow.resolve({ body: AT_BASE });
    await vi.advanceTimersByTimeAsync(0);

    expect(seen.distributions).toHaveLength(1);
    expect(seen.distributions[0]!.alpha).toBe(1);
    expect(controller.lastAccepted).toBe(1);
  });
});
