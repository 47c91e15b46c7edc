import { ApiClient, ApiError, Breakdown } from "./api.js";

const RAW_TO_SCORE = 100.0 / 90.0; // rule weights sum to 90, scores live on 0..100

/** How far the panel's own arithmetic lands from the served blended score:
 * sum the rule contributions, rescale to 0..100, blend with m at `alpha`.
 * Excluded cells are pinned to 0, so there the check is just |x|. */
export function reconcile(breakdown: Breakdown, alpha: number): number {
  if (breakdown.exclusion_reasons.length > 0) {
    return Math.abs(breakdown.x);
  }
  let rawSum = 0;
  for (const rule of breakdown.rules) rawSum += rule.contribution;
  const blended = alpha * (rawSum * RAW_TO_SCORE) + (1 - alpha) * breakdown.m;
  return Math.abs(blended - breakdown.x);
}

export type BreakdownView =
  | { kind: "empty" }
  | { kind: "loading"; gridId: number }
  | { kind: "loaded"; data: Breakdown; reconciliation: number }
  | { kind: "not_found"; gridId: number }
  | { kind: "error"; message: string };

/** Fetches and exposes one cell's rubric sheet. Rapid reselects race their
 * responses; a sequence number makes the last click win regardless of
 * response order. */
export class BreakdownPanel {
  private seq = 0;
  view: BreakdownView = { kind: "empty" };

  constructor(
    private readonly api: ApiClient,
    private readonly alphaNow: () => number,
    private readonly onRender: (view: BreakdownView) => void = () => {},
  ) {}

  private show(view: BreakdownView): void {
    this.view = view;
    this.onRender(view);
  }

  async select(gridId: number): Promise<void> {
    const ticket = ++this.seq;
    this.show({ kind: "loading", gridId });
    let next: BreakdownView;
    try {
      const data = await this.api.breakdown(gridId);
      next = { kind: "loaded", data, reconciliation: reconcile(data, this.alphaNow()) };
    } catch (err) {
      if (err instanceof ApiError && err.status === 404) {
        next = { kind: "not_found", gridId };
      } else {
        next = { kind: "error", message: err instanceof Error ? err.message : String(err) };
      }
    }
    if (ticket !== this.seq) return; // a newer click superseded this one
    this.show(next);
  }

  clear(): void {
    this.seq += 1;
    this.show({ kind: "empty" });
  }
}
