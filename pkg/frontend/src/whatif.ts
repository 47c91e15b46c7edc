import { ApiClient, ApiError, ClassDistribution, isValidAlpha } from "./api.js";

export interface WhatifCallbacks {
  /** New class shares for the slider's alpha. */
  onDistribution(distribution: ClassDistribution, alpha: number): void;
  /** Grid ids whose class differs from the served baseline; empty clears. */
  onHighlights(gridIds: ReadonlySet<number>): void;
  /** Server rejected the alpha; slider should snap back to `alpha`. */
  onRevert(alpha: number): void;
  onError(message: string): void;
}

/** Debounced what-if requests with latest-wins sequencing.
 *
 * Dragging the slider fires many values; only the most recent one may reach
 * the wire per debounce window, and only the most recent response may touch
 * the screen. Out-of-range values never leave the client.
 */
export class WhatifController {
  private timer: ReturnType<typeof setTimeout> | null = null;
  private seq = 0;
  private accepted: number;

  constructor(
    private readonly api: ApiClient,
    initialAlpha: number,
    private readonly callbacks: WhatifCallbacks,
    private readonly debounceMs = 150,
  ) {
    this.accepted = initialAlpha;
  }

  get lastAccepted(): number {
    return this.accepted;
  }

  request(alpha: number): void {
    if (!isValidAlpha(alpha)) {
      this.callbacks.onError(`alpha ${alpha} out of [0,1]`);
      this.callbacks.onRevert(this.accepted);
      return;
    }
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = setTimeout(() => {
      this.timer = null;
      void this.send(alpha);
    }, this.debounceMs);
  }

  private async send(alpha: number): Promise<void> {
    const ticket = ++this.seq;
    try {
      const response = await this.api.whatif(alpha);
      if (ticket !== this.seq) return; // superseded while in flight
      this.accepted = alpha;
      this.callbacks.onDistribution(response.distribution, response.alpha);
      this.callbacks.onHighlights(
        response.changed === 0
          ? new Set()
          : new Set(response.changes.map((c) => c.grid_id)),
      );
    } catch (err) {
      if (ticket !== this.seq) return;
      if (err instanceof ApiError && err.status === 400) {
        this.callbacks.onError(err.message);
        this.callbacks.onRevert(this.accepted);
      } else {
        this.callbacks.onError(err instanceof Error ? err.message : String(err));
      }
    }
  }
}
