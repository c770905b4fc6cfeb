import type { BuildingState } from "./types.js";

export interface PanelSnapshot {
  state: BuildingState | null;
  stale: boolean;
}

/**
 * Polls the building state on a fixed interval.
 *
 * A failed poll keeps the last-known state but lets the snapshot go stale
 * once no poll has succeeded within the staleness window.
 */
export class StatePoller {
  private timer: ReturnType<typeof setInterval> | null = null;
  private lastSuccessAt: number | null = null;
  private lastState: BuildingState | null = null;
  private inFlight = false;

  constructor(
    private readonly fetchState: () => Promise<BuildingState>,
    private readonly onUpdate: (snapshot: PanelSnapshot) => void,
    private readonly intervalMs = 2000,
    private readonly staleAfterMs = 5000,
    private readonly now: () => number = () => Date.now(),
  ) {}

  start(): void {
    if (this.timer !== null) return;
    void this.tick();
    this.timer = setInterval(() => void this.tick(), this.intervalMs);
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  async tick(): Promise<void> {
    if (this.inFlight) return;
    this.inFlight = true;
    try {
      const state = await this.fetchState();
      this.lastState = state;
      this.lastSuccessAt = this.now();
    } catch {
      // keep the last-known state; staleness surfaces the outage
    } finally {
      this.inFlight = false;
    }
    this.onUpdate(this.snapshot());
  }

  snapshot(): PanelSnapshot {
    const stale =
      this.lastSuccessAt === null || this.now() - this.lastSuccessAt > this.staleAfterMs;
    return { state: this.lastState, stale };
  }
}
