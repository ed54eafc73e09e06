/** Periodic polling with backoff and a stale flag for unreachable services. */

export interface PollerOptions {
  intervalMs?: number; // steady-state cadence
  maxBackoffMs?: number;
}

export class Poller {
  private timer: ReturnType<typeof setTimeout> | null = null;
  private backoff: number;
  private readonly interval: number;
  private readonly maxBackoff: number;
  stale = false;

  constructor(
    private readonly tick: () => Promise<void>,
    private readonly onStaleChange: (stale: boolean) => void = () => {},
    options: PollerOptions = {},
  ) {
    this.interval = options.intervalMs ?? 1000;
    this.maxBackoff = options.maxBackoffMs ?? 8000;
    this.backoff = this.interval;
  }

  start(): void {
    if (this.timer === null) {
      void this.step();
    }
  }

  stop(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
  }

  private async step(): Promise<void> {
    let delay: number;
    try {
      await this.tick();
      delay = this.interval;
      this.backoff = this.interval;
      this.setStale(false);
    } catch {
      // unreachable service: flag it and retry with growing gaps
      this.setStale(true);
      this.backoff = Math.min(this.backoff * 2, this.maxBackoff);
      delay = this.backoff;
    }
    this.timer = setTimeout(() => void this.step(), delay);
  }

  private setStale(stale: boolean): void {
    if (stale !== this.stale) {
      this.stale = stale;
      this.onStaleChange(stale);
    }
  }
}
