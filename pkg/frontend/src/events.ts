// FIFO interaction-event recorder. Timestamps are captured when the event
// happens, not when it reaches the service, so dwell analysis stays accurate
// even when posts are buffered and retried after transient failures.

import { ApiClient } from "./api.js";

export interface RecordedEvent {
  ts: number;
  event: string;
}

export class EventQueue {
  private queue: RecordedEvent[] = [];
  private pumping = false;
  private retryTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private api: ApiClient,
    private retryMs = 2000,
    private now: () => number = () => Date.now(),
  ) {}

  record(event: string): void {
    this.queue.push({ ts: this.now(), event });
    void this.pump();
  }

  get pending(): number {
    return this.queue.length;
  }

  async pump(): Promise<void> {
    if (this.pumping || this.queue.length === 0) {
      return;
    }
    this.pumping = true;
    try {
      while (this.queue.length > 0) {
        const batch = this.queue.slice();
        await this.api.postEvents(batch);
        this.queue.splice(0, batch.length);
      }
      if (this.retryTimer !== null) {
        clearTimeout(this.retryTimer);
        this.retryTimer = null;
      }
    } catch {
      // transient failure: keep the buffer intact and retry in order later
      if (this.retryTimer === null) {
        this.retryTimer = setTimeout(() => {
          this.retryTimer = null;
          void this.pump();
        }, this.retryMs);
      }
    } finally {
      this.pumping = false;
    }
  }

  /** Drain the queue now; resolves once everything buffered has been accepted. */
  async flush(attempts = 50): Promise<void> {
    for (let i = 0; i < attempts && this.queue.length > 0; i++) {
      await this.pump();
      if (this.queue.length > 0) {
        await new Promise((resolve) => setTimeout(resolve, this.retryMs));
      }
    }
    if (this.queue.length > 0) {
      throw new Error(`event queue did not drain: ${this.queue.length} left`);
    }
  }
}
