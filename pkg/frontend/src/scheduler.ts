/**
 * Latest-wins render scheduling and FIFO edit submission.
 *
 * At most one render request is in flight; newer requests replace any
 * queued one, and a response is displayed only if its sequence number
 * exceeds that of the frame currently shown, so rapid scrubbing can never
 * leave a stale frame on screen.
 */

export class RenderScheduler<T> {
  private nextSeq = 0;
  private displayedSeq = -1;
  private inFlight = false;
  private queued: (() => Promise<T>) | null = null;

  constructor(private onDisplay: (result: T, seq: number) => void) {}

  get pending(): boolean {
    return this.inFlight || this.queued !== null;
  }

  get displayedSequence(): number {
    return this.displayedSeq;
  }

  request(render: () => Promise<T>): void {
    if (this.inFlight) {
      this.queued = render; // replaces any older queued request
      return;
    }
    void this.launch(render);
  }

  private async launch(render: () => Promise<T>): Promise<void> {
    const seq = this.nextSeq++;
    this.inFlight = true;
    try {
      const result = await render();
      if (seq > this.displayedSeq) {
        this.displayedSeq = seq;
        this.onDisplay(result, seq);
      }
    } catch {
      // a failed render keeps the previous frame; the next request recovers
    } finally {
      this.inFlight = false;
      const queued = this.queued;
      this.queued = null;
      if (queued) void this.launch(queued);
    }
  }
}

/** Serializes mutations: each submitted task starts after the previous one. */
export class EditQueue {
  private tail: Promise<unknown> = Promise.resolve();

  submit<T>(task: () => Promise<T>): Promise<T> {
    const next = this.tail.then(task, task);
    this.tail = next.catch(() => undefined);
    return next;
  }
}
