/**
 * Outgoing command governor: a token bucket caps the aggregate rate while a
 * per-type latest-wins buffer coalesces bursts (dragging a gizmo produces
 * hundreds of target updates; only the newest matters).
 */
import type { CommandMessage } from "./protocol.js";

export class CommandRateLimiter {
  private tokens: number;
  private lastRefill: number;
  private pending = new Map<string, CommandMessage>();

  constructor(
    private readonly ratePerSec: number,
    private readonly burst: number = 6,
    private now: () => number = () => performance.now() / 1000,
  ) {
    this.tokens = burst;
    this.lastRefill = this.now();
  }

  /** Queue a command (latest per type wins) and return whatever is sendable now. */
  offer(cmd: CommandMessage): CommandMessage[] {
    this.pending.set(cmd.type, cmd);
    return this.flush();
  }

  /** Drain as many pending commands as the bucket allows. */
  flush(): CommandMessage[] {
    const t = this.now();
    this.tokens = Math.min(this.burst, this.tokens + (t - this.lastRefill) * this.ratePerSec);
    this.lastRefill = t;
    const out: CommandMessage[] = [];
    for (const [key, cmd] of this.pending) {
      if (this.tokens < 1) break;
      this.tokens -= 1;
      this.pending.delete(key);
      out.push(cmd);
    }
    return out;
  }

  pendingCount(): number {
    return this.pending.size;
  }
}
