/**
 * One cockpit session: a single socket to the teleop service with
 * auto-reconnect, stale detection, and a validated, rate-limited command
 * path. Injection points (socket constructor, clock) keep it testable
 * outside the browser.
 */
import {
  clampCommand,
  commandMessageSchema,
  parseStateMessage,
  CommandLimits,
  CommandMessage,
  DEFAULT_LIMITS,
  StateMessage,
} from "./protocol.js";
import { CommandRateLimiter } from "./ratelimit.js";

export type SocketLike = {
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
};

export type SocketFactory = (url: string) => SocketLike;

export type SessionStatus = "connecting" | "open" | "closed";

export interface SessionOptions {
  socketFactory?: SocketFactory;
  limits?: CommandLimits;
  now?: () => number; // seconds
  staleAfter?: number; // seconds without a state frame
  reconnectMin?: number;
  reconnectMax?: number;
  schedule?: (fn: () => void, delayMs: number) => unknown;
}

export class CockpitSession {
  readonly url: string;
  status: SessionStatus = "connecting";
  latest: StateMessage | null = null;
  controller: "proposed" | "baseline" = "proposed";
  onState: ((s: StateMessage) => void) | null = null;
  onError: ((detail: string) => void) | null = null;

  /** every frame the session actually wrote to the socket (test hook) */
  readonly sentLog: CommandMessage[] = [];

  private sock: SocketLike | null = null;
  private readonly makeSocket: SocketFactory;
  private readonly limits: CommandLimits;
  private readonly now: () => number;
  private readonly staleAfter: number;
  private readonly schedule: (fn: () => void, delayMs: number) => unknown;
  private readonly schema;
  private limiter: CommandRateLimiter;
  private lastFrameAt = -Infinity;
  private backoff: number;
  private readonly backoffMin: number;
  private readonly backoffMax: number;
  private closedByUser = false;

  constructor(url: string, opts: SessionOptions = {}) {
    this.url = url;
    this.makeSocket = opts.socketFactory
      ?? ((u: string) => new WebSocket(u) as unknown as SocketLike);
    this.limits = opts.limits ?? DEFAULT_LIMITS;
    this.now = opts.now ?? (() => performance.now() / 1000);
    this.staleAfter = opts.staleAfter ?? 0.5;
    this.schedule = opts.schedule ?? ((fn, ms) => setTimeout(fn, ms));
    this.schema = commandMessageSchema(this.limits);
    this.limiter = new CommandRateLimiter(this.limits.command_rate_max_hz, 6, this.now);
    this.backoffMin = opts.reconnectMin ?? 0.5;
    this.backoffMax = opts.reconnectMax ?? 5.0;
    this.backoff = this.backoffMin;
  }

  connect(): void {
    this.closedByUser = false;
    this.status = "connecting";
    const sock = this.makeSocket(this.url);
    this.sock = sock;
    sock.onopen = () => {
      this.status = "open";
      this.backoff = this.backoffMin;
    };
    sock.onmessage = (ev) => {
      if (typeof ev.data !== "string") return;
      const state = parseStateMessage(ev.data);
      if (state !== null) {
        this.latest = state;
        this.lastFrameAt = this.now();
        this.onState?.(state);
        return;
      }
      try {
        const raw = JSON.parse(ev.data);
        if (raw && raw.type === "error" && this.onError) this.onError(String(raw.detail));
      } catch {
        /* ignore unparseable frames */
      }
    };
    const onDown = () => {
      if (this.status === "closed") return;
      this.status = "closed";
      this.sock = null;
      if (!this.closedByUser) {
        const delay = this.backoff;
        this.backoff = Math.min(this.backoffMax, this.backoff * 2);
        this.schedule(() => this.connect(), delay * 1000);
      }
    };
    sock.onclose = onDown;
    sock.onerror = onDown;
  }

  close(): void {
    this.closedByUser = true;
    this.sock?.close();
    this.status = "closed";
  }

  /** Seconds-stale flag: no state frame for longer than the threshold. */
  isStale(): boolean {
    return this.now() - this.lastFrameAt > this.staleAfter;
  }

  /**
   * Clamp, validate, rate-limit, and send. Returns true when the command was
   * accepted into the pipeline (it may still be coalesced away by a newer
   * command of the same type before the bucket allows it out).
   */
  send(cmd: CommandMessage): boolean {
    const clamped = clampCommand(cmd, this.limits);
    if (clamped === null) return false;
    if (cmd.type === "controller_select") this.controller = cmd.value as "proposed" | "baseline";
    for (const out of this.limiter.offer(clamped)) this.writeFrame(out);
    return true;
  }

  /** Push out anything the rate limiter has released since the last call. */
  pump(): void {
    for (const out of this.limiter.flush()) this.writeFrame(out);
  }

  private writeFrame(cmd: CommandMessage): void {
    // final guard: nothing schema-invalid ever reaches the wire
    const checked = this.schema.safeParse(cmd);
    if (!checked.success) return;
    this.sentLog.push(cmd);
    if (this.sentLog.length > 256) this.sentLog.splice(0, this.sentLog.length - 256);
    if (this.sock !== null && this.status === "open") {
      this.sock.send(JSON.stringify(cmd));
    }
  }
}
