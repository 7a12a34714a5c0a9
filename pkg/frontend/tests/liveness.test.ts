/**
 * Cockpit liveness against the real teleoperation service: spawns
 * `samadyn serve`, connects through the cockpit session (node 'ws' standing
 * in for the browser WebSocket), and checks the broadcast rate, yaw-command
 * response direction, and that every emitted frame satisfies the shared
 * schema.
 */
import { spawn, ChildProcess } from "node:child_process";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import WebSocket from "ws";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { commandMessageSchema, DEFAULT_LIMITS, StateMessage } from "../src/protocol.js";
import { CockpitSession, SocketLike } from "../src/session.js";

const here = dirname(fileURLToPath(import.meta.url));
const repo = join(here, "..", "..");
const PORT = 8761;

let service: ChildProcess | null = null;
let available = false;

async function healthy(): Promise<boolean> {
  try {
    const r = await fetch(`http://127.0.0.1:${PORT}/health`);
    return r.ok;
  } catch {
    return false;
  }
}

beforeAll(async () => {
  service = spawn(
    "python3",
    ["-m", "samadyn.cli", "serve", "--port", String(PORT),
     "--params", join(repo, "params", "default.json")],
    { cwd: repo, stdio: "ignore" },
  );
  for (let i = 0; i < 60; i++) {
    if (await healthy()) {
      available = true;
      return;
    }
    await new Promise((r) => setTimeout(r, 250));
  }
}, 20000);

afterAll(() => {
  service?.kill("SIGINT");
});

const wsFactory = (url: string) => new WebSocket(url) as unknown as SocketLike;

function connectSession(): Promise<CockpitSession> {
  const session = new CockpitSession(`ws://127.0.0.1:${PORT}/ws`, {
    socketFactory: wsFactory,
    now: () => Date.now() / 1000,
  });
  session.connect();
  return new Promise((resolve, reject) => {
    const t0 = Date.now();
    const poll = setInterval(() => {
      if (session.latest !== null) {
        clearInterval(poll);
        resolve(session);
      } else if (Date.now() - t0 > 5000) {
        clearInterval(poll);
        reject(new Error("no state received"));
      }
    }, 10);
  });
}

describe("cockpit liveness against the live service", () => {
  it("receives at least 30 state frames within 1.05 s", async () => {
    expect(available, "service failed to start").toBe(true);
    const session = await connectSession();
    let count = 0;
    session.onState = () => count++;
    await new Promise((r) => setTimeout(r, 1050));
    session.close();
    expect(count).toBeGreaterThanOrEqual(30);
  }, 15000);

  it("yaw command turns the rendered heading in the commanded direction", async () => {
    expect(available).toBe(true);
    const session = await connectSession();
    const psi0 = session.latest!.Phi[2];
    session.send({ type: "yaw_rate", value: 0.3 });
    await new Promise((r) => setTimeout(r, 500));
    const psi1 = session.latest!.Phi[2];
    session.send({ type: "yaw_rate", value: 0 });
    session.close();
    expect(psi1).toBeGreaterThan(psi0 + 0.005);
    // every frame the session emitted satisfies the shared schema
    const schema = commandMessageSchema(DEFAULT_LIMITS);
    expect(session.sentLog.length).toBeGreaterThan(0);
    for (const frame of session.sentLog) {
      expect(schema.safeParse(frame).success).toBe(true);
    }
  }, 15000);

  it("stale flag clears while frames stream", async () => {
    expect(available).toBe(true);
    const session = await connectSession();
    await new Promise((r) => setTimeout(r, 100));
    expect(session.isStale()).toBe(false);
    const last: StateMessage = session.latest!;
    expect(last.q_lb).toHaveLength(12);
    session.close();
  }, 15000);
});
