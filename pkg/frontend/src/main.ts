/**
 * Browser entry point: connects to the teleop service (ws://host/ws by
 * default, override with ?server=host:port), renders the avatar, and maps
 * operator inputs to validated commands.
 */
import * as THREE from "three";
import { OrbitControls } from "three/examples/jsm/controls/OrbitControls.js";
import { TransformControls } from "three/examples/jsm/controls/TransformControls.js";

import { TelemetryStrips } from "./charts.js";
import { KinematicsAsset } from "./fk.js";
import { gamepadToCommands, gizmoToCommand, keysToCommands, sliderToCommand,
         viewToHeadCommand, KeyState } from "./input.js";
import { DEFAULT_LIMITS, StateMessage } from "./protocol.js";
import { buildScene, updateScene } from "./scene.js";
import { CockpitSession } from "./session.js";

function serverBase(): string {
  const q = new URLSearchParams(window.location.search).get("server");
  return q ?? window.location.host;
}

async function loadAsset(base: string): Promise<KinematicsAsset> {
  // prefer the live service (single source of truth), fall back to the
  // build-time asset copy
  try {
    const r = await fetch(`http://${base}/api/kinematics`);
    if (r.ok) return (await r.json()) as KinematicsAsset;
  } catch {
    /* fall through */
  }
  const r = await fetch("./assets/kinematics.json");
  return (await r.json()) as KinematicsAsset;
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

async function start(): Promise<void> {
  const base = serverBase();
  const asset = await loadAsset(base);
  const limits = { ...DEFAULT_LIMITS, ...(asset.command_limits as object) };

  const session = new CockpitSession(`ws://${base}/ws`, { limits });
  session.connect();

  // ---- renderer -----------------------------------------------------------
  const viewport = el<HTMLDivElement>("viewport");
  const renderer = new THREE.WebGLRenderer({ antialias: true });
  renderer.setSize(viewport.clientWidth, viewport.clientHeight);
  viewport.appendChild(renderer.domElement);

  const camera = new THREE.PerspectiveCamera(
    50, viewport.clientWidth / viewport.clientHeight, 0.01, 50);
  camera.up.set(0, 0, 1);
  camera.position.set(1.8, -1.8, 0.6);
  const orbit = new OrbitControls(camera, renderer.domElement);
  orbit.target.set(0, 0, -0.2);

  const avatar = buildScene(asset);

  // ---- hand target gizmos -------------------------------------------------
  const gizmos: TransformControls[] = [];
  (["left", "right"] as const).forEach((side) => {
    const target = side === "left" ? avatar.targetLeft : avatar.targetRight;
    target.position.set(0.25, side === "left" ? 0.25 : -0.25, -0.35);
    const tc = new TransformControls(camera, renderer.domElement);
    tc.attach(target);
    tc.setSize(0.5);
    tc.addEventListener("dragging-changed", (ev: { value: unknown }) => {
      orbit.enabled = !(ev.value as boolean);
    });
    tc.addEventListener("objectChange", () => {
      const p = target.position;
      session.send(gizmoToCommand(side, [p.x, p.y, p.z]));
    });
    avatar.scene.add(tc.getHelper());
    gizmos.push(tc);
  });

  // ---- telemetry strips ---------------------------------------------------
  const strips = new TelemetryStrips(
    el("chart-att"), el("chart-pos"), el("sidebar").clientWidth - 16);

  const banner = el<HTMLDivElement>("banner");
  const hud = el<HTMLDivElement>("hud");
  session.onState = (s: StateMessage) => {
    strips.push(s);
  };
  session.onError = (detail) => {
    hud.textContent = `service: ${detail}`;
    window.setTimeout(() => (hud.textContent = ""), 3000);
  };

  // ---- keyboard -----------------------------------------------------------
  const keys: KeyState = { up: false, down: false, left: false, right: false };
  const keymap: Record<string, keyof KeyState> = {
    KeyW: "up", KeyS: "down", KeyA: "left", KeyD: "right",
  };
  window.addEventListener("keydown", (ev) => {
    const k = keymap[ev.code];
    if (k) keys[k] = true;
  });
  window.addEventListener("keyup", (ev) => {
    const k = keymap[ev.code];
    if (k) keys[k] = false;
  });

  // ---- sliders and toggles ------------------------------------------------
  (["left", "right"] as const).forEach((side) => {
    const slider = el<HTMLInputElement>(`closure-${side}`);
    slider.addEventListener("input", () => {
      session.send(sliderToCommand(side, Number(slider.value)));
    });
  });
  const controllerBtn = el<HTMLButtonElement>("controller");
  controllerBtn.addEventListener("click", () => {
    const next = session.controller === "proposed" ? "baseline" : "proposed";
    session.send({ type: "controller_select", value: next });
    controllerBtn.textContent = `controller: ${next}`;
  });
  const headFollow = el<HTMLInputElement>("head-follow");

  // ---- input loop at 10 Hz ------------------------------------------------
  let yawActive = false;
  let padYawActive = false;
  window.setInterval(() => {
    const { commands, yawActive: ya } = keysToCommands(keys, yawActive);
    yawActive = ya;
    commands.forEach((c) => session.send(c));
    const pad = navigator.getGamepads?.()[0];
    if (pad) {
      const mapped = gamepadToCommands(
        {
          leftStickY: pad.axes[1] ?? 0,
          rightStickX: pad.axes[2] ?? 0,
          leftTrigger: pad.buttons[6]?.value ?? 0,
          rightTrigger: pad.buttons[7]?.value ?? 0,
        },
        padYawActive,
      );
      padYawActive = mapped.yawActive;
      mapped.commands.forEach((c) => session.send(c));
    }
    if (headFollow.checked) {
      const az = Math.atan2(
        orbit.target.y - camera.position.y, orbit.target.x - camera.position.x);
      const horiz = Math.hypot(
        orbit.target.x - camera.position.x, orbit.target.y - camera.position.y);
      const elev = Math.atan2(orbit.target.z - camera.position.z, horiz);
      session.send(viewToHeadCommand(az, elev));
    }
    session.pump();
  }, 100);

  // ---- render loop --------------------------------------------------------
  function frame(): void {
    requestAnimationFrame(frame);
    orbit.update();
    if (session.latest) updateScene(avatar, asset, session.latest);
    banner.style.display = session.isStale() ? "block" : "none";
    renderer.render(avatar.scene, camera);
  }
  frame();

  window.addEventListener("resize", () => {
    renderer.setSize(viewport.clientWidth, viewport.clientHeight);
    camera.aspect = viewport.clientWidth / viewport.clientHeight;
    camera.updateProjectionMatrix();
  });
}

start().catch((err) => {
  document.body.textContent = `cockpit failed to start: ${err}`;
});
