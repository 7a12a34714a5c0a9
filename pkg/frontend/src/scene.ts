/**
 * Three.js scene of the avatar: hexacopter body with rotor disks, the
 * suspension rod and tether line, both tendon-arm chains and the head
 * (rendered from q_lb through the shared DH tables), CoM marker, and rig
 * clamp indicator. updateScene is a pure function of the latest state
 * message plus scene handles: the same message always produces the same
 * transforms.
 */
import * as THREE from "three";

import { torsoPoints, KinematicsAsset } from "./fk.js";
import type { StateMessage } from "./protocol.js";

export interface AvatarScene {
  scene: THREE.Scene;
  body: THREE.Group;
  leftArm: THREE.Line;
  rightArm: THREE.Line;
  headChain: THREE.Line;
  leftHand: THREE.Mesh;
  rightHand: THREE.Mesh;
  comMarker: THREE.Mesh;
  tetherLine: THREE.Line;
  clampRing: THREE.Mesh;
  targetLeft: THREE.Mesh;
  targetRight: THREE.Mesh;
  anchor: THREE.Vector3;
}

function lineOf(points: number, color: number, width = 1): THREE.Line {
  const geo = new THREE.BufferGeometry();
  geo.setAttribute("position", new THREE.BufferAttribute(new Float32Array(points * 3), 3));
  return new THREE.Line(geo, new THREE.LineBasicMaterial({ color, linewidth: width }));
}

function setLine(line: THREE.Line, pts: [number, number, number][]): void {
  const attr = line.geometry.getAttribute("position") as THREE.BufferAttribute;
  for (let i = 0; i < pts.length; i++) attr.setXYZ(i, pts[i][0], pts[i][1], pts[i][2]);
  attr.needsUpdate = true;
  line.geometry.computeBoundingSphere();
}

export function buildScene(asset: KinematicsAsset): AvatarScene {
  const scene = new THREE.Scene();
  scene.background = new THREE.Color(0x10131a);
  scene.add(new THREE.AmbientLight(0xffffff, 0.7));
  const sun = new THREE.DirectionalLight(0xffffff, 1.2);
  sun.position.set(2, 1, 3);
  scene.add(sun);
  scene.add(new THREE.GridHelper(3, 30, 0x334, 0x223));

  const body = new THREE.Group();

  const hull = new THREE.Mesh(
    new THREE.BoxGeometry(0.5, 0.5, 0.12),
    new THREE.MeshStandardMaterial({ color: 0x8899aa, metalness: 0.4, roughness: 0.5 }),
  );
  body.add(hull);

  const rotorMat = new THREE.MeshStandardMaterial({
    color: 0x222933, transparent: true, opacity: 0.65,
  });
  for (let i = 0; i < 6; i++) {
    const a = (i / 6) * 2 * Math.PI + Math.PI / 6;
    const rotor = new THREE.Mesh(new THREE.CylinderGeometry(0.16, 0.16, 0.01, 24), rotorMat);
    rotor.rotation.x = Math.PI / 2; // disk normal along body z
    rotor.position.set(0.55 * Math.cos(a), 0.55 * Math.sin(a), 0.05);
    body.add(rotor);
    const boom = new THREE.Mesh(
      new THREE.CylinderGeometry(0.012, 0.012, 0.55, 8),
      new THREE.MeshStandardMaterial({ color: 0x556070 }),
    );
    boom.rotation.z = a + Math.PI / 2;
    boom.position.set(0.275 * Math.cos(a), 0.275 * Math.sin(a), 0.02);
    body.add(boom);
  }

  const rod = new THREE.Mesh(
    new THREE.CylinderGeometry(0.015, 0.015, 0.8, 12),
    new THREE.MeshStandardMaterial({ color: 0xb0a060 }),
  );
  rod.rotation.x = Math.PI / 2;
  rod.position.set(0, 0, 0.4);
  body.add(rod);

  const armMatL = 0x4fc3f7;
  const armMatR = 0xffb74d;
  const leftArm = lineOf(6, armMatL, 2);
  const rightArm = lineOf(6, armMatR, 2);
  const headChain = lineOf(3, 0xba68c8, 2);
  body.add(leftArm, rightArm, headChain);

  const handGeo = new THREE.SphereGeometry(0.03, 16, 12);
  const leftHand = new THREE.Mesh(handGeo, new THREE.MeshStandardMaterial({ color: armMatL }));
  const rightHand = new THREE.Mesh(handGeo, new THREE.MeshStandardMaterial({ color: armMatR }));
  body.add(leftHand, rightHand);

  const comMarker = new THREE.Mesh(
    new THREE.SphereGeometry(0.02, 16, 12),
    new THREE.MeshStandardMaterial({ color: 0xef5350 }),
  );
  body.add(comMarker);

  const clampRing = new THREE.Mesh(
    new THREE.TorusGeometry(0.72, 0.015, 8, 48),
    new THREE.MeshBasicMaterial({ color: 0x2e7d32 }),
  );
  body.add(clampRing);

  const targetGeo = new THREE.SphereGeometry(0.022, 12, 10);
  const targetLeft = new THREE.Mesh(
    targetGeo, new THREE.MeshBasicMaterial({ color: armMatL, wireframe: true }));
  const targetRight = new THREE.Mesh(
    targetGeo, new THREE.MeshBasicMaterial({ color: armMatR, wireframe: true }));
  body.add(targetLeft, targetRight);

  const tetherLine = lineOf(2, 0xcccccc);
  scene.add(tetherLine);
  scene.add(body);

  const anchor = new THREE.Vector3(0, 0, asset.tether_attach_height + 1.0);
  return {
    scene, body, leftArm, rightArm, headChain, leftHand, rightHand,
    comMarker, tetherLine, clampRing, targetLeft, targetRight, anchor,
  };
}

/** Z-Y-X (yaw-pitch-roll) Euler angles onto a three.js object. */
export function applyBodyPose(obj: THREE.Object3D, p: number[], Phi: number[]): void {
  obj.position.set(p[0], p[1], p[2]);
  obj.setRotationFromEuler(new THREE.Euler(Phi[0], Phi[1], Phi[2], "ZYX"));
}

export function updateScene(av: AvatarScene, asset: KinematicsAsset, state: StateMessage): void {
  applyBodyPose(av.body, state.p, state.Phi);

  const chains = torsoPoints(asset, state.q_lb);
  setLine(av.leftArm, chains.left);
  setLine(av.rightArm, chains.right);
  setLine(av.headChain, chains.head);

  av.leftHand.position.set(...state.ee_left as [number, number, number]);
  av.rightHand.position.set(...state.ee_right as [number, number, number]);
  // hand spheres shrink as the grip closes
  const sL = 1.0 - 0.5 * state.hand_closure[0];
  const sR = 1.0 - 0.5 * state.hand_closure[1];
  av.leftHand.scale.set(sL, sL, sL);
  av.rightHand.scale.set(sR, sR, sR);

  av.comMarker.position.set(state.com[0], state.com[1], state.com[2]);

  const attach = new THREE.Vector3(0, 0, asset.tether_attach_height)
    .applyEuler(av.body.rotation)
    .add(av.body.position);
  const tether = av.tetherLine.geometry.getAttribute("position") as THREE.BufferAttribute;
  tether.setXYZ(0, attach.x, attach.y, attach.z);
  tether.setXYZ(1, av.anchor.x, av.anchor.y, av.anchor.z);
  tether.needsUpdate = true;

  const clamped = state.clamp_flags.some(Boolean);
  (av.clampRing.material as THREE.MeshBasicMaterial).color.setHex(
    clamped ? 0xd32f2f : 0x2e7d32);
}
