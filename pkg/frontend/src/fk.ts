/**
 * Forward kinematics over the chain geometry shipped in
 * assets/kinematics.json (generated from the simulator's parameter file, so
 * the cockpit renders exactly the chains the physics uses).
 *
 * Standard DH: A = Rz(theta_offset + q) Tz(d) Tx(a) Rx(alpha). Matrices are
 * row-major number[16] homogeneous transforms.
 */

export interface DhRow {
  a: number;
  alpha: number;
  d: number;
  theta_offset: number;
}

export interface KinematicsAsset {
  schema: string;
  dh_arm: DhRow[];
  dh_head: DhRow[];
  mounts: { left: number[][]; right: number[][]; head: number[][] };
  tether_attach_height: number;
  command_limits: Record<string, number>;
  rates: Record<string, number>;
}

export type Mat4 = Float64Array; // 16 entries, row-major

export function identity(): Mat4 {
  const m = new Float64Array(16);
  m[0] = m[5] = m[10] = m[15] = 1;
  return m;
}

export function matFromRows(rows: number[][]): Mat4 {
  const m = new Float64Array(16);
  for (let i = 0; i < 4; i++) for (let j = 0; j < 4; j++) m[4 * i + j] = rows[i][j];
  return m;
}

export function matMul(a: Mat4, b: Mat4): Mat4 {
  const out = new Float64Array(16);
  for (let i = 0; i < 4; i++) {
    for (let j = 0; j < 4; j++) {
      let s = 0;
      for (let k = 0; k < 4; k++) s += a[4 * i + k] * b[4 * k + j];
      out[4 * i + j] = s;
    }
  }
  return out;
}

export function dhTransform(row: DhRow, q: number): Mat4 {
  const ct = Math.cos(row.theta_offset + q);
  const st = Math.sin(row.theta_offset + q);
  const ca = Math.cos(row.alpha);
  const sa = Math.sin(row.alpha);
  // prettier-ignore
  return Float64Array.from([
    ct, -st * ca, st * sa, row.a * ct,
    st, ct * ca, -ct * sa, row.a * st,
    0, sa, ca, row.d,
    0, 0, 0, 1,
  ]);
}

export function position(m: Mat4): [number, number, number] {
  return [m[3], m[7], m[11]];
}

/** Cumulative link frames (mount included); the last is the end effector. */
export function chainFrames(rows: DhRow[], mount: Mat4, q: number[]): Mat4[] {
  if (q.length !== rows.length) {
    throw new Error(`expected ${rows.length} joint angles, got ${q.length}`);
  }
  const frames: Mat4[] = [];
  let T = mount;
  for (let i = 0; i < rows.length; i++) {
    T = matMul(T, dhTransform(rows[i], q[i]));
    frames.push(T);
  }
  return frames;
}

/** Joint-point polyline for rendering: mount origin plus each link origin. */
export function chainPoints(rows: DhRow[], mount: Mat4, q: number[]): [number, number, number][] {
  const pts: [number, number, number][] = [position(mount)];
  for (const f of chainFrames(rows, mount, q)) pts.push(position(f));
  return pts;
}

export interface TorsoPoints {
  left: [number, number, number][];
  right: [number, number, number][];
  head: [number, number, number][];
}

/** All three chains from the 12-vector torso state (la5, ra5, head2). */
export function torsoPoints(asset: KinematicsAsset, q_lb: number[]): TorsoPoints {
  const left = chainPoints(asset.dh_arm, matFromRows(asset.mounts.left), q_lb.slice(0, 5));
  const right = chainPoints(asset.dh_arm, matFromRows(asset.mounts.right), q_lb.slice(5, 10));
  const head = chainPoints(asset.dh_head, matFromRows(asset.mounts.head), q_lb.slice(10, 12));
  return { left, right, head };
}
