/**
 * Rolling strip charts (attitude in degrees, position in meters) with the
 * reference lines at zero/setpoint. Thin wrapper over uPlot; browser only.
 */
import uPlot from "uplot";

import type { StateMessage } from "./protocol.js";

const WINDOW_S = 20;
const RAD2DEG = 180 / Math.PI;

export class TelemetryStrips {
  private att: uPlot;
  private pos: uPlot;
  private data: number[][] = [[], [], [], [], [], [], []]; // t, phi, theta, psi, px, py, pz

  constructor(attEl: HTMLElement, posEl: HTMLElement, width: number) {
    const axes = { stroke: "#8aa", grid: { stroke: "#2a2f3a" } } as uPlot.Axis;
    const mk = (el: HTMLElement, title: string, labels: string[], colors: string[]) =>
      new uPlot(
        {
          title,
          width,
          height: 160,
          series: [
            {},
            ...labels.map((l, i) => ({ label: l, stroke: colors[i], width: 1.5 })),
          ],
          axes: [axes, axes],
          legend: { live: true },
          cursor: { show: false },
        },
        [[], ...labels.map(() => [])] as uPlot.AlignedData,
        el,
      );
    this.att = mk(attEl, "attitude [deg] (ref 0)", ["roll", "pitch", "yaw"],
                  ["#4fc3f7", "#ef5350", "#ffd54f"]);
    this.pos = mk(posEl, "position [m]", ["px", "py", "pz"],
                  ["#4fc3f7", "#ef5350", "#ffd54f"]);
  }

  push(state: StateMessage): void {
    const d = this.data;
    d[0].push(state.t);
    d[1].push(state.Phi[0] * RAD2DEG);
    d[2].push(state.Phi[1] * RAD2DEG);
    d[3].push(state.Phi[2] * RAD2DEG);
    d[4].push(state.p[0]);
    d[5].push(state.p[1]);
    d[6].push(state.p[2]);
    const cutoff = state.t - WINDOW_S;
    while (d[0].length > 1 && d[0][0] < cutoff) d.forEach((col) => col.shift());
    this.att.setData([d[0], d[1], d[2], d[3]] as uPlot.AlignedData);
    this.pos.setData([d[0], d[4], d[5], d[6]] as uPlot.AlignedData);
  }
}
