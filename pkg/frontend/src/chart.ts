/** SVG line chart of per-theta means (the live sweep preview). */

import type { PreviewPoint } from "./types.js";

const WIDTH = 560;
const HEIGHT = 220;
const PAD = { left: 48, right: 12, top: 12, bottom: 26 };

export function renderSweepChart(points: PreviewPoint[], phi: number): SVGSVGElement {
  const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
  svg.setAttribute("viewBox", `0 0 ${WIDTH} ${HEIGHT}`);
  svg.setAttribute("class", "sweep-chart");
  if (points.length === 0) {
    const empty = text(WIDTH / 2, HEIGHT / 2, "no completed positions yet");
    empty.setAttribute("text-anchor", "middle");
    svg.appendChild(empty);
    return svg;
  }

  const values = points.map((p) => p.mean_cm);
  let lo = Math.min(...values);
  let hi = Math.max(...values);
  if (hi - lo < 1e-9) {
    lo -= 1;
    hi += 1;
  }
  const spanX = WIDTH - PAD.left - PAD.right;
  const spanY = HEIGHT - PAD.top - PAD.bottom;
  const maxTheta = Math.max(360, ...points.map((p) => p.theta));
  const x = (theta: number) => PAD.left + (theta / maxTheta) * spanX;
  const y = (v: number) => PAD.top + (1 - (v - lo) / (hi - lo)) * spanY;

  const axis = document.createElementNS("http://www.w3.org/2000/svg", "path");
  axis.setAttribute(
    "d",
    `M ${PAD.left} ${PAD.top} V ${HEIGHT - PAD.bottom} H ${WIDTH - PAD.right}`,
  );
  axis.setAttribute("class", "chart-axis");
  svg.appendChild(axis);

  for (const tick of [lo, (lo + hi) / 2, hi]) {
    const label = text(PAD.left - 4, y(tick) + 4, tick.toFixed(1));
    label.setAttribute("text-anchor", "end");
    svg.appendChild(label);
  }
  for (const tick of [0, 90, 180, 270, 360]) {
    if (tick > maxTheta) break;
    const label = text(x(tick), HEIGHT - PAD.bottom + 16, `${tick}°`);
    label.setAttribute("text-anchor", "middle");
    svg.appendChild(label);
  }
  svg.appendChild(text(WIDTH - PAD.right, PAD.top + 8, `φ=${phi}°`, "end"));

  const line = document.createElementNS("http://www.w3.org/2000/svg", "polyline");
  line.setAttribute(
    "points",
    points.map((p) => `${x(p.theta).toFixed(1)},${y(p.mean_cm).toFixed(1)}`).join(" "),
  );
  line.setAttribute("class", "chart-line");
  svg.appendChild(line);

  for (const p of points) {
    const dot = document.createElementNS("http://www.w3.org/2000/svg", "circle");
    dot.setAttribute("cx", x(p.theta).toFixed(1));
    dot.setAttribute("cy", y(p.mean_cm).toFixed(1));
    dot.setAttribute("r", "2.5");
    dot.setAttribute("class", "chart-dot");
    svg.appendChild(dot);
  }
  return svg;
}

function text(x: number, y: number, content: string, anchor?: string): SVGTextElement {
  const el = document.createElementNS("http://www.w3.org/2000/svg", "text");
  el.setAttribute("x", String(x));
  el.setAttribute("y", String(y));
  el.setAttribute("class", "chart-label");
  if (anchor) {
    el.setAttribute("text-anchor", anchor);
  }
  el.textContent = content;
  return el;
}
