// Gantt chart of one or more workflow runs: a horizontal lane per task,
// a pale wait segment from trigger (v_i) to start (s_i), and a solid
// bar from start (s_i) to completion (c_i). Lanes are ordered by start
// time so the schedule reads top to bottom.

import { TaskRow } from "./csv.js";
import { el, text, svgDocument, linearScale, ticks } from "./svg.js";

const MARGIN = { top: 28, right: 24, bottom: 40, left: 170 };
const LANE_HEIGHT = 18;
const LANE_GAP = 6;
const PLOT_WIDTH = 760;

const BAR_FILL = "#2563eb";
const COLD_FILL = "#7c3aed";
const WAIT_FILL = "#cbd5e1";

export function plotGantt(tasks: TaskRow[]): string {
  if (tasks.length === 0) {
    throw new Error("gantt: no task rows to plot");
  }
  const ordered = [...tasks].sort((a, b) => a.sI - b.sI || a.cI - b.cI);
  const tMin = Math.min(...ordered.map((t) => t.vI));
  const tMax = Math.max(...ordered.map((t) => t.cI));
  const x = linearScale([tMin, tMax], [MARGIN.left, MARGIN.left + PLOT_WIDTH]);
  const height = MARGIN.top + ordered.length * (LANE_HEIGHT + LANE_GAP) + MARGIN.bottom;
  const width = MARGIN.left + PLOT_WIDTH + MARGIN.right;

  const children: string[] = [];
  const axisY = height - MARGIN.bottom + 8;
  for (const mark of ticks([tMin, tMax], 8)) {
    const px = x(mark);
    children.push(
      el("line", {
        x1: px,
        y1: MARGIN.top,
        x2: px,
        y2: height - MARGIN.bottom,
        stroke: "#e2e8f0",
        "stroke-width": 1,
      }),
    );
    children.push(
      text(`${Math.round(mark * 100) / 100}s`, {
        x: px,
        y: axisY + 12,
        "text-anchor": "middle",
        "font-size": 11,
        fill: "#475569",
      }),
    );
  }

  const multiRun = new Set(ordered.map((t) => t.runId)).size > 1;
  ordered.forEach((task, lane) => {
    const y = MARGIN.top + lane * (LANE_HEIGHT + LANE_GAP);
    // Zero-duration tasks still get a visible sliver of bar.
    const barW = Math.max(1, x(task.cI) - x(task.sI));
    const waitW = Math.max(0, x(task.sI) - x(task.vI));
    children.push(
      el("rect", {
        class: "wait",
        x: x(task.vI),
        y: y + LANE_HEIGHT / 4,
        width: waitW,
        height: LANE_HEIGHT / 2,
        fill: WAIT_FILL,
      }),
    );
    children.push(
      el("rect", {
        class: "bar",
        x: x(task.sI),
        y,
        width: barW,
        height: LANE_HEIGHT,
        fill: task.warm ? BAR_FILL : COLD_FILL,
      }),
    );
    const label = multiRun ? `${task.runId} ${task.taskId}` : task.taskId;
    children.push(
      text(label, {
        x: MARGIN.left - 8,
        y: y + LANE_HEIGHT - 5,
        "text-anchor": "end",
        "font-size": 11,
        fill: "#0f172a",
      }),
    );
  });

  children.push(
    text(`${ordered.length} tasks`, {
      class: "legend",
      x: MARGIN.left,
      y: MARGIN.top - 10,
      "font-size": 12,
      fill: "#0f172a",
    }),
  );
  children.push(
    text("solid: execution (warm blue, cold violet) / pale: queue wait", {
      x: MARGIN.left + PLOT_WIDTH,
      y: MARGIN.top - 10,
      "text-anchor": "end",
      "font-size": 11,
      fill: "#475569",
    }),
  );
  return svgDocument(width, height, children);
}
