// System comparison plots. Box view: one box per summary row (min/max
// whisker, mean-median box, median tick), grouped by system. Scatter
// view: per-run makespans of two systems on the same workload, one
// point per shared run plus a least-squares trend line.

import { SummaryRow, TaskRow } from "./csv.js";
import { el, text, svgDocument, linearScale, ticks, Scale } from "./svg.js";

const MARGIN = { top: 36, right: 28, bottom: 52, left: 72 };
const PLOT_WIDTH = 640;
const PLOT_HEIGHT = 360;

const SYSTEM_FILLS = ["#2563eb", "#f97316", "#10b981", "#7c3aed", "#64748b"];

function frame(width: number, height: number, yScale: Scale, unit: string): string[] {
  const children: string[] = [];
  for (const mark of ticks(yScale.domain, 6)) {
    const py = yScale(mark);
    children.push(
      el("line", {
        x1: MARGIN.left,
        y1: py,
        x2: width - MARGIN.right,
        y2: py,
        stroke: "#e2e8f0",
        "stroke-width": 1,
      }),
    );
    children.push(
      text(`${Math.round(mark * 100) / 100}${unit}`, {
        x: MARGIN.left - 8,
        y: py + 4,
        "text-anchor": "end",
        "font-size": 11,
        fill: "#475569",
      }),
    );
  }
  return children;
}

export function plotBox(rows: SummaryRow[]): string {
  if (rows.length === 0) {
    throw new Error("box: no summary rows to plot");
  }
  const systems = [...new Set(rows.map((r) => r.system))];
  const metrics = [...new Set(rows.map((r) => r.metric))];
  const lo = Math.min(0, ...rows.map((r) => r.min));
  const hi = Math.max(...rows.map((r) => r.max));
  const width = MARGIN.left + PLOT_WIDTH + MARGIN.right;
  const height = MARGIN.top + PLOT_HEIGHT + MARGIN.bottom;
  const y = linearScale([lo, hi], [MARGIN.top + PLOT_HEIGHT, MARGIN.top]);

  const children = frame(width, height, y, "s");
  const slot = PLOT_WIDTH / Math.max(1, rows.length);
  const boxW = Math.min(36, slot * 0.5);

  // Group by metric, one slot per (metric, system) pair.
  let slotIndex = 0;
  for (const metric of metrics) {
    const groupStart = slotIndex;
    for (const system of systems) {
      const row = rows.find((r) => r.metric === metric && r.system === system);
      if (!row) {
        continue;
      }
      const cx = MARGIN.left + (slotIndex + 0.5) * slot;
      const fill = SYSTEM_FILLS[systems.indexOf(system) % SYSTEM_FILLS.length]!;
      const boxTop = y(Math.max(row.mean, row.median));
      const boxBottom = y(Math.min(row.mean, row.median));
      children.push(
        el("g", { class: "box", "data-system": system, "data-metric": metric }, [
          el("line", {
            x1: cx,
            y1: y(row.min),
            x2: cx,
            y2: y(row.max),
            stroke: fill,
            "stroke-width": 1.5,
          }),
          el("rect", {
            x: cx - boxW / 2,
            y: boxTop,
            width: boxW,
            height: Math.max(1, boxBottom - boxTop),
            fill,
            "fill-opacity": 0.35,
            stroke: fill,
          }),
          el("line", {
            x1: cx - boxW / 2,
            y1: y(row.median),
            x2: cx + boxW / 2,
            y2: y(row.median),
            stroke: fill,
            "stroke-width": 2,
          }),
        ]),
      );
      children.push(
        text(system, {
          x: cx,
          y: height - MARGIN.bottom + 16,
          "text-anchor": "middle",
          "font-size": 10,
          fill: "#475569",
        }),
      );
      slotIndex++;
    }
    const groupCenter = MARGIN.left + ((groupStart + slotIndex) / 2) * slot;
    children.push(
      text(metric, {
        x: groupCenter,
        y: height - MARGIN.bottom + 34,
        "text-anchor": "middle",
        "font-size": 11,
        fill: "#0f172a",
      }),
    );
  }
  children.push(
    text(`${rows.length} summary rows`, {
      class: "legend",
      x: MARGIN.left,
      y: MARGIN.top - 14,
      "font-size": 12,
      fill: "#0f172a",
    }),
  );
  return svgDocument(width, height, children);
}

// runMakespans reduces task rows to one makespan per run: last completion
// minus first trigger.
export function runMakespans(tasks: TaskRow[]): Map<string, number> {
  const spans = new Map<string, { v: number; c: number }>();
  for (const task of tasks) {
    const span = spans.get(task.runId);
    if (span) {
      span.v = Math.min(span.v, task.vI);
      span.c = Math.max(span.c, task.cI);
    } else {
      spans.set(task.runId, { v: task.vI, c: task.cI });
    }
  }
  return new Map([...spans].map(([runId, s]) => [runId, s.c - s.v]));
}

export function plotScatter(left: TaskRow[], right: TaskRow[]): string {
  if (left.length === 0 || right.length === 0) {
    throw new Error("scatter: no task rows to plot");
  }
  const leftSpans = runMakespans(left);
  const rightSpans = runMakespans(right);
  const leftIds = [...leftSpans.keys()].sort();
  const rightIds = [...rightSpans.keys()].sort();
  if (leftIds.length !== rightIds.length || leftIds.some((id, i) => id !== rightIds[i])) {
    throw new Error(
      `scatter: run sets differ (${leftIds.length} vs ${rightIds.length} runs, ` +
        `first mismatch: ${leftIds.find((id) => !rightSpans.has(id)) ?? rightIds.find((id) => !leftSpans.has(id))})`,
    );
  }

  const points = leftIds.map((id) => ({
    runId: id,
    x: leftSpans.get(id)!,
    y: rightSpans.get(id)!,
  }));
  const hi = Math.max(...points.map((p) => Math.max(p.x, p.y))) * 1.05 || 1;
  const width = MARGIN.left + PLOT_WIDTH + MARGIN.right;
  const height = MARGIN.top + PLOT_HEIGHT + MARGIN.bottom;
  const x = linearScale([0, hi], [MARGIN.left, MARGIN.left + PLOT_WIDTH]);
  const y = linearScale([0, hi], [MARGIN.top + PLOT_HEIGHT, MARGIN.top]);

  const children = frame(width, height, y, "s");
  for (const mark of ticks([0, hi], 6)) {
    children.push(
      text(`${Math.round(mark * 100) / 100}s`, {
        x: x(mark),
        y: height - MARGIN.bottom + 16,
        "text-anchor": "middle",
        "font-size": 11,
        fill: "#475569",
      }),
    );
  }
  children.push(
    el("line", {
      class: "diagonal",
      x1: x(0),
      y1: y(0),
      x2: x(hi),
      y2: y(hi),
      stroke: "#cbd5e1",
      "stroke-dasharray": "4 4",
    }),
  );

  // Least-squares fit; with fewer than two distinct x values the trend
  // degenerates to the y = x diagonal.
  const line = fitLine(points);
  children.push(
    el("line", {
      class: "trend",
      x1: x(0),
      y1: y(line.intercept),
      x2: x(hi),
      y2: y(line.intercept + line.slope * hi),
      stroke: "#dc2626",
      "stroke-width": 1.5,
    }),
  );
  for (const point of points) {
    children.push(
      el("circle", {
        class: "point",
        "data-run": point.runId,
        cx: x(point.x),
        cy: y(point.y),
        r: 4,
        fill: "#2563eb",
        "fill-opacity": 0.7,
      }),
    );
  }
  children.push(
    text(`${points.length} runs`, {
      class: "legend",
      x: MARGIN.left,
      y: MARGIN.top - 14,
      "font-size": 12,
      fill: "#0f172a",
    }),
  );
  return svgDocument(width, height, children);
}

function fitLine(points: { x: number; y: number }[]): { slope: number; intercept: number } {
  const n = points.length;
  const meanX = points.reduce((acc, p) => acc + p.x, 0) / n;
  const meanY = points.reduce((acc, p) => acc + p.y, 0) / n;
  const varX = points.reduce((acc, p) => acc + (p.x - meanX) ** 2, 0);
  if (n < 2 || varX === 0) {
    return { slope: 1, intercept: 0 };
  }
  const cov = points.reduce((acc, p) => acc + (p.x - meanX) * (p.y - meanY), 0);
  const slope = cov / varX;
  return { slope, intercept: meanY - slope * meanX };
}
