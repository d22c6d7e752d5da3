import { describe, it, expect } from "vitest";
import { readFileSync } from "node:fs";
import { readTasks, readSummary } from "../src/csv.js";
import { plotBox, plotScatter, runMakespans } from "../src/comparison.js";

const fixture = (name: string): string =>
  readFileSync(new URL(`../fixtures/${name}`, import.meta.url), "utf8");

const countClass = (svg: string, name: string): number =>
  (svg.match(new RegExp(`class="${name}"`, "g")) ?? []).length;

// Synthesizes a tasks.csv with one single-task run per (runId, makespan).
const tasksCsv = (runs: [string, number][]): string => {
  const lines = ["run_id,task_id,v_i,s_i,c_i,warm,executor"];
  for (const [runId, span] of runs) {
    lines.push(`${runId},t000,0.0,1.0,${1 + span},true,function`);
  }
  return `${lines.join("\n")}\n`;
};

describe("plotBox", () => {
  const rows = readSummary(fixture("golden-summary.csv"));
  const svg = plotBox(rows);

  it("draws exactly one box per summary row", () => {
    expect(countClass(svg, "box")).toBe(rows.length);
  });

  it("states the row count in the legend", () => {
    expect(svg).toContain(`>${rows.length} summary rows<`);
  });

  it("labels every system and metric", () => {
    for (const system of new Set(rows.map((r) => r.system))) {
      expect(svg).toContain(`data-system="${system}"`);
    }
    for (const metric of new Set(rows.map((r) => r.metric))) {
      expect(svg).toContain(`>${metric}<`);
    }
  });

  it("rejects empty input", () => {
    expect(() => plotBox([])).toThrow(/no summary rows/);
  });
});

describe("runMakespans", () => {
  it("spans first trigger to last completion per run", () => {
    const tasks = readTasks(fixture("golden-tasks.csv"));
    const spans = runMakespans(tasks);
    expect(spans.size).toBe(1);
    const span = spans.get("parallel-16@0")!;
    const vMin = Math.min(...tasks.map((t) => t.vI));
    const cMax = Math.max(...tasks.map((t) => t.cI));
    expect(span).toBeCloseTo(cMax - vMin, 9);
  });
});

describe("plotScatter", () => {
  it("draws one point per shared run across the golden pair", () => {
    const left = readTasks(fixture("golden-tasks.csv"));
    const right = readTasks(fixture("golden-tasks-baseline.csv"));
    const svg = plotScatter(left, right);
    expect(countClass(svg, "point")).toBe(runMakespans(left).size);
    expect(countClass(svg, "trend")).toBe(1);
    expect(svg).toContain(`>${runMakespans(left).size} runs<`);
  });

  it("draws one point per run for synthetic multi-run inputs", () => {
    const left = readTasks(tasksCsv([["a", 10], ["b", 20], ["c", 30]]));
    const right = readTasks(tasksCsv([["a", 12], ["b", 18], ["c", 33]]));
    const svg = plotScatter(left, right);
    expect(countClass(svg, "point")).toBe(3);
    expect(countClass(svg, "trend")).toBe(1);
  });

  it("collapses the trend onto the diagonal for identical systems", () => {
    const tasks = readTasks(tasksCsv([["a", 10], ["b", 20], ["c", 30]]));
    const svg = plotScatter(tasks, tasks);
    const grab = (cls: string): string =>
      svg.match(new RegExp(`<line class="${cls}" (x1="[^"]+" y1="[^"]+" x2="[^"]+" y2="[^"]+")`))![1]!;
    expect(grab("trend")).toBe(grab("diagonal"));
  });

  it("rejects mismatched run sets", () => {
    const left = readTasks(tasksCsv([["a", 10], ["b", 20], ["d", 30]]));
    const right = readTasks(tasksCsv([["a", 12], ["b", 18], ["c", 33]]));
    expect(() => plotScatter(left, right)).toThrow(/run sets differ/);
  });

  it("rejects empty input", () => {
    const tasks = readTasks(tasksCsv([["a", 10]]));
    expect(() => plotScatter([], tasks)).toThrow(/no task rows/);
    expect(() => plotScatter(tasks, [])).toThrow(/no task rows/);
  });
});
