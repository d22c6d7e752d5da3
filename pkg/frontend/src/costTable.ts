// Cost ledger rendered as a table-style SVG: one row per ledger line,
// section headings between groups, and amounts right-aligned. Section
// totals (component == "total") get a rule above them.

import { CostRow } from "./csv.js";
import { el, text, svgDocument } from "./svg.js";

const ROW_HEIGHT = 20;
const SECTION_GAP = 14;
const WIDTH = 720;
const MARGIN = { top: 40, left: 24, right: 24, bottom: 24 };
const COLS = { component: 24, notes: 220, usd: WIDTH - 24 };

export function plotCostTable(rows: CostRow[]): string {
  if (rows.length === 0) {
    throw new Error("cost_table: no cost rows to plot");
  }
  const sections = [...new Set(rows.map((r) => r.section))];
  const bodyHeight =
    rows.length * ROW_HEIGHT + sections.length * (ROW_HEIGHT + SECTION_GAP);
  const height = MARGIN.top + bodyHeight + MARGIN.bottom;
  const children: string[] = [];

  children.push(
    text(`${rows.length} line items`, {
      class: "legend",
      x: COLS.component,
      y: MARGIN.top - 16,
      "font-size": 12,
      fill: "#0f172a",
    }),
  );

  let cursor = MARGIN.top;
  for (const section of sections) {
    children.push(
      text(section, {
        class: "section",
        x: COLS.component,
        y: cursor + ROW_HEIGHT - 6,
        "font-size": 13,
        "font-weight": "bold",
        fill: "#0f172a",
      }),
    );
    cursor += ROW_HEIGHT;
    for (const row of rows.filter((r) => r.section === section)) {
      const isTotal = row.component === "total";
      if (isTotal) {
        children.push(
          el("line", {
            x1: COLS.component,
            y1: cursor + 2,
            x2: COLS.usd,
            y2: cursor + 2,
            stroke: "#94a3b8",
            "stroke-width": 1,
          }),
        );
      }
      const baseline = cursor + ROW_HEIGHT - 6;
      const weight = isTotal ? "bold" : "normal";
      children.push(
        el("g", { class: "cost-row", "data-section": section, "data-component": row.component }, [
          text(row.component, {
            x: COLS.component + 12,
            y: baseline,
            "font-size": 11,
            "font-weight": weight,
            fill: "#0f172a",
          }),
          text(row.notes, {
            x: COLS.notes,
            y: baseline,
            "font-size": 11,
            fill: "#475569",
          }),
          text(row.usd.toFixed(4), {
            x: COLS.usd,
            y: baseline,
            "text-anchor": "end",
            "font-size": 11,
            "font-weight": weight,
            fill: "#0f172a",
          }),
        ]),
      );
      cursor += ROW_HEIGHT;
    }
    cursor += SECTION_GAP;
  }
  return svgDocument(WIDTH, height, children);
}
