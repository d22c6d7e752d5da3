export {
  parseCsv,
  readTasks,
  readSummary,
  readCosts,
  CsvError,
  TASKS_HEADER,
  SUMMARY_HEADER,
  COSTS_HEADER,
} from "./csv.js";
export type { TaskRow, SummaryRow, CostRow, Row } from "./csv.js";
export { plotGantt } from "./gantt.js";
export { plotBox, plotScatter, runMakespans } from "./comparison.js";
export { plotCostTable } from "./costTable.js";
export { writeFileAtomic } from "./io.js";
export { main } from "./cli.js";
