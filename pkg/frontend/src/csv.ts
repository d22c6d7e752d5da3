// Strict reader for the small CSVs the simulator CLI writes: comma
// separator, one header row, double-quote escaping, LF or CRLF lines.
// Anything off-contract is an error, never a guess.

export type Row = Record<string, string>;

export class CsvError extends Error {}

// parseCsv tokenizes quoted fields and checks every record's width.
export function parseCsv(text: string): { header: string[]; rows: Row[] } {
  const records = tokenize(text);
  if (records.length === 0) {
    throw new CsvError("empty input: no header row");
  }
  const header = records[0]!;
  const rows: Row[] = [];
  for (let i = 1; i < records.length; i++) {
    const record = records[i]!;
    if (record.length !== header.length) {
      throw new CsvError(
        `line ${i + 1}: ${record.length} fields, header has ${header.length}`,
      );
    }
    const row: Row = {};
    header.forEach((name, col) => (row[name] = record[col]!));
    rows.push(row);
  }
  return { header, rows };
}

function tokenize(text: string): string[][] {
  const records: string[][] = [];
  let record: string[] = [];
  let field = "";
  let quoted = false;
  let i = 0;
  const endField = () => {
    record.push(field);
    field = "";
  };
  const endRecord = () => {
    endField();
    records.push(record);
    record = [];
  };
  while (i < text.length) {
    const ch = text[i]!;
    if (quoted) {
      if (ch === '"') {
        if (text[i + 1] === '"') {
          field += '"';
          i += 2;
          continue;
        }
        quoted = false;
        i++;
        continue;
      }
      field += ch;
      i++;
      continue;
    }
    if (ch === '"' && field === "") {
      quoted = true;
      i++;
    } else if (ch === ",") {
      endField();
      i++;
    } else if (ch === "\n" || ch === "\r") {
      endRecord();
      i += ch === "\r" && text[i + 1] === "\n" ? 2 : 1;
    } else {
      field += ch;
      i++;
    }
  }
  if (quoted) {
    throw new CsvError("unterminated quoted field");
  }
  if (field !== "" || record.length > 0) {
    endRecord();
  }
  return records;
}

export function expectHeader(header: string[], required: string[], what: string): void {
  if (header.length !== required.length || required.some((h, i) => header[i] !== h)) {
    throw new CsvError(
      `${what}: header is "${header.join(",")}", expected "${required.join(",")}"`,
    );
  }
}

function toNumber(value: string, column: string): number {
  const n = Number(value);
  if (value === "" || !Number.isFinite(n)) {
    throw new CsvError(`column ${column}: not a finite number: "${value}"`);
  }
  return n;
}

// -- the three documented file contracts --------------------------------

export const TASKS_HEADER = ["run_id", "task_id", "v_i", "s_i", "c_i", "warm", "executor"];
export const SUMMARY_HEADER = ["system", "metric", "count", "mean", "median", "min", "max"];
export const COSTS_HEADER = ["section", "component", "notes", "usd"];

export type TaskRow = {
  runId: string;
  taskId: string;
  vI: number;
  sI: number;
  cI: number;
  warm: boolean;
  executor: string;
};

export type SummaryRow = {
  system: string;
  metric: string;
  count: number;
  mean: number;
  median: number;
  min: number;
  max: number;
};

export type CostRow = {
  section: string;
  component: string;
  notes: string;
  usd: number;
};

export function readTasks(text: string): TaskRow[] {
  const { header, rows } = parseCsv(text);
  expectHeader(header, TASKS_HEADER, "tasks.csv");
  return rows.map((r) => ({
    runId: r.run_id!,
    taskId: r.task_id!,
    vI: toNumber(r.v_i!, "v_i"),
    sI: toNumber(r.s_i!, "s_i"),
    cI: toNumber(r.c_i!, "c_i"),
    warm: r.warm === "true",
    executor: r.executor!,
  }));
}

export function readSummary(text: string): SummaryRow[] {
  const { header, rows } = parseCsv(text);
  expectHeader(header, SUMMARY_HEADER, "summary.csv");
  return rows.map((r) => ({
    system: r.system!,
    metric: r.metric!,
    count: toNumber(r.count!, "count"),
    mean: toNumber(r.mean!, "mean"),
    median: toNumber(r.median!, "median"),
    min: toNumber(r.min!, "min"),
    max: toNumber(r.max!, "max"),
  }));
}

export function readCosts(text: string): CostRow[] {
  const { header, rows } = parseCsv(text);
  expectHeader(header, COSTS_HEADER, "costs csv");
  return rows.map((r) => ({
    section: r.section!,
    component: r.component!,
    notes: r.notes!,
    usd: toNumber(r.usd!, "usd"),
  }));
}
