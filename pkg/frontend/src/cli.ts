#!/usr/bin/env node
// plots <kind> --in <csv[,csv]> --out <svg>
//
// Kinds: gantt (tasks.csv), box (summary.csv), scatter (two tasks.csv,
// comma separated), cost_table (costs csv). Inputs are read only; the
// output file is written atomically.

import { readFileSync } from "node:fs";
import { pathToFileURL } from "node:url";
import { readTasks, readSummary, readCosts } from "./csv.js";
import { plotGantt } from "./gantt.js";
import { plotBox, plotScatter } from "./comparison.js";
import { plotCostTable } from "./costTable.js";
import { writeFileAtomic } from "./io.js";

const KINDS = ["gantt", "box", "scatter", "cost_table"] as const;
type Kind = (typeof KINDS)[number];

const USAGE = `usage: plots <kind> --in <csv[,csv]> --out <svg>

kinds:
  gantt       tasks.csv -> per-task schedule bars
  box         summary.csv -> metric boxes grouped by system
  scatter     tasks.csv,tasks.csv -> per-run makespans, A vs B
  cost_table  costs csv -> ledger table
`;

type Args = { kind: Kind; inputs: string[]; out: string };

function parseArgs(argv: string[]): Args {
  const [kind, ...rest] = argv;
  if (!kind || !(KINDS as readonly string[]).includes(kind)) {
    throw new Error(`unknown kind "${kind ?? ""}"\n${USAGE}`);
  }
  let inArg: string | undefined;
  let out: string | undefined;
  for (let i = 0; i < rest.length; i++) {
    const flag = rest[i]!;
    if (flag === "--in") {
      inArg = rest[++i];
    } else if (flag === "--out") {
      out = rest[++i];
    } else {
      throw new Error(`unknown argument "${flag}"\n${USAGE}`);
    }
  }
  if (!inArg || !out) {
    throw new Error(`--in and --out are required\n${USAGE}`);
  }
  const inputs = inArg.split(",").filter((p) => p.length > 0);
  const wanted = kind === "scatter" ? 2 : 1;
  if (inputs.length !== wanted) {
    throw new Error(`${kind} takes ${wanted} input file(s), got ${inputs.length}\n${USAGE}`);
  }
  return { kind: kind as Kind, inputs, out };
}

function render(kind: Kind, inputs: string[]): string {
  const texts = inputs.map((p) => readFileSync(p, "utf8"));
  switch (kind) {
    case "gantt":
      return plotGantt(readTasks(texts[0]!));
    case "box":
      return plotBox(readSummary(texts[0]!));
    case "scatter":
      return plotScatter(readTasks(texts[0]!), readTasks(texts[1]!));
    case "cost_table":
      return plotCostTable(readCosts(texts[0]!));
  }
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    process.stderr.write(`${(err as Error).message}\n`);
    return 2;
  }
  try {
    writeFileAtomic(args.out, render(args.kind, args.inputs));
  } catch (err) {
    process.stderr.write(`plots ${args.kind}: ${(err as Error).message}\n`);
    return 1;
  }
  process.stdout.write(`wrote ${args.out}\n`);
  return 0;
}

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  process.exit(main(process.argv.slice(2)));
}
