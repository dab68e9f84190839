#!/usr/bin/env node
// Render a figure from one or more trace CSVs.
//
//   seqn-plots --out fig.svg [--x epochs|wall_seconds] [--y rel_err|test_acc]
//              [--labels a,b,...] [--title text] trace1.csv [trace2.csv ...]
//
// The output format follows the file extension (.svg or .png).

import { readFileSync, writeFileSync } from "node:fs";
import { basename, extname } from "node:path";

import { buildFigure, FigureSpec, XAxis, YAxis } from "./figure.js";
import { renderPng } from "./png.js";
import { renderSvg } from "./svg.js";
import { parseTrace } from "./trace.js";

interface Args {
  traces: string[];
  out: string;
  x: XAxis;
  y: YAxis;
  labels?: string[];
  title?: string;
}

function parseArgs(argv: string[]): Args {
  const args: Args = { traces: [], out: "", x: "epochs", y: "rel_err" };
  for (let i = 0; i < argv.length; i++) {
    const a = argv[i];
    const next = () => {
      if (i + 1 >= argv.length) throw new Error(`missing value for ${a}`);
      return argv[++i];
    };
    if (a === "--out") args.out = next();
    else if (a === "--x") args.x = next() as XAxis;
    else if (a === "--y") args.y = next() as YAxis;
    else if (a === "--labels") args.labels = next().split(",");
    else if (a === "--title") args.title = next();
    else if (a.startsWith("--")) throw new Error(`unknown flag ${a}`);
    else args.traces.push(a);
  }
  if (!args.out) throw new Error("--out is required");
  if (args.traces.length === 0) throw new Error("no trace files given");
  if (!["epochs", "wall_seconds"].includes(args.x)) throw new Error(`bad --x ${args.x}`);
  if (!["rel_err", "test_acc"].includes(args.y)) throw new Error(`bad --y ${args.y}`);
  return args;
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
    const traces = args.traces.map((p) => parseTrace(readFileSync(p, "utf8"), basename(p)));
    const spec: FigureSpec = {
      xAxis: args.x,
      yAxis: args.y,
      labels: args.labels,
      title: args.title,
    };
    const fig = buildFigure(traces, spec);
    const ext = extname(args.out).toLowerCase();
    if (ext === ".svg") {
      writeFileSync(args.out, renderSvg(fig));
    } else if (ext === ".png") {
      writeFileSync(args.out, renderPng(fig));
    } else {
      throw new Error(`unsupported output extension ${ext || "<none>"} (use .svg or .png)`);
    }
    console.log(`wrote ${args.out} (${fig.series.length} series)`);
    return 0;
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}

if (process.argv[1] && /cli\.(ts|js)$/.test(process.argv[1])) {
  process.exit(main(process.argv.slice(2)));
}
