#!/usr/bin/env node
/** Command line front end.
 *
 *   treeroute-plots resilience --csv a.csv [--title "ER 25"] [--csv b.csv ...] --out fig
 *   treeroute-plots runtime --csv timing_binned.csv --out fig
 *   treeroute-plots all [--results ../results] [--out out]
 *
 * `resilience` and `runtime` draw one figure from explicit inputs; `all`
 * regenerates the canonical figure set from a results directory laid out
 * the way the experiment suite writes it. Written file paths go to stdout,
 * errors to stderr with a non-zero exit code.
 */

import { existsSync } from "node:fs";
import { join } from "node:path";
import { pathToFileURL } from "node:url";
import { parseArgs } from "node:util";

import { CsvError } from "./csv.js";
import { plotResilienceHops, plotRuntime } from "./figures.js";

const USAGE = `usage: treeroute-plots <resilience|runtime|all> [options]
  resilience --csv FILE [--title T] [--csv FILE --title T ...] --out BASE
  runtime    --csv FILE --out BASE
  all        [--results DIR] [--out DIR]`;

const ER_CONFIGS: [string, string][] = [
  ["er_n25_p0.4", "ER n=25 p=0.4"],
  ["er_n50_p0.1", "ER n=50 p=0.1"],
  ["er_n100_p0.02", "ER n=100 p=0.02"],
];
const ZOO_CONFIGS: [string, string][] = [
  ["zoo_abilene", "Abilene"],
  ["zoo_nsfnet", "NSFNET"],
];
const REGULAR_CONFIGS: [string, string][] = [
  ["regular_n25", "8-regular n=25"],
  ["regular_n50", "8-regular n=50"],
  ["regular_n100", "8-regular n=100"],
];

async function runResilience(args: string[]): Promise<string[]> {
  const { values } = parseArgs({
    args,
    options: {
      csv: { type: "string", multiple: true },
      title: { type: "string", multiple: true },
      out: { type: "string" },
    },
  });
  const csvs = values.csv ?? [];
  if (csvs.length === 0 || !values.out) {
    throw new Error("resilience needs at least one --csv and an --out");
  }
  const titles = values.title ?? [];
  return plotResilienceHops({
    panels: csvs.map((csv, i) => ({ csv, title: titles[i] })),
    output: values.out,
  });
}

async function runRuntime(args: string[]): Promise<string[]> {
  const { values } = parseArgs({
    args,
    options: { csv: { type: "string" }, out: { type: "string" } },
  });
  if (!values.csv || !values.out) {
    throw new Error("runtime needs --csv and --out");
  }
  return plotRuntime({ csv: values.csv, output: values.out });
}

async function runAll(args: string[]): Promise<string[]> {
  const { values } = parseArgs({
    args,
    options: { results: { type: "string" }, out: { type: "string" } },
  });
  const results = values.results ?? "../results";
  const out = values.out ?? "out";

  const groups: [string, [string, string][]][] = [
    ["clustered_mul", ER_CONFIGS.map(([t, l]) => [`${t}_clustered_mul.csv`, l])],
    ["clustered_sub", ER_CONFIGS.map(([t, l]) => [`${t}_clustered_sub.csv`, l])],
    ["random", ER_CONFIGS.map(([t, l]) => [`${t}_random.csv`, l])],
    ["zoo_random", ZOO_CONFIGS.map(([t, l]) => [`${t}_random.csv`, l])],
    ["zoo_clustered", ZOO_CONFIGS.map(([t, l]) => [`${t}_clustered.csv`, l])],
    ["regular_clustered", REGULAR_CONFIGS.map(([t, l]) => [`${t}_clustered.csv`, l])],
  ];

  const written: string[] = [];
  for (const [name, files] of groups) {
    const panels = files
      .map(([f, title]) => ({ csv: join(results, f), title }))
      .filter((p) => existsSync(p.csv));
    if (panels.length === 0) continue;
    written.push(...await plotResilienceHops({ panels, output: join(out, `fig_${name}`) }));
  }
  const timing = join(results, "timing_binned.csv");
  if (existsSync(timing)) {
    written.push(...await plotRuntime({ csv: timing, output: join(out, "fig_runtime") }));
  }
  if (written.length === 0) {
    throw new Error(`no known CSVs found under ${results}`);
  }
  return written;
}

export async function main(argv: string[]): Promise<number> {
  const [command, ...rest] = argv;
  try {
    let written: string[];
    if (command === "resilience") {
      written = await runResilience(rest);
    } else if (command === "runtime") {
      written = await runRuntime(rest);
    } else if (command === "all") {
      written = await runAll(rest);
    } else {
      process.stderr.write(USAGE + "\n");
      return 1;
    }
    for (const path of written) process.stdout.write(path + "\n");
    return 0;
  } catch (err) {
    const msg = err instanceof CsvError || err instanceof Error ? err.message : String(err);
    process.stderr.write(`error: ${msg}\n`);
    return 1;
  }
}

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
