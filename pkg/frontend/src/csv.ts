/**
 * Reading pcnsim metric CSVs.
 *
 * Rows follow the fixed MetricRecord schema; labels are semicolon-separated
 * key=value strings carrying the experiment coordinates, with a trailing
 * ";mean" marking aggregate rows.
 */

import * as fs from "node:fs";
import Papa from "papaparse";

export const SCHEMA = [
  "label",
  "nodes_added",
  "degree_gini",
  "betweenness_gini",
  "diameter_hops",
  "central_point_dominance",
  "success_rate_pct",
  "mean_fee_pct",
  "routed_share_pct",
  "seed",
] as const;

export interface MetricRow {
  label: string;
  kind: string;
  strategy: string | null;
  k: number | null;
  amountMsat: number | null;
  isMean: boolean;
  nodesAdded: number;
  degreeGini: number | null;
  betweennessGini: number | null;
  diameterHops: number | null;
  centralPointDominance: number | null;
  successRatePct: number | null;
  meanFeePct: number | null;
  routedSharePct: number | null;
  seed: number;
}

export class SchemaError extends Error {
  constructor(public missing: string[]) {
    super(`CSV schema mismatch; missing columns: ${missing.join(", ")}`);
  }
}

function num(value: string | undefined): number | null {
  if (value === undefined || value === "") return null;
  const parsed = Number(value);
  if (Number.isNaN(parsed)) throw new Error(`not a number: ${value}`);
  return parsed;
}

function parseLabel(label: string): {
  kind: string;
  strategy: string | null;
  k: number | null;
  amountMsat: number | null;
  isMean: boolean;
} {
  const parts = label.split(";");
  const kind = parts[0] ?? "";
  let strategy: string | null = null;
  let k: number | null = null;
  let amountMsat: number | null = null;
  let isMean = false;
  for (const part of parts.slice(1)) {
    if (part === "mean") {
      isMean = true;
      continue;
    }
    const eq = part.indexOf("=");
    if (eq < 0) continue;
    const key = part.slice(0, eq);
    const value = part.slice(eq + 1);
    if (key === "strategy") strategy = value;
    else if (key === "k") k = Number(value);
    else if (key === "amount_msat") amountMsat = Number(value);
  }
  return { kind, strategy, k, amountMsat, isMean };
}

export function parseMetricCsv(text: string): MetricRow[] {
  const result = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (result.errors.length > 0) {
    const first = result.errors[0];
    throw new Error(`CSV parse error at row ${first.row}: ${first.message}`);
  }
  const fields = result.meta.fields ?? [];
  const missing = SCHEMA.filter((name) => !fields.includes(name));
  if (missing.length > 0) throw new SchemaError([...missing]);
  return result.data.map((raw) => {
    const label = raw.label ?? "";
    const coords = parseLabel(label);
    return {
      label,
      ...coords,
      nodesAdded: num(raw.nodes_added) ?? 0,
      degreeGini: num(raw.degree_gini),
      betweennessGini: num(raw.betweenness_gini),
      diameterHops: num(raw.diameter_hops),
      centralPointDominance: num(raw.central_point_dominance),
      successRatePct: num(raw.success_rate_pct),
      meanFeePct: num(raw.mean_fee_pct),
      routedSharePct: num(raw.routed_share_pct),
      seed: num(raw.seed) ?? 0,
    };
  });
}

export function loadMetricCsvs(paths: string[]): MetricRow[] {
  const rows: MetricRow[] = [];
  for (const path of paths) {
    rows.push(...parseMetricCsv(fs.readFileSync(path, "utf-8")));
  }
  return rows;
}
