/**
 * The three figure kinds built from metric CSVs: per-amount success panels,
 * the fee/routed-share pair, and the four-panel long-term view. Plotted
 * values are means over the detail rows sharing a coordinate (aggregate
 * ";mean" rows are ignored so seeds are always weighted equally).
 */

import { MetricRow } from "./csv.js";
import { PanelSpec, Point, renderFigure } from "./svg.js";

export type FigureKind = "success_panels" | "fees_routing" | "longterm";

export const FIGURE_KINDS: FigureKind[] = [
  "success_panels",
  "fees_routing",
  "longterm",
];

function meanBy(
  rows: MetricRow[],
  xOf: (row: MetricRow) => number,
  yOf: (row: MetricRow) => number | null,
): Point[] {
  const buckets = new Map<number, { sum: number; count: number }>();
  for (const row of rows) {
    const y = yOf(row);
    if (y === null) continue;
    const x = xOf(row);
    const bucket = buckets.get(x) ?? { sum: 0, count: 0 };
    bucket.sum += y;
    bucket.count += 1;
    buckets.set(x, bucket);
  }
  return [...buckets.entries()]
    .map(([x, { sum, count }]) => ({ x, y: sum / count }))
    .sort((a, b) => a.x - b.x);
}

function strategiesOf(rows: MetricRow[]): string[] {
  return [...new Set(rows.map((r) => r.strategy).filter((s): s is string => !!s))].sort();
}

function detailRows(rows: MetricRow[], kind: string): MetricRow[] {
  return rows.filter((r) => r.kind === kind && !r.isMean);
}

export function successPanels(rows: MetricRow[], baseline?: number): string {
  const details = detailRows(rows, "join-eval");
  const strategies = strategiesOf(details);
  const amounts = [...new Set(details.map((r) => r.amountMsat ?? 0))].sort((a, b) => a - b);
  const panels: PanelSpec[] = (amounts.length ? amounts : [0]).map((amount) => ({
    title: `${amount / 1000} sat`,
    xLabel: "k",
    yLabel: "Success Rate (in %)",
    baseline,
    series: strategies.map((name) => ({
      name,
      points: meanBy(
        details.filter((r) => r.strategy === name && r.amountMsat === amount),
        (r) => r.k ?? 0,
        (r) => r.successRatePct,
      ),
    })),
  }));
  return renderFigure(panels, strategies, baseline);
}

export function feesRouting(rows: MetricRow[], baseline?: number): string {
  const details = detailRows(rows, "join-eval");
  const strategies = strategiesOf(details);
  const amounts = [...new Set(details.map((r) => r.amountMsat ?? 0))].sort((a, b) => a - b);
  const micro = amounts[0];
  const microRows = details.filter((r) => r.amountMsat === micro);
  const panels: PanelSpec[] = [
    {
      xLabel: "k",
      yLabel: "Transaction Fees (in %)",
      baseline,
      series: strategies.map((name) => ({
        name,
        points: meanBy(
          microRows.filter((r) => r.strategy === name),
          (r) => r.k ?? 0,
          (r) => r.meanFeePct,
        ),
      })),
    },
    {
      xLabel: "k",
      yLabel: "Routed Transactions (in %)",
      series: strategies.map((name) => ({
        name,
        points: meanBy(
          microRows.filter((r) => r.strategy === name),
          (r) => r.k ?? 0,
          (r) => r.routedSharePct,
        ),
      })),
    },
  ];
  return renderFigure(panels, strategies, baseline);
}

export function longterm(rows: MetricRow[]): string {
  const details = detailRows(rows, "growth");
  const strategies = strategiesOf(details);
  const intervals = [...new Set(details.map((r) => r.nodesAdded))].sort((a, b) => a - b);
  const metricsSpec: { label: string; yOf: (r: MetricRow) => number | null }[] = [
    { label: "Gini Coefficient (Degree)", yOf: (r) => r.degreeGini },
    { label: "Diameter", yOf: (r) => r.diameterHops },
    { label: "Success Rate (in %)", yOf: (r) => r.successRatePct },
    { label: "Fees (in %)", yOf: (r) => r.meanFeePct },
  ];
  const panels: PanelSpec[] = metricsSpec.map(({ label, yOf }) => ({
    xLabel: "Nodes Added",
    yLabel: label,
    xTicks: intervals,
    series: strategies.map((name) => ({
      name,
      points: meanBy(
        details.filter((r) => r.strategy === name),
        (r) => r.nodesAdded,
        yOf,
      ),
    })),
  }));
  return renderFigure(panels, strategies);
}

export function renderFigureKind(
  kind: FigureKind,
  rows: MetricRow[],
  baseline?: number,
): string {
  switch (kind) {
    case "success_panels":
      return successPanels(rows, baseline);
    case "fees_routing":
      return feesRouting(rows, baseline);
    case "longterm":
      return longterm(rows);
  }
}
