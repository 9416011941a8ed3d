/**
 * Minimal deterministic SVG line-chart rendering: multi-panel figures with
 * shared styling, per-series markers, and an optional dashed baseline. No
 * DOM and no randomness, so identical inputs produce identical bytes.
 */

export interface Point {
  x: number;
  y: number;
}

export interface Series {
  name: string;
  points: Point[];
}

export interface PanelSpec {
  title?: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  baseline?: number;
  xTicks?: number[];
}

const PANEL_WIDTH = 360;
const PANEL_HEIGHT = 300;
const MARGIN = { top: 30, right: 16, bottom: 48, left: 64 };
const LEGEND_HEIGHT = 28;

const STRATEGY_STYLE: Record<string, { color: string; marker: string }> = {
  mbi: { color: "#aa3377", marker: "cross" },
  degree: { color: "#ccbb44", marker: "diamond" },
  random: { color: "#228833", marker: "asterisk" },
  betweenness: { color: "#ee6677", marker: "circle" },
  "k-center": { color: "#1965b0", marker: "triangle-down" },
  "k-median": { color: "#66ccee", marker: "triangle-up" },
};

const FALLBACK_COLORS = ["#4477aa", "#999933", "#882255", "#44aa99"];

export function seriesStyle(name: string, index: number) {
  return (
    STRATEGY_STYLE[name] ?? {
      color: FALLBACK_COLORS[index % FALLBACK_COLORS.length],
      marker: "circle",
    }
  );
}

function fmt(value: number): string {
  if (!Number.isFinite(value)) return "0";
  const rounded = Math.round(value * 100) / 100;
  return Object.is(rounded, -0) ? "0" : String(rounded);
}

function niceTicks(lo: number, hi: number, count = 5): number[] {
  if (!Number.isFinite(lo) || !Number.isFinite(hi)) return [0, 1];
  if (lo === hi) {
    lo -= 1;
    hi += 1;
  }
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const candidates = [step, 2 * step, 5 * step, 10 * step];
  const chosen = candidates.find((s) => span / s <= count + 1) ?? 10 * step;
  const ticks: number[] = [];
  for (let t = Math.ceil(lo / chosen) * chosen; t <= hi + 1e-9; t += chosen) {
    ticks.push(Math.round(t * 1e9) / 1e9);
  }
  return ticks.length >= 2 ? ticks : [lo, hi];
}

function marker(kind: string, x: number, y: number, color: string): string {
  const s = 3.5;
  switch (kind) {
    case "diamond":
      return `<path d="M ${fmt(x)} ${fmt(y - s)} L ${fmt(x + s)} ${fmt(y)} L ${fmt(x)} ${fmt(y + s)} L ${fmt(x - s)} ${fmt(y)} Z" fill="${color}"/>`;
    case "triangle-up":
      return `<path d="M ${fmt(x)} ${fmt(y - s)} L ${fmt(x + s)} ${fmt(y + s)} L ${fmt(x - s)} ${fmt(y + s)} Z" fill="${color}"/>`;
    case "triangle-down":
      return `<path d="M ${fmt(x)} ${fmt(y + s)} L ${fmt(x + s)} ${fmt(y - s)} L ${fmt(x - s)} ${fmt(y - s)} Z" fill="${color}"/>`;
    case "cross":
      return `<path d="M ${fmt(x - s)} ${fmt(y - s)} L ${fmt(x + s)} ${fmt(y + s)} M ${fmt(x - s)} ${fmt(y + s)} L ${fmt(x + s)} ${fmt(y - s)}" stroke="${color}" stroke-width="1.5" fill="none"/>`;
    case "asterisk":
      return (
        `<path d="M ${fmt(x)} ${fmt(y - s)} L ${fmt(x)} ${fmt(y + s)} ` +
        `M ${fmt(x - s)} ${fmt(y - s / 2)} L ${fmt(x + s)} ${fmt(y + s / 2)} ` +
        `M ${fmt(x - s)} ${fmt(y + s / 2)} L ${fmt(x + s)} ${fmt(y - s / 2)}" ` +
        `stroke="${color}" stroke-width="1.2" fill="none"/>`
      );
    default:
      return `<circle cx="${fmt(x)}" cy="${fmt(y)}" r="3" fill="${color}"/>`;
  }
}

function renderPanel(spec: PanelSpec, offsetX: number, offsetY: number): string {
  const plotW = PANEL_WIDTH - MARGIN.left - MARGIN.right;
  const plotH = PANEL_HEIGHT - MARGIN.top - MARGIN.bottom;
  const xs = spec.series.flatMap((s) => s.points.map((p) => p.x));
  const ys = spec.series.flatMap((s) => s.points.map((p) => p.y));
  if (spec.baseline !== undefined) ys.push(spec.baseline);
  const xLo = xs.length ? Math.min(...xs) : 0;
  const xHi = xs.length ? Math.max(...xs) : 1;
  const yLo = ys.length ? Math.min(...ys) : 0;
  const yHi = ys.length ? Math.max(...ys) : 1;
  const yPad = yLo === yHi ? 1 : (yHi - yLo) * 0.06;
  const xTicks = spec.xTicks ?? niceTicks(xLo, xHi);
  const yTicks = niceTicks(yLo - yPad, yHi + yPad);
  const xSpan = xHi === xLo ? 1 : xHi - xLo;
  const ySpan = yHi + yPad - (yLo - yPad) || 1;

  const px = (x: number) => MARGIN.left + ((x - xLo) / xSpan) * plotW;
  const py = (y: number) => MARGIN.top + plotH - ((y - (yLo - yPad)) / ySpan) * plotH;

  const parts: string[] = [];
  parts.push(`<g transform="translate(${offsetX},${offsetY})">`);
  if (spec.title) {
    parts.push(
      `<text x="${PANEL_WIDTH / 2}" y="16" text-anchor="middle" font-size="13" font-weight="bold">${spec.title}</text>`,
    );
  }
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" fill="none" stroke="#333"/>`,
  );
  for (const t of xTicks) {
    if (t < xLo - 1e-9 || t > xHi + 1e-9) continue;
    const x = px(t);
    parts.push(
      `<line x1="${fmt(x)}" y1="${MARGIN.top + plotH}" x2="${fmt(x)}" y2="${MARGIN.top + plotH + 4}" stroke="#333"/>`,
      `<text x="${fmt(x)}" y="${MARGIN.top + plotH + 16}" text-anchor="middle" font-size="10">${fmt(t)}</text>`,
    );
  }
  for (const t of yTicks) {
    const y = py(t);
    if (y < MARGIN.top - 1e-9 || y > MARGIN.top + plotH + 1e-9) continue;
    parts.push(
      `<line x1="${MARGIN.left - 4}" y1="${fmt(y)}" x2="${MARGIN.left}" y2="${fmt(y)}" stroke="#333"/>`,
      `<text x="${MARGIN.left - 7}" y="${fmt(y + 3)}" text-anchor="end" font-size="10">${fmt(t)}</text>`,
    );
  }
  parts.push(
    `<text x="${MARGIN.left + plotW / 2}" y="${PANEL_HEIGHT - 10}" text-anchor="middle" font-size="11">${spec.xLabel}</text>`,
    `<text x="14" y="${MARGIN.top + plotH / 2}" text-anchor="middle" font-size="11" transform="rotate(-90 14 ${MARGIN.top + plotH / 2})">${spec.yLabel}</text>`,
  );
  if (spec.baseline !== undefined) {
    const y = py(spec.baseline);
    parts.push(
      `<line class="baseline" x1="${MARGIN.left}" y1="${fmt(y)}" x2="${MARGIN.left + plotW}" y2="${fmt(y)}" stroke="#888" stroke-dasharray="6 4"/>`,
    );
  }
  spec.series.forEach((series, i) => {
    const style = seriesStyle(series.name, i);
    const pts = series.points
      .map((p) => `${fmt(px(p.x))},${fmt(py(p.y))}`)
      .join(" ");
    parts.push(`<g class="series" data-strategy="${series.name}">`);
    if (series.points.length > 1) {
      parts.push(
        `<polyline points="${pts}" fill="none" stroke="${style.color}" stroke-width="1.6"/>`,
      );
    }
    for (const p of series.points) {
      parts.push(marker(style.marker, px(p.x), py(p.y), style.color));
    }
    parts.push("</g>");
  });
  parts.push("</g>");
  return parts.join("\n");
}

function renderLegend(names: string[], width: number, baseline?: number): string {
  const entries = [...names];
  if (baseline !== undefined) entries.push("Net. Avg.");
  const parts: string[] = [`<g transform="translate(0,6)">`];
  const slot = width / Math.max(entries.length, 1);
  entries.forEach((name, i) => {
    const x = slot * i + slot / 2;
    if (name === "Net. Avg.") {
      parts.push(
        `<line x1="${fmt(x - 34)}" y1="10" x2="${fmt(x - 14)}" y2="10" stroke="#888" stroke-dasharray="6 4"/>`,
      );
    } else {
      const style = seriesStyle(name, i);
      parts.push(
        `<line x1="${fmt(x - 34)}" y1="10" x2="${fmt(x - 14)}" y2="10" stroke="${style.color}" stroke-width="1.6"/>`,
        marker(style.marker, x - 24, 10, style.color),
      );
    }
    parts.push(`<text x="${fmt(x - 10)}" y="13" font-size="11">${name}</text>`);
  });
  parts.push("</g>");
  return parts.join("\n");
}

export function renderFigure(panels: PanelSpec[], legendNames: string[], baseline?: number): string {
  const width = PANEL_WIDTH * panels.length;
  const height = PANEL_HEIGHT + LEGEND_HEIGHT;
  const body = panels
    .map((panel, i) => renderPanel(panel, PANEL_WIDTH * i, LEGEND_HEIGHT))
    .join("\n");
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`,
    `<rect width="${width}" height="${height}" fill="white"/>`,
    renderLegend(legendNames, width, baseline),
    body,
    "</svg>",
    "",
  ].join("\n");
}
