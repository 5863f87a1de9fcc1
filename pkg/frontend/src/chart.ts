/**
 * Dependency-free SVG scatter chart for frontier views: GWP on x, strength
 * on y, frontier points emphasized, dominated points dimmed, optional sd
 * bands on inferred series. Pure string builder so it is testable headless.
 */

import type { FrontierPoint, FrontierSeries } from "./frontier.js";

const SERIES_COLORS = ["#1a7f37", "#c15400", "#5145cd"];

export interface ChartOptions {
  width?: number;
  height?: number;
  margin?: number;
}

interface Extent {
  min: number;
  max: number;
}

function extent(values: number[], pad = 0.08): Extent {
  if (!values.length) return { min: 0, max: 1 };
  let min = Math.min(...values);
  let max = Math.max(...values);
  if (min === max) {
    min -= 1;
    max += 1;
  }
  const span = max - min;
  return { min: min - pad * span, max: max + pad * span };
}

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function frontierChartSvg(seriesList: FrontierSeries[], options: ChartOptions = {}): string {
  const width = options.width ?? 640;
  const height = options.height ?? 420;
  const margin = options.margin ?? 48;
  const all = seriesList.flatMap((s) => s.points);
  const xExt = extent(all.map((p) => p.gwp));
  const yExt = extent(all.map((p) => p.strength + p.sd));
  const sx = (v: number) => margin + ((v - xExt.min) / (xExt.max - xExt.min)) * (width - 2 * margin);
  const sy = (v: number) =>
    height - margin - ((v - yExt.min) / (yExt.max - yExt.min)) * (height - 2 * margin);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" ` +
      `width="${width}" height="${height}" role="img">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  // axes with unit labels (always displayed)
  const axisY = height - margin;
  parts.push(
    `<line x1="${margin}" y1="${axisY}" x2="${width - margin}" y2="${axisY}" stroke="#444"/>`,
    `<line x1="${margin}" y1="${margin}" x2="${margin}" y2="${axisY}" stroke="#444"/>`,
  );
  const axes = seriesList[0]?.axes ?? { x: "GWP (kgCO2e/m³)", y: "strength (MPa)" };
  parts.push(
    `<text x="${width / 2}" y="${height - 10}" text-anchor="middle" class="axis">` +
      `${esc(axes.x)}</text>`,
    `<text x="14" y="${height / 2}" text-anchor="middle" class="axis" ` +
      `transform="rotate(-90 14 ${height / 2})">${esc(axes.y)}</text>`,
  );
  for (const t of [0, 0.25, 0.5, 0.75, 1]) {
    const xv = xExt.min + t * (xExt.max - xExt.min);
    const yv = yExt.min + t * (yExt.max - yExt.min);
    parts.push(
      `<text x="${sx(xv)}" y="${axisY + 16}" text-anchor="middle" class="tick">` +
        `${xv.toFixed(0)}</text>`,
      `<text x="${margin - 6}" y="${sy(yv) + 4}" text-anchor="end" class="tick">` +
        `${yv.toFixed(0)}</text>`,
    );
  }

  seriesList.forEach((series, si) => {
    const color = SERIES_COLORS[si % SERIES_COLORS.length] ?? "#333";
    for (const p of series.points) {
      parts.push(pointSvg(p, sx, sy, color));
    }
    parts.push(
      `<g class="legend"><circle cx="${width - margin - 150}" cy="${margin + 18 * si}" r="5" ` +
        `fill="${color}"/><text x="${width - margin - 140}" y="${margin + 18 * si + 4}" ` +
        `class="tick">${esc(series.label)}</text></g>`,
    );
  });
  parts.push("</svg>");
  return parts.join("\n");
}

function pointSvg(
  p: FrontierPoint,
  sx: (v: number) => number,
  sy: (v: number) => number,
  color: string,
): string {
  const cx = sx(p.gwp);
  const cy = sy(p.strength);
  const bits: string[] = [];
  if (p.sd > 0) {
    bits.push(
      `<line x1="${cx}" y1="${sy(p.strength - 1.96 * p.sd)}" x2="${cx}" ` +
        `y2="${sy(p.strength + 1.96 * p.sd)}" stroke="${color}" stroke-opacity="0.35"/>`,
    );
  }
  if (p.dominated) {
    bits.push(
      `<circle cx="${cx}" cy="${cy}" r="3.5" fill="${color}" fill-opacity="0.25" ` +
        `class="dominated" data-origin="${p.origin}"/>`,
    );
  } else {
    // frontier members get the highlight ring
    bits.push(
      `<circle cx="${cx}" cy="${cy}" r="4.5" fill="${color}" class="frontier" ` +
        `data-origin="${p.origin}"/>`,
      `<circle cx="${cx}" cy="${cy}" r="7.5" fill="none" stroke="${color}" ` +
        `stroke-opacity="0.6"/>`,
    );
  }
  return bits.join("\n");
}
