// Dependency-free SVG line chart for the two cumulative token series.

import type { ChartSeries } from "./state";

export interface ChartGeometry {
  width: number;
  height: number;
  padding: number;
}

export const DEFAULT_GEOMETRY: ChartGeometry = { width: 560, height: 220, padding: 36 };

export interface ChartPoint {
  turn: number;
  x: number;
  yBaseline: number;
  yCore: number;
}

export function chartPoints(series: ChartSeries, geometry: ChartGeometry = DEFAULT_GEOMETRY): ChartPoint[] {
  const { width, height, padding } = geometry;
  const n = series.turns.length;
  const maxY = Math.max(...series.baselineCumulative, ...series.coreCumulative, 1);
  const spanX = width - 2 * padding;
  const spanY = height - 2 * padding;
  const xFor = (i: number) => padding + (n === 1 ? spanX / 2 : (i * spanX) / (n - 1));
  const yFor = (v: number) => height - padding - (v / maxY) * spanY;
  return series.turns.map((turn, i) => ({
    turn,
    x: xFor(i),
    yBaseline: yFor(series.baselineCumulative[i]),
    yCore: yFor(series.coreCumulative[i]),
  }));
}

function polyline(points: { x: number; y: number }[], stroke: string): string {
  const joined = points.map((p) => `${p.x.toFixed(1)},${p.y.toFixed(1)}`).join(" ");
  return `<polyline fill="none" stroke="${stroke}" stroke-width="2" points="${joined}"/>`;
}

export function renderChartSvg(series: ChartSeries, geometry: ChartGeometry = DEFAULT_GEOMETRY): string {
  const points = chartPoints(series, geometry);
  const { width, height, padding } = geometry;
  const axis = `<line x1="${padding}" y1="${height - padding}" x2="${width - padding}" y2="${height - padding}" stroke="#444"/>`;
  const baseline = polyline(points.map((p) => ({ x: p.x, y: p.yBaseline })), "#f08c4a");
  const core = polyline(points.map((p) => ({ x: p.x, y: p.yCore })), "#4ac1f0");
  const markers = points
    .map(
      (p) =>
        `<circle data-turn="${p.turn}" cx="${p.x.toFixed(1)}" cy="${p.yCore.toFixed(1)}" r="7" fill="transparent" class="hit"/>`
    )
    .join("");
  return (
    `<svg viewBox="0 0 ${width} ${height}" role="img" aria-label="cumulative prompt tokens">` +
    axis +
    baseline +
    core +
    markers +
    `</svg>`
  );
}

/** Index of the chart point nearest to an x offset (for hover tooltips). */
export function nearestTurnIndex(points: ChartPoint[], x: number): number {
  let best = 0;
  for (let i = 1; i < points.length; i++) {
    if (Math.abs(points[i].x - x) < Math.abs(points[best].x - x)) best = i;
  }
  return best;
}
