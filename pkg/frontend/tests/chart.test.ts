// Chart series, cumulative verification, and the tooltip contract against
// the frozen reference stats (the published 10-turn token table).

import { describe, expect, it } from "vitest";

import { chartPoints, nearestTurnIndex, renderChartSvg } from "../src/chart";
import { chartSeries, tooltipText, verifyCumulative } from "../src/state";
import type { TokenStatsRow } from "../src/types";

import replay from "./fixtures/replay_stats.json";

const rows = replay.rows as TokenStatsRow[];

describe("chart series", () => {
  it("builds both cumulative series from server rows", () => {
    const series = chartSeries(rows)!;
    expect(series.turns).toHaveLength(10);
    expect(series.baselineCumulative.at(-1)).toBe(2665);
    expect(series.coreCumulative.at(-1)).toBe(1540);
  });

  it("is hidden (null) when the shadow baseline is disabled", () => {
    const noBaseline: TokenStatsRow[] = rows.map((r) => ({
      ...r,
      baseline_prompt_tokens: null,
      baseline_cumulative: null,
      savings_pct: null,
      cumulative_savings_pct: null,
    }));
    expect(chartSeries(noBaseline)).toBeNull();
  });

  it("renders one point per turn, a single-point series for one turn", () => {
    const single = chartSeries(rows.slice(0, 1))!;
    expect(chartPoints(single)).toHaveLength(1);
    const svg = renderChartSvg(single);
    expect(svg).toContain("circle");
  });
});

describe("cumulative verification", () => {
  it("accepts the server columns", () => {
    expect(verifyCumulative(rows)).toBe(true);
  });

  it("rejects tampered cumulative columns", () => {
    const tampered = rows.map((r, i) =>
      i === 4 ? { ...r, core_cumulative: r.core_cumulative + 1 } : r
    );
    expect(verifyCumulative(tampered)).toBe(false);
  });
});

describe("tooltip", () => {
  it("shows the turn-10 cumulative savings from the reference data", () => {
    const text = tooltipText(rows[9]);
    expect(text).toContain("Turn 10");
    expect(text).toContain("cumulative savings 42.2%");
  });

  it("includes the per-turn row values", () => {
    const text = tooltipText(rows[0]);
    expect(text).toContain("baseline 90 tok");
    expect(text).toContain("concept-first 155 tok");
    expect(text).toContain("savings -72.2%");
  });

  it("hover hit-testing picks the nearest turn", () => {
    const series = chartSeries(rows)!;
    const points = chartPoints(series);
    expect(nearestTurnIndex(points, points[9].x + 2)).toBe(9);
    expect(nearestTurnIndex(points, points[0].x - 50)).toBe(0);
  });
});

describe("svg output", () => {
  it("contains both series and monotone x coordinates", () => {
    const series = chartSeries(rows)!;
    const svg = renderChartSvg(series);
    expect((svg.match(/<polyline/g) ?? []).length).toBe(2);
    const points = chartPoints(series);
    const xs = points.map((p) => p.x);
    expect([...xs].sort((a, b) => a - b)).toEqual(xs);
  });
});
