import { describe, expect, it } from "vitest";

import { cellAt, clampSize, metricsFor, proposeMove, proposeResize, rectOf } from "../src/grid.js";
import { DESCRIPTORS } from "./fixtures.js";

const GRID = { columns: 12, row_unit_px: 24 };
const CHAT = DESCRIPTORS.find((d) => d.component_id === "chat")!;

describe("metrics and snapping", () => {
  it("divides the board width into columns", () => {
    const metrics = metricsFor(GRID, 12 * 80 + 11 * 6);
    expect(metrics.cellWidthPx).toBeCloseTo(80);
    expect(metrics.rowHeightPx).toBe(24);
  });

  it("snaps pixels to the nearest cell and clamps into the grid", () => {
    const metrics = metricsFor(GRID, 12 * 80 + 11 * 6);
    expect(cellAt(GRID, metrics, 0, 0)).toEqual({ col: 0, row: 0 });
    expect(cellAt(GRID, metrics, 86 * 3 + 10, 30 * 2)).toEqual({ col: 3, row: 2 });
    expect(cellAt(GRID, metrics, 10_000, -50)).toEqual({ col: 11, row: 0 });
  });

  it("rectOf is the inverse of the cell geometry", () => {
    const metrics = metricsFor(GRID, 12 * 80 + 11 * 6);
    const rect = rectOf({ col: 2, row: 3, width: 4, height: 2 }, metrics);
    expect(rect.left).toBeCloseTo(2 * 86);
    expect(rect.top).toBeCloseTo(3 * 30);
    expect(rect.width).toBeCloseTo(4 * 80 + 3 * 6);
    expect(rect.height).toBeCloseTo(2 * 24 + 6);
  });
});

describe("clamping proposals", () => {
  it("clamps sizes to descriptor bounds", () => {
    expect(clampSize(CHAT, GRID, 1, 1)).toEqual({ width: 3, height: 4 });
    expect(clampSize(CHAT, GRID, 40, 40)).toEqual({ width: 6, height: 12 });
  });

  it("clamps width to the grid when the descriptor allows more", () => {
    const wide = { ...CHAT, max_size: { width: 64, height: 12 } };
    expect(clampSize(wide, GRID, 40, 6)).toEqual({ width: 12, height: 6 });
  });

  it("moves stay inside the columns and above row zero", () => {
    const placement = { col: 4, row: 2, width: 4, height: 6 };
    expect(proposeMove(GRID, placement, 20, 5)).toEqual({ col: 8, row: 5, width: 4, height: 6 });
    expect(proposeMove(GRID, placement, -3, -2)).toEqual({ col: 0, row: 0, width: 4, height: 6 });
  });

  it("resizes respect the remaining width at the anchor column", () => {
    const placement = { col: 10, row: 0, width: 3, height: 4 };
    const proposal = proposeResize(GRID, CHAT, placement, 6, 6);
    expect(proposal.width).toBe(2 + 0); // only 2 columns remain right of col 10
    expect(proposal.height).toBe(6);
  });

  it("resize below the minimum snaps up to the minimum", () => {
    const placement = { col: 0, row: 0, width: 4, height: 6 };
    const proposal = proposeResize(GRID, CHAT, placement, 1, 2);
    expect(proposal).toEqual({ col: 0, row: 0, width: 3, height: 4 });
  });
});
