/** Pointer-to-grid geometry: snapping pixels to cells and clamping
 * drag/resize proposals to descriptor bounds and the grid width.
 */

import { ComponentDescriptor, GridSpec, Placement } from "./types.js";

export interface CellMetrics {
  cellWidthPx: number;
  rowHeightPx: number;
  gapPx: number;
}

export function metricsFor(grid: GridSpec, boardWidthPx: number, gapPx = 6): CellMetrics {
  const cellWidthPx = (boardWidthPx - gapPx * (grid.columns - 1)) / grid.columns;
  return { cellWidthPx, rowHeightPx: grid.row_unit_px, gapPx };
}

/** Cell under a board-relative pixel point (clamped into the grid). */
export function cellAt(grid: GridSpec, metrics: CellMetrics, xPx: number, yPx: number): { col: number; row: number } {
  const stepX = metrics.cellWidthPx + metrics.gapPx;
  const stepY = metrics.rowHeightPx + metrics.gapPx;
  const col = Math.min(Math.max(Math.round(xPx / stepX), 0), grid.columns - 1);
  const row = Math.max(Math.round(yPx / stepY), 0);
  return { col, row };
}

export function clampSize(
  descriptor: ComponentDescriptor,
  grid: GridSpec,
  width: number,
  height: number,
): { width: number; height: number } {
  const maxWidth = Math.min(descriptor.max_size.width, grid.columns);
  return {
    width: Math.min(Math.max(width, descriptor.min_size.width), maxWidth),
    height: Math.min(Math.max(height, descriptor.min_size.height), descriptor.max_size.height),
  };
}

/** Move proposal: keep size, snap the top-left corner, stay in bounds. */
export function proposeMove(grid: GridSpec, placement: Placement, col: number, row: number): Placement {
  const clampedCol = Math.min(Math.max(col, 0), grid.columns - placement.width);
  return { ...placement, col: clampedCol, row: Math.max(row, 0) };
}

/** Resize proposal: keep the corner, clamp the span to descriptor bounds
 * and the remaining grid width. */
export function proposeResize(
  grid: GridSpec,
  descriptor: ComponentDescriptor,
  placement: Placement,
  width: number,
  height: number,
): Placement {
  const clamped = clampSize(descriptor, grid, width, height);
  const maxWidthHere = grid.columns - placement.col;
  return { ...placement, width: Math.min(clamped.width, maxWidthHere), height: clamped.height };
}

/** Pixel rectangle of a placement (for absolute positioning). */
export function rectOf(placement: Placement, metrics: CellMetrics): { left: number; top: number; width: number; height: number } {
  const stepX = metrics.cellWidthPx + metrics.gapPx;
  const stepY = metrics.rowHeightPx + metrics.gapPx;
  return {
    left: placement.col * stepX,
    top: placement.row * stepY,
    width: placement.width * metrics.cellWidthPx + (placement.width - 1) * metrics.gapPx,
    height: placement.height * metrics.rowHeightPx + (placement.height - 1) * metrics.gapPx,
  };
}
