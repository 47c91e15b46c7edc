import { CLASS_KEYS, GridCellSummary, SuitabilityClass } from "./api.js";

/** Fixed 4-color legend; grey for unsuitable, amber through green upward. */
export const CLASS_COLORS: Record<SuitabilityClass, string> = {
  largely_unsuitable: "#9e9e9e",
  low: "#f6c445",
  medium: "#8bc24a",
  high: "#1b7f3b",
};

export const HIGHLIGHT_COLOR = "#e0245e";

export interface RenderedCell {
  gridId: number;
  origin: [number, number];
  suitability: SuitabilityClass;
  color: string;
  highlighted: boolean;
}

/** Cells that will actually be drawn: class toggles applied, colors fixed.
 * Legend counts are derived from this same list so they can never disagree
 * with the map. */
export function buildLayer(
  cells: readonly GridCellSummary[],
  visible: ReadonlySet<SuitabilityClass>,
  highlighted: ReadonlySet<number> = new Set(),
): RenderedCell[] {
  const out: RenderedCell[] = [];
  for (const cell of cells) {
    if (!visible.has(cell.class)) continue;
    out.push({
      gridId: cell.grid_id,
      origin: cell.origin,
      suitability: cell.class,
      color: CLASS_COLORS[cell.class],
      highlighted: highlighted.has(cell.grid_id),
    });
  }
  return out;
}

export function legendCounts(layer: readonly RenderedCell[]): Record<SuitabilityClass, number> {
  const counts = Object.fromEntries(CLASS_KEYS.map((k) => [k, 0])) as Record<
    SuitabilityClass,
    number
  >;
  for (const cell of layer) counts[cell.suitability] += 1;
  return counts;
}

export function layerIds(layer: readonly RenderedCell[]): Set<number> {
  return new Set(layer.map((c) => c.gridId));
}

/** The subset of the 2d context the renderer touches, so tests can pass a
 * recording fake instead of a real canvas. Style types mirror the DOM's
 * unions so a real CanvasRenderingContext2D satisfies it directly. */
export interface Canvas2dLike {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  fillRect(x: number, y: number, w: number, h: number): void;
  strokeRect(x: number, y: number, w: number, h: number): void;
  clearRect(x: number, y: number, w: number, h: number): void;
}

/** Planar pan/zoom camera over world meters; no map tiles, the engine's
 * coordinates are already planar. Y flips so north is up. */
export class Choropleth {
  scale: number;
  offsetX: number;
  offsetY: number;

  constructor(readonly cellSizeM: number, scale = 0.1, offsetX = 0, offsetY = 0) {
    this.scale = scale;
    this.offsetX = offsetX;
    this.offsetY = offsetY;
  }

  worldToScreen(wx: number, wy: number, height: number): [number, number] {
    return [wx * this.scale + this.offsetX, height - (wy * this.scale + this.offsetY)];
  }

  screenToWorld(sx: number, sy: number, height: number): [number, number] {
    return [(sx - this.offsetX) / this.scale, (height - sy - this.offsetY) / this.scale];
  }

  pan(dxPixels: number, dyPixels: number): void {
    this.offsetX += dxPixels;
    this.offsetY -= dyPixels; // screen y grows downward
  }

  /** Zoom by `factor` keeping the world point under (sx, sy) fixed. */
  zoomAt(sx: number, sy: number, factor: number, height: number): void {
    const [wx, wy] = this.screenToWorld(sx, sy, height);
    this.scale *= factor;
    this.offsetX = sx - wx * this.scale;
    this.offsetY = height - sy - wy * this.scale;
  }

  draw(ctx: Canvas2dLike, layer: readonly RenderedCell[], width: number, height: number): void {
    ctx.clearRect(0, 0, width, height);
    const side = this.cellSizeM * this.scale;
    for (const cell of layer) {
      const [sx, sy] = this.worldToScreen(cell.origin[0], cell.origin[1] + this.cellSizeM, height);
      ctx.fillStyle = cell.color;
      ctx.fillRect(sx, sy, side, side);
    }
    // outlines in a second pass so fills never cover them
    for (const cell of layer) {
      if (!cell.highlighted) continue;
      const [sx, sy] = this.worldToScreen(cell.origin[0], cell.origin[1] + this.cellSizeM, height);
      ctx.strokeStyle = HIGHLIGHT_COLOR;
      ctx.lineWidth = 2;
      ctx.strokeRect(sx, sy, side, side);
    }
  }

  cellAt(
    layer: readonly RenderedCell[],
    sx: number,
    sy: number,
    height: number,
  ): number | null {
    const [wx, wy] = this.screenToWorld(sx, sy, height);
    for (const cell of layer) {
      const [ox, oy] = cell.origin;
      if (wx >= ox && wx < ox + this.cellSizeM && wy >= oy && wy < oy + this.cellSizeM) {
        return cell.gridId;
      }
    }
    return null;
  }
}
