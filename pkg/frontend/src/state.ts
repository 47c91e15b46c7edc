import { CLASS_KEYS, isValidAlpha, SuitabilityClass } from "./api.js";

export interface Viewport {
  x0: number;
  y0: number;
  x1: number;
  y1: number;
}

/** UI state shared by the map, the breakdown panel and the slider.
 *
 * Invariants enforced here rather than at call sites: alpha stays in [0,1]
 * and a selection must reference a cell present in the current layer.
 */
export class ViewState {
  viewport: Viewport;
  selectedGridId: number | null = null;
  private alphaValue: number;
  private readonly visible = new Set<SuitabilityClass>(CLASS_KEYS);

  constructor(viewport: Viewport, alpha = 0.9) {
    if (!isValidAlpha(alpha)) {
      throw new RangeError(`alpha ${alpha} out of [0,1]`);
    }
    this.viewport = viewport;
    this.alphaValue = alpha;
  }

  get alpha(): number {
    return this.alphaValue;
  }

  setAlpha(alpha: number): void {
    if (!isValidAlpha(alpha)) {
      throw new RangeError(`alpha ${alpha} out of [0,1]`);
    }
    this.alphaValue = alpha;
  }

  select(gridId: number | null, layerIds: ReadonlySet<number>): void {
    if (gridId !== null && !layerIds.has(gridId)) {
      throw new Error(`grid ${gridId} is not in the current layer`);
    }
    this.selectedGridId = gridId;
  }

  isVisible(cls: SuitabilityClass): boolean {
    return this.visible.has(cls);
  }

  visibleClasses(): ReadonlySet<SuitabilityClass> {
    return this.visible;
  }

  toggleClass(cls: SuitabilityClass): boolean {
    if (this.visible.has(cls)) {
      this.visible.delete(cls);
      return false;
    }
    this.visible.add(cls);
    return true;
  }
}
