import { ApiClient, ClassDistribution, GridCellSummary, SuitabilityClass, CLASS_KEYS } from "./api.js";
import { BreakdownPanel, BreakdownView } from "./breakdown.js";
import { buildLayer, Choropleth, CLASS_COLORS, layerIds, legendCounts, RenderedCell } from "./choropleth.js";
import { ViewState } from "./state.js";
import { WhatifController } from "./whatif.js";

const CELL_SIZE_M = 265;
const DEFAULT_ALPHA = 0.9;

declare global {
  interface Window {
    serviceBaseUrl?: string;
  }
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function showToast(message: string): void {
  const toast = el<HTMLDivElement>("toast");
  toast.textContent = message;
  toast.classList.add("visible");
  setTimeout(() => toast.classList.remove("visible"), 4000);
}

function classLabel(cls: SuitabilityClass): string {
  return cls.replace(/_/g, " ");
}

function renderLegend(layer: readonly RenderedCell[], distribution: ClassDistribution | null): void {
  const counts = legendCounts(layer);
  const rows = CLASS_KEYS.map((cls) => {
    const share = distribution ? ` · ${distribution[`${cls}_pct`].toFixed(1)}%` : "";
    return `<li><span class="swatch" style="background:${CLASS_COLORS[cls]}"></span>` +
      `${classLabel(cls)}: ${counts[cls]}${share}</li>`;
  });
  el<HTMLUListElement>("legend").innerHTML = rows.join("");
}

function renderBreakdown(view: BreakdownView): void {
  const panel = el<HTMLDivElement>("panel");
  switch (view.kind) {
    case "empty":
      panel.innerHTML = "<p>Click a cell for its scoring sheet.</p>";
      return;
    case "loading":
      panel.innerHTML = `<p>Loading cell ${view.gridId}…</p>`;
      return;
    case "not_found":
      panel.innerHTML = `<p class="error">cell not found (grid ${view.gridId})</p>`;
      return;
    case "error":
      panel.innerHTML = `<p class="error">${view.message}</p>`;
      return;
    case "loaded": {
      const b = view.data;
      const rows = b.rules
        .map(
          (r) =>
            `<tr><td>${r.rule_id}</td><td>${r.raw.toFixed(2)}/${r.max_raw}</td>` +
            `<td>${r.contribution.toFixed(2)}/${r.weight}</td></tr>`,
        )
        .join("");
      const reasons = b.exclusion_reasons.length
        ? `<p class="error">excluded: ${b.exclusion_reasons.join(", ")}</p>`
        : "";
      panel.innerHTML =
        `<h3>Grid ${b.grid_id} — ${classLabel(b.class)}</h3>` +
        reasons +
        `<p>s ${b.s.toFixed(2)} · m ${b.m.toFixed(2)} · x ${b.x.toFixed(2)}` +
        ` · check Δ ${view.reconciliation.toFixed(4)}</p>` +
        `<table><thead><tr><th>rule</th><th>points</th><th>weighted</th></tr></thead>` +
        `<tbody>${rows}</tbody></table>`;
      return;
    }
  }
}

async function boot(): Promise<void> {
  const api = new ApiClient(window.serviceBaseUrl ?? "http://127.0.0.1:8000");
  const canvas = el<HTMLCanvasElement>("map");
  const ctx = canvas.getContext("2d");
  if (!ctx) throw new Error("canvas 2d context unavailable");

  const state = new ViewState({ x0: 0, y0: 0, x1: 5300, y1: 2650 }, DEFAULT_ALPHA);
  const map = new Choropleth(CELL_SIZE_M, 0.18, 20, 20);
  let cells: GridCellSummary[] = [];
  let layer: RenderedCell[] = [];
  let highlights: ReadonlySet<number> = new Set();
  let distribution: ClassDistribution | null = null;

  const redraw = (): void => {
    layer = buildLayer(cells, state.visibleClasses(), highlights);
    map.draw(ctx, layer, canvas.width, canvas.height);
    renderLegend(layer, distribution);
  };

  const panel = new BreakdownPanel(api, () => state.alpha, renderBreakdown);
  renderBreakdown(panel.view);

  const whatif = new WhatifController(api, DEFAULT_ALPHA, {
    onDistribution: (dist) => {
      distribution = dist;
      redraw();
    },
    onHighlights: (ids) => {
      highlights = ids;
      redraw();
    },
    onRevert: (alpha) => {
      state.setAlpha(alpha);
      el<HTMLInputElement>("alpha").value = String(alpha);
      el<HTMLSpanElement>("alpha-value").textContent = alpha.toFixed(2);
    },
    onError: showToast,
  });

  const refreshCells = async (): Promise<void> => {
    const v = state.viewport;
    try {
      cells = await api.grids([v.x0, v.y0, v.x1, v.y1]);
      el<HTMLDivElement>("banner").classList.remove("visible");
    } catch (err) {
      // keep the stale layer on screen; just tell the operator
      el<HTMLDivElement>("banner").textContent =
        `service unreachable: ${err instanceof Error ? err.message : String(err)}`;
      el<HTMLDivElement>("banner").classList.add("visible");
    }
    redraw();
  };

  // controls -----------------------------------------------------------
  const slider = el<HTMLInputElement>("alpha");
  slider.value = String(DEFAULT_ALPHA);
  slider.addEventListener("input", () => {
    const alpha = Number(slider.value);
    state.setAlpha(alpha);
    el<HTMLSpanElement>("alpha-value").textContent = alpha.toFixed(2);
    whatif.request(alpha);
  });

  const togglesHost = el<HTMLDivElement>("toggles");
  for (const cls of CLASS_KEYS) {
    const label = document.createElement("label");
    const box = document.createElement("input");
    box.type = "checkbox";
    box.checked = true;
    box.addEventListener("change", () => {
      state.toggleClass(cls);
      redraw();
    });
    label.append(box, ` ${classLabel(cls)}`);
    togglesHost.append(label);
  }

  canvas.addEventListener("click", (event) => {
    const rect = canvas.getBoundingClientRect();
    const gridId = map.cellAt(
      layer,
      event.clientX - rect.left,
      event.clientY - rect.top,
      canvas.height,
    );
    state.select(gridId, layerIds(layer));
    if (gridId !== null) void panel.select(gridId);
    else panel.clear();
  });

  let dragging = false;
  let lastX = 0;
  let lastY = 0;
  canvas.addEventListener("mousedown", (event) => {
    dragging = true;
    lastX = event.clientX;
    lastY = event.clientY;
  });
  window.addEventListener("mouseup", () => {
    dragging = false;
  });
  window.addEventListener("mousemove", (event) => {
    if (!dragging) return;
    map.pan(event.clientX - lastX, event.clientY - lastY);
    lastX = event.clientX;
    lastY = event.clientY;
    map.draw(ctx, layer, canvas.width, canvas.height);
  });
  canvas.addEventListener("wheel", (event) => {
    event.preventDefault();
    const rect = canvas.getBoundingClientRect();
    map.zoomAt(
      event.clientX - rect.left,
      event.clientY - rect.top,
      event.deltaY < 0 ? 1.15 : 1 / 1.15,
      canvas.height,
    );
    map.draw(ctx, layer, canvas.width, canvas.height);
  });

  // boot ----------------------------------------------------------------
  try {
    await api.health();
  } catch {
    el<HTMLDivElement>("banner").textContent = "service unreachable";
    el<HTMLDivElement>("banner").classList.add("visible");
  }
  try {
    distribution = (await api.summary()).distribution;
  } catch {
    distribution = null;
  }
  await refreshCells();
}

void boot();
