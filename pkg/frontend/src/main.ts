/**
 * DOM wiring for the scene editor. All pure logic (drag math, scheduling,
 * orbit basis, picking) lives in the sibling modules and is unit tested;
 * this file only connects it to elements and pointer events.
 */

import { ApiClient, ApiError } from "./api.js";
import { DragGesture, type DragContext } from "./drag.js";
import { orbitBasis } from "./orbit.js";
import { EditQueue, RenderScheduler } from "./scheduler.js";
import { UiState } from "./state.js";
import type { EditOp } from "./types.js";

const RESOLUTION = 128;

function element<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
}

const params = new URLSearchParams(window.location.search);
const baseUrl = params.get("service") ?? "http://127.0.0.1:8787";

const api = new ApiClient(baseUrl);
const state = new UiState();
const edits = new EditQueue();

const view = element<HTMLImageElement>("view");
const overlay = element<HTMLCanvasElement>("overlay");
const toast = element<HTMLDivElement>("toast");
const undoBadge = element<HTMLSpanElement>("undo-badge");
const depthField = element<HTMLInputElement>("depth-field");
const blobLabel = element<HTMLSpanElement>("blob-label");

let lastObjectUrl: string | null = null;
const scheduler = new RenderScheduler<Blob>((blob) => {
  if (lastObjectUrl) URL.revokeObjectURL(lastObjectUrl);
  lastObjectUrl = URL.createObjectURL(blob);
  view.src = lastObjectUrl;
});

function showToast(text: string): void {
  toast.textContent = text;
  toast.classList.add("visible");
  window.setTimeout(() => toast.classList.remove("visible"), 2600);
}

function reportError(error: unknown): void {
  if (error instanceof ApiError) {
    const where = error.payload.path ? ` at ${error.payload.path}` : "";
    showToast(`${error.payload.error ?? error.status}${where}: ${error.message}`);
  } else {
    showToast(String(error));
  }
}

function requestRender(): void {
  scheduler.request(() => api.renderLayout(state.camera, RESOLUTION));
}

async function refreshProjections(): Promise<void> {
  try {
    state.projections = await api.projections(state.camera);
    drawOverlay();
    updateSelectionPanel();
  } catch (error) {
    reportError(error);
  }
}

function canvasPoint(event: PointerEvent): { x: number; y: number } {
  const rect = overlay.getBoundingClientRect();
  return {
    x: ((event.clientX - rect.left) / rect.width) * state.camera.width,
    y: ((event.clientY - rect.top) / rect.height) * state.camera.height,
  };
}

function drawOverlay(): void {
  const ctx = overlay.getContext("2d");
  if (!ctx) return;
  ctx.clearRect(0, 0, overlay.width, overlay.height);
  const sx = overlay.width / state.camera.width;
  const sy = overlay.height / state.camera.height;
  for (const entry of state.projections) {
    if (entry.u === null || entry.v === null) continue;
    ctx.beginPath();
    ctx.arc(entry.u * sx, entry.v * sy, entry.index === state.selected ? 9 : 5, 0, 2 * Math.PI);
    ctx.strokeStyle = entry.index === state.selected ? "#ffd166" : "rgba(255,255,255,0.7)";
    ctx.lineWidth = entry.index === state.selected ? 3 : 1.5;
    if (!entry.active) ctx.setLineDash([3, 3]);
    ctx.stroke();
    ctx.setLineDash([]);
  }
}

function updateSelectionPanel(): void {
  undoBadge.textContent = String(state.historyCursor);
  if (state.selected === null) {
    blobLabel.textContent = "none";
    depthField.value = "";
    return;
  }
  blobLabel.textContent = `#${state.selected}`;
  const entry = state.projections[state.selected];
  if (entry) depthField.value = entry.depth.toFixed(3);
}

function submitEdit(op: EditOp): Promise<void> {
  return edits.submit(async () => {
    try {
      const scene = await api.postEdit(op);
      state.setScene(scene);
      state.recordEdit();
      requestRender();
      await refreshProjections();
    } catch (error) {
      reportError(error); // state unchanged on 4xx
    }
  });
}

// --- pointer interaction ----------------------------------------------------

let gesture: DragGesture | null = null;

overlay.addEventListener("pointerdown", (event) => {
  const point = canvasPoint(event);
  const picked = state.pickBlob(point.x, point.y);
  if (!picked || picked.u === null) {
    state.select(null);
    drawOverlay();
    updateSelectionPanel();
    return;
  }
  state.select(picked.index);
  drawOverlay();
  updateSelectionPanel();
  const context: DragContext = {
    blobIndex: picked.index,
    mode: event.shiftKey ? "depth" : "plane",
    basis: orbitBasis(state.camera),
    pxPerUnitU: picked.px_per_unit_u ?? 1,
    pxPerUnitV: picked.px_per_unit_v ?? 1,
  };
  gesture = new DragGesture(context, point.x, point.y);
  overlay.setPointerCapture(event.pointerId);
});

overlay.addEventListener("pointermove", (event) => {
  if (!gesture) return;
  const point = canvasPoint(event);
  gesture.move(point.x, point.y);
});

overlay.addEventListener("pointerup", () => {
  if (!gesture) return;
  const op = gesture.end();
  gesture = null;
  if (op) void submitEdit(op); // exactly one Move per completed gesture
});

// --- camera controls ---------------------------------------------------------

for (const name of ["yaw", "pitch", "radius"] as const) {
  const slider = element<HTMLInputElement>(`${name}-slider`);
  slider.addEventListener("input", () => {
    state.updateCamera({ [name]: Number(slider.value) });
    requestRender();
    void refreshProjections();
  });
}

// --- edit buttons -------------------------------------------------------------

element<HTMLButtonElement>("undo-button").addEventListener("click", () => {
  void edits.submit(async () => {
    try {
      const scene = await api.undo();
      state.setScene(scene);
      state.recordUndo();
      requestRender();
      await refreshProjections();
    } catch (error) {
      reportError(error);
    }
  });
});

element<HTMLButtonElement>("remove-button").addEventListener("click", () => {
  if (state.selected === null || state.scene === null) return;
  const active = state.scene.blobs[state.selected]?.active ?? true;
  void submitEdit({
    kind: active ? "Remove" : "Restore",
    target: state.selected,
    payload: [],
  });
});

element<HTMLButtonElement>("duplicate-button").addEventListener("click", () => {
  if (state.selected === null) return;
  void submitEdit({
    kind: "Duplicate",
    target: state.selected,
    payload: [0.05, 0.0, 0.0],
  });
});

element<HTMLButtonElement>("restyle-button").addEventListener("click", () => {
  if (state.selected === null || state.scene === null) return;
  const source = Number(element<HTMLInputElement>("restyle-source").value);
  const donor = state.scene.blobs[source];
  if (!donor) {
    showToast(`no blob #${source} to take a style from`);
    return;
  }
  // restyle = copy the donor's style vector; geometry and layout untouched
  void submitEdit({ kind: "Restyle", target: state.selected, payload: [...donor.style] });
});

element<HTMLButtonElement>("swap-button").addEventListener("click", () => {
  if (state.selected === null) return;
  const other = Number(element<HTMLInputElement>("restyle-source").value);
  void submitEdit({ kind: "Swap", target: state.selected, target2: other, payload: [] });
});

depthField.addEventListener("change", () => {
  if (state.selected === null) return;
  const entry = state.projections[state.selected];
  const target = Number(depthField.value);
  if (!entry || !Number.isFinite(target)) return;
  const along = target - entry.depth;
  const { forward } = orbitBasis(state.camera);
  void submitEdit({
    kind: "Move",
    target: state.selected,
    payload: [forward[0] * along, forward[1] * along, forward[2] * along],
  });
});

// --- boot ---------------------------------------------------------------------

async function boot(): Promise<void> {
  try {
    const { scene, etag } = await api.getScene();
    state.setScene(scene, etag);
    requestRender();
    await refreshProjections();
  } catch (error) {
    reportError(error);
    showToast(`cannot reach service at ${baseUrl} - is 'blobfield serve' running?`);
  }
}

void boot();
