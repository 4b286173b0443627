/** UI session state: scene snapshot, selection, camera, edit history cursor. */

import { DEFAULT_CAMERA, clampOrbit } from "./orbit.js";
import type { CameraParams, ProjectionEntry, SceneDoc } from "./types.js";

export class UiState {
  scene: SceneDoc | null = null;
  etag: string | null = null;
  selected: number | null = null;
  camera: CameraParams = { ...DEFAULT_CAMERA };
  projections: ProjectionEntry[] = [];
  /** Count of edits applied this session; drives the undo badge. */
  historyCursor = 0;

  setScene(scene: SceneDoc, etag: string | null = null): void {
    this.scene = scene;
    this.etag = etag;
    if (this.selected !== null && this.selected >= scene.blobs.length) {
      this.selected = null;
    }
  }

  select(index: number | null): void {
    if (index !== null && (this.scene === null || index < 0 || index >= this.scene.blobs.length)) {
      return;
    }
    this.selected = index;
  }

  updateCamera(patch: Partial<CameraParams>): void {
    this.camera = clampOrbit({ ...this.camera, ...patch });
  }

  recordEdit(): void {
    this.historyCursor += 1;
  }

  recordUndo(): void {
    this.historyCursor = Math.max(0, this.historyCursor - 1);
  }

  /** Nearest projected blob within `radiusPx` of a canvas point, if any. */
  pickBlob(x: number, y: number, radiusPx = 24): ProjectionEntry | null {
    let best: ProjectionEntry | null = null;
    let bestDist = radiusPx;
    for (const entry of this.projections) {
      if (!entry.active || entry.u === null || entry.v === null) continue;
      const dist = Math.hypot(entry.u - x, entry.v - y);
      if (dist <= bestDist) {
        best = entry;
        bestDist = dist;
      }
    }
    return best;
  }
}
