/**
 * Drag gestures over the render canvas.
 *
 * A gesture accumulates pointer motion between down and up and emits at
 * most ONE Move op when it ends; zero-pixel gestures emit nothing. Plane
 * drags use the linearized projection Jacobian the service reports
 * (pixels per world unit at the blob's depth), so the world translation is
 * the approximate inverse of the projection at the centroid. Depth drags
 * map vertical pixels onto the camera's forward axis at the same scale.
 */

import type { OrbitBasis } from "./orbit.js";
import type { EditOp, Vec3 } from "./types.js";

export type DragMode = "plane" | "depth";

export interface DragContext {
  blobIndex: number;
  mode: DragMode;
  basis: OrbitBasis;
  /** Pixels per world unit at the blob centroid, from /blobs/projections. */
  pxPerUnitU: number;
  pxPerUnitV: number;
}

export function screenDeltaToWorld(
  dxPx: number,
  dyPx: number,
  context: DragContext,
): Vec3 {
  const { right, up, forward } = context.basis;
  if (context.mode === "depth") {
    // dragging down pushes the blob away from the camera
    const along = dyPx / context.pxPerUnitV;
    return [forward[0] * along, forward[1] * along, forward[2] * along];
  }
  const du = dxPx / context.pxPerUnitU;
  const dv = -dyPx / context.pxPerUnitV; // screen y grows downward
  return [
    right[0] * du + up[0] * dv,
    right[1] * du + up[1] * dv,
    right[2] * du + up[2] * dv,
  ];
}

export class DragGesture {
  private startX: number;
  private startY: number;
  private lastX: number;
  private lastY: number;
  private done = false;

  constructor(
    private context: DragContext,
    x: number,
    y: number,
  ) {
    this.startX = this.lastX = x;
    this.startY = this.lastY = y;
  }

  move(x: number, y: number): void {
    if (this.done) return;
    this.lastX = x;
    this.lastY = y;
  }

  /** Preview translation for cursor feedback while the pointer is down. */
  currentDelta(): Vec3 {
    return screenDeltaToWorld(
      this.lastX - this.startX,
      this.lastY - this.startY,
      this.context,
    );
  }

  /**
   * Finish the gesture. Returns the single Move op for the whole gesture,
   * or null when the pointer never left the start pixel.
   */
  end(): EditOp | null {
    if (this.done) return null;
    this.done = true;
    const dx = this.lastX - this.startX;
    const dy = this.lastY - this.startY;
    if (dx === 0 && dy === 0) return null;
    const delta = screenDeltaToWorld(dx, dy, this.context);
    return { kind: "Move", target: this.context.blobIndex, payload: [...delta] };
  }
}
