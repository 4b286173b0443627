import { describe, expect, it } from "vitest";

import { DragGesture, screenDeltaToWorld, type DragContext } from "../src/drag.js";
import { orbitBasis, DEFAULT_CAMERA } from "../src/orbit.js";

function frontViewContext(mode: "plane" | "depth" = "plane"): DragContext {
  return {
    blobIndex: 2,
    mode,
    basis: orbitBasis(DEFAULT_CAMERA),
    pxPerUnitU: 160, // focal 2.5 * (128/2) / depth 1.0
    pxPerUnitV: 160,
  };
}

describe("screenDeltaToWorld", () => {
  it("maps a rightward drag to +x under the front view", () => {
    const delta = screenDeltaToWorld(16, 0, frontViewContext());
    expect(delta[0]).toBeCloseTo(16 / 160, 12);
    expect(delta[1]).toBeCloseTo(0, 12);
    expect(delta[2]).toBeCloseTo(0, 12);
  });

  it("maps a downward drag to -y (screen y grows downward)", () => {
    const delta = screenDeltaToWorld(0, 16, frontViewContext());
    expect(delta[1]).toBeCloseTo(-0.1, 12);
  });

  it("is the linearized inverse of the projection at the centroid", () => {
    // moving by delta shifts the projection by px_per_unit * delta, so the
    // round trip pixel -> world -> pixel is the identity
    const context = frontViewContext();
    const delta = screenDeltaToWorld(24, -10, context);
    const backU = delta[0] * context.pxPerUnitU;
    const backV = -delta[1] * context.pxPerUnitV;
    expect(backU).toBeCloseTo(24, 10);
    expect(backV).toBeCloseTo(-10, 10);
  });

  it("depth mode moves along the camera forward axis only", () => {
    const context = frontViewContext("depth");
    const delta = screenDeltaToWorld(42, 32, context); // horizontal ignored
    const { forward } = context.basis;
    const along = 32 / 160;
    expect(delta[0]).toBeCloseTo(forward[0] * along, 12);
    expect(delta[1]).toBeCloseTo(forward[1] * along, 12);
    expect(delta[2]).toBeCloseTo(forward[2] * along, 12);
  });

  it("rotates plane drags with the camera yaw", () => {
    const yawed = {
      ...frontViewContext(),
      basis: orbitBasis({ ...DEFAULT_CAMERA, yaw: Math.PI / 2 }),
    };
    const delta = screenDeltaToWorld(16, 0, yawed);
    // camera on the +x side looking back: screen right is world -z
    expect(delta[2]).toBeCloseTo(-0.1, 10);
    expect(Math.abs(delta[0])).toBeLessThan(1e-10);
  });
});

describe("DragGesture", () => {
  it("emits exactly one Move op per gesture", () => {
    const gesture = new DragGesture(frontViewContext(), 50, 50);
    gesture.move(55, 52);
    gesture.move(61, 47);
    gesture.move(64, 44);
    const op = gesture.end();
    expect(op).not.toBeNull();
    expect(op!.kind).toBe("Move");
    expect(op!.target).toBe(2);
    // total displacement, not per-move increments
    expect(op!.payload[0]).toBeCloseTo(14 / 160, 12);
    // a second end() emits nothing
    expect(gesture.end()).toBeNull();
  });

  it("zero-pixel gestures emit nothing", () => {
    const gesture = new DragGesture(frontViewContext(), 50, 50);
    expect(gesture.end()).toBeNull();
  });

  it("returning to the start pixel emits nothing", () => {
    const gesture = new DragGesture(frontViewContext(), 50, 50);
    gesture.move(60, 60);
    gesture.move(50, 50);
    expect(gesture.end()).toBeNull();
  });

  it("ignores moves after the gesture ended", () => {
    const gesture = new DragGesture(frontViewContext(), 10, 10);
    gesture.move(20, 10);
    gesture.end();
    gesture.move(99, 99);
    expect(gesture.end()).toBeNull();
  });
});
