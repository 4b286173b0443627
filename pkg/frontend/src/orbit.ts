/**
 * Orbit camera parameters and their world-frame basis.
 *
 * The basis trig here mirrors the service's look-at convention so screen
 * drags can be mapped into world translations; no density, rendering, or
 * compositing math lives client-side — every pixel comes from the service.
 */

import type { CameraParams, Vec3 } from "./types.js";

export const ORBIT_BOUNDS = {
  pitchMax: 1.2,
  radiusMin: 1.5,
  radiusMax: 6.0,
} as const;

export const DEFAULT_CAMERA: CameraParams = {
  yaw: 0,
  pitch: 0,
  radius: 3,
  focal: 2.5,
  width: 128,
  height: 128,
};

export function clampOrbit(camera: CameraParams): CameraParams {
  return {
    ...camera,
    pitch: Math.min(ORBIT_BOUNDS.pitchMax, Math.max(-ORBIT_BOUNDS.pitchMax, camera.pitch)),
    radius: Math.min(ORBIT_BOUNDS.radiusMax, Math.max(ORBIT_BOUNDS.radiusMin, camera.radius)),
  };
}

function normalize(v: Vec3): Vec3 {
  const n = Math.hypot(v[0], v[1], v[2]);
  return [v[0] / n, v[1] / n, v[2] / n];
}

function cross(a: Vec3, b: Vec3): Vec3 {
  return [
    a[1] * b[2] - a[2] * b[1],
    a[2] * b[0] - a[0] * b[2],
    a[0] * b[1] - a[1] * b[0],
  ];
}

export interface OrbitBasis {
  right: Vec3;
  up: Vec3;
  forward: Vec3;
}

/** right/up/forward unit vectors of the orbit camera in world space. */
export function orbitBasis(camera: CameraParams): OrbitBasis {
  const cp = Math.cos(camera.pitch);
  const sp = Math.sin(camera.pitch);
  const cy = Math.cos(camera.yaw);
  const sy = Math.sin(camera.yaw);
  // camera sits at center + radius * (cp*sy, sp, cp*cy), looking at the center
  const forward = normalize([-cp * sy, -sp, -cp * cy]);
  const right = normalize(cross(forward, [0, 1, 0]));
  const up = normalize(cross(right, forward));
  return { right, up, forward };
}
