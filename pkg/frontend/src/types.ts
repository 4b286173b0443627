/** Wire types mirroring the service's JSON documents. */

export interface BlobDoc {
  center: [number, number, number];
  scale: number;
  aspect: [number, number, number];
  euler: [number, number, number];
  feature: number[];
  style: number[];
  active: boolean;
}

export interface SceneDoc {
  version: number;
  sharpness: number;
  feature_dim: number;
  style_dim: number;
  background_feature: number[];
  background_style: number[];
  blobs: BlobDoc[];
}

export interface CameraParams {
  yaw: number;
  pitch: number;
  radius: number;
  focal: number;
  width: number;
  height: number;
}

export type EditKind =
  | "Move"
  | "Remove"
  | "Restore"
  | "Resize"
  | "Reshape"
  | "Rotate"
  | "Restyle"
  | "Duplicate"
  | "Swap";

export interface EditOp {
  kind: EditKind;
  target: number;
  target2?: number;
  payload: number[];
}

/** One row of GET /blobs/projections. */
export interface ProjectionEntry {
  index: number;
  active: boolean;
  depth: number;
  u: number | null;
  v: number | null;
  /** Screen-space scale at the centroid: pixels per world unit. */
  px_per_unit_u: number | null;
  px_per_unit_v: number | null;
}

export type Vec3 = [number, number, number];
