/** Typed client for the blobfield HTTP service. */

import type { CameraParams, EditOp, ProjectionEntry, SceneDoc } from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public payload: { error?: string; message?: string; path?: string },
  ) {
    super(payload.message ?? `request failed with ${status}`);
  }
}

async function rejectWith(response: Response): Promise<never> {
  let payload = {};
  try {
    payload = await response.json();
  } catch {
    // non-JSON error body; status alone will have to do
  }
  throw new ApiError(response.status, payload);
}

export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchFn: typeof fetch = fetch,
  ) {}

  async getScene(): Promise<{ scene: SceneDoc; etag: string | null }> {
    const response = await this.fetchFn(`${this.baseUrl}/scene`);
    if (!response.ok) await rejectWith(response);
    return {
      scene: (await response.json()) as SceneDoc,
      etag: response.headers.get("ETag"),
    };
  }

  async putScene(scene: SceneDoc): Promise<void> {
    const response = await this.fetchFn(`${this.baseUrl}/scene`, {
      method: "PUT",
      body: JSON.stringify(scene),
    });
    if (!response.ok) await rejectWith(response);
  }

  async postEdit(op: EditOp): Promise<SceneDoc> {
    const response = await this.fetchFn(`${this.baseUrl}/edit`, {
      method: "POST",
      body: JSON.stringify(op),
    });
    if (!response.ok) await rejectWith(response);
    return (await response.json()) as SceneDoc;
  }

  async undo(): Promise<SceneDoc> {
    const response = await this.fetchFn(`${this.baseUrl}/undo`, { method: "POST" });
    if (!response.ok) await rejectWith(response);
    return (await response.json()) as SceneDoc;
  }

  /** Layout render as a PNG blob. */
  async renderLayout(camera: CameraParams, resolution: number): Promise<Blob> {
    const response = await this.fetchFn(`${this.baseUrl}/render`, {
      method: "POST",
      body: JSON.stringify({ camera, resolution, mode: "layout" }),
    });
    if (!response.ok) await rejectWith(response);
    return response.blob();
  }

  async projections(camera: CameraParams): Promise<ProjectionEntry[]> {
    const query = new URLSearchParams({ camera: JSON.stringify(camera) });
    const response = await this.fetchFn(`${this.baseUrl}/blobs/projections?${query}`);
    if (!response.ok) await rejectWith(response);
    return (await response.json()) as ProjectionEntry[];
  }
}
