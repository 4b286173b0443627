import { describe, expect, it, vi } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";

function mockFetch(status: number, body: unknown, headers: Record<string, string> = {}) {
  return vi.fn(async (_url: RequestInfo | URL, _init?: RequestInit) => {
    return new Response(typeof body === "string" ? body : JSON.stringify(body), {
      status,
      headers,
    });
  }) as unknown as typeof fetch;
}

describe("ApiClient", () => {
  it("fetches the scene with its ETag", async () => {
    const fetcher = mockFetch(200, { version: 1, blobs: [] }, { ETag: '"abc"' });
    const client = new ApiClient("http://svc", fetcher);
    const { scene, etag } = await client.getScene();
    expect((fetcher as any).mock.calls[0][0]).toBe("http://svc/scene");
    expect(scene.version).toBe(1);
    expect(etag).toBe('"abc"');
  });

  it("posts edits as JSON to /edit", async () => {
    const fetcher = mockFetch(200, { version: 1, blobs: [] });
    const client = new ApiClient("http://svc", fetcher);
    await client.postEdit({ kind: "Move", target: 1, payload: [0.1, 0, 0] });
    const [url, init] = (fetcher as any).mock.calls[0];
    expect(url).toBe("http://svc/edit");
    expect(init.method).toBe("POST");
    expect(JSON.parse(init.body)).toEqual({ kind: "Move", target: 1, payload: [0.1, 0, 0] });
  });

  it("encodes the camera as a query parameter for projections", async () => {
    const fetcher = mockFetch(200, []);
    const client = new ApiClient("http://svc", fetcher);
    await client.projections({ yaw: 0.5, pitch: 0, radius: 3, focal: 2.5, width: 64, height: 64 });
    const url = String((fetcher as any).mock.calls[0][0]);
    expect(url.startsWith("http://svc/blobs/projections?camera=")).toBe(true);
    const camera = JSON.parse(new URL(url).searchParams.get("camera")!);
    expect(camera.yaw).toBe(0.5);
  });

  it("surfaces service errors with status, code, and path", async () => {
    const fetcher = mockFetch(400, {
      error: "InvariantViolation",
      message: "aspect out of range",
      path: "blobs[0].aspect[1]",
    });
    const client = new ApiClient("http://svc", fetcher);
    const failure = client.postEdit({ kind: "Reshape", target: 0, payload: [2, 1, 1] });
    await expect(failure).rejects.toSatisfy((error: unknown) => {
      expect(error).toBeInstanceOf(ApiError);
      const apiError = error as ApiError;
      expect(apiError.status).toBe(400);
      expect(apiError.payload.error).toBe("InvariantViolation");
      expect(apiError.payload.path).toBe("blobs[0].aspect[1]");
      return true;
    });
  });

  it("requests layout renders with camera, resolution, and mode", async () => {
    const fetcher = mockFetch(200, "not-a-real-png");
    const client = new ApiClient("http://svc", fetcher);
    await client.renderLayout(
      { yaw: 0, pitch: 0, radius: 3, focal: 2.5, width: 128, height: 128 },
      128,
    );
    const [url, init] = (fetcher as any).mock.calls[0];
    expect(url).toBe("http://svc/render");
    const body = JSON.parse(init.body);
    expect(body.mode).toBe("layout");
    expect(body.resolution).toBe(128);
    expect(body.camera.width).toBe(128);
  });
});
