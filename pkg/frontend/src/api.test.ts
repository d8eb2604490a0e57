import { describe, expect, it, vi } from "vitest";

import { ReviewApi } from "./api.js";

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

describe("ReviewApi", () => {
  it("parses the misclassified list", async () => {
    const rows = [{
      clip_id: "a_0_0", true_label: 1, predicted: 0, score: 0.12,
      audio_url: "/api/clip/a_0_0/audio",
    }];
    const fetchFn = vi.fn(async () => jsonResponse(rows));
    const api = new ReviewApi("", fetchFn as unknown as typeof fetch);
    await expect(api.fetchMisclassified()).resolves.toEqual(rows);
    expect(fetchFn).toHaveBeenCalledWith("/api/misclassified");
  });

  it("throws on a 500 so the UI can show a retry state", async () => {
    const fetchFn = vi.fn(async () => new Response("boom", { status: 500 }));
    const api = new ReviewApi("", fetchFn as unknown as typeof fetch);
    await expect(api.fetchMisclassified()).rejects.toThrow(/500/);
  });

  it("treats 204 as verdict accepted", async () => {
    const fetchFn = vi.fn(async () => new Response(null, { status: 204 }));
    const api = new ReviewApi("", fetchFn as unknown as typeof fetch);
    await expect(api.postVerdict("a_0_0", "confirm", "")).resolves.toBeUndefined();
    const [url, init] = fetchFn.mock.calls[0] as [string, RequestInit];
    expect(url).toBe("/api/verdict");
    expect(JSON.parse(String(init.body))).toEqual({
      clip_id: "a_0_0", verdict: "confirm", note: "",
    });
  });

  it("rejects verdicts the server refused", async () => {
    const fetchFn = vi.fn(async () => new Response(null, { status: 404 }));
    const api = new ReviewApi("", fetchFn as unknown as typeof fetch);
    await expect(api.postVerdict("ghost", "confirm", "")).rejects.toThrow(/404/);
  });

  it("fetches progress", async () => {
    const fetchFn = vi.fn(async () => jsonResponse({ reviewed: 2, total: 5 }));
    const api = new ReviewApi("", fetchFn as unknown as typeof fetch);
    await expect(api.fetchProgress()).resolves.toEqual({ reviewed: 2, total: 5 });
  });

  it("prefixes audio urls with the base url", () => {
    const api = new ReviewApi("http://127.0.0.1:8765");
    expect(api.audioUrl({ audioUrl: "/api/clip/x/audio" }))
      .toBe("http://127.0.0.1:8765/api/clip/x/audio");
  });
});
