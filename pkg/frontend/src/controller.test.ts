import { describe, expect, it, vi } from "vitest";

import { ReviewApi } from "./api.js";
import { ReviewController, type LoadState } from "./controller.js";
import { ClipPlayer } from "./player.js";
import type { ServerItem, Verdict } from "./types.js";

/** In-memory stand-in for the review service: five misclassified items,
 * a verdict log, and an optional outage window for the verdict endpoint. */
class FixtureServer {
  verdicts = new Map<string, Verdict>();
  failNextVerdicts = 0;
  items: ServerItem[] = Array.from({ length: 5 }, (_, i) => ({
    clip_id: `rec${i}_0_0`,
    true_label: i % 2,
    predicted: 1 - (i % 2),
    score: 0.95 - i * 0.1,
    audio_url: `/api/clip/rec${i}_0_0/audio`,
  }));

  fetch = vi.fn(async (url: string, init?: RequestInit): Promise<Response> => {
    if (url.endsWith("/api/misclassified")) {
      const rows = this.items.map((row) => ({
        ...row,
        ...(this.verdicts.has(row.clip_id)
          ? { verdict: this.verdicts.get(row.clip_id) }
          : {}),
      }));
      return new Response(JSON.stringify(rows), { status: 200 });
    }
    if (url.endsWith("/api/verdict")) {
      if (this.failNextVerdicts > 0) {
        this.failNextVerdicts -= 1;
        return new Response(null, { status: 503 });
      }
      const body = JSON.parse(String(init?.body));
      this.verdicts.set(body.clip_id, body.verdict);
      return new Response(null, { status: 204 });
    }
    if (url.endsWith("/api/progress")) {
      return new Response(
        JSON.stringify({ reviewed: this.verdicts.size, total: this.items.length }),
        { status: 200 },
      );
    }
    return new Response(null, { status: 404 });
  });
}

function build(server: FixtureServer) {
  const api = new ReviewApi("", server.fetch as unknown as typeof fetch);
  const played: string[] = [];
  const player = new ClipPlayer((url) => ({
    currentTime: 0,
    async play() {
      played.push(url);
    },
    pause() {},
  }));
  const states: LoadState[] = [];
  const audioErrors: string[] = [];
  const controller = new ReviewController(api, player, {
    onQueueChanged: () => {},
    onLoadState: (s) => states.push(s),
    onAudioError: (clipId) => audioErrors.push(clipId),
  });
  return { controller, played, states, audioErrors, api };
}

describe("review session against the fixture server", () => {
  it("plays all five clips and lands five verdicts on the server", async () => {
    const server = new FixtureServer();
    const { controller, played } = build(server);
    await controller.load();
    expect(controller.queue.items).toHaveLength(5);

    const verdicts: Verdict[] = [
      "confirm", "relabel_negative", "confirm", "relabel_positive", "confirm",
    ];
    for (const [i, item] of controller.queue.items.entries()) {
      await controller.play(item);
      await controller.submit(item, verdicts[i]);
    }
    expect(played).toHaveLength(5);
    expect(server.verdicts.size).toBe(5);
    expect(server.verdicts.get("rec1_0_0")).toBe("relabel_negative");
    expect(controller.queue.done).toBe(true);
    expect(controller.queue.progress).toEqual({ reviewed: 5, total: 5 });

    // progress agrees with the server after sync
    const progress = await new ReviewApi("", server.fetch as unknown as typeof fetch)
      .fetchProgress();
    expect(progress).toEqual(controller.queue.progress);
  });

  it("keeps a failed verdict in the retry queue until the server recovers", async () => {
    const server = new FixtureServer();
    const { controller } = build(server);
    await controller.load();

    server.failNextVerdicts = 2;
    const first = controller.queue.items[0];
    await controller.submit(first, "relabel_negative", "wind noise");
    expect(server.verdicts.size).toBe(0);
    expect(controller.queue.retryQueue).toHaveLength(1);
    expect(first.verdictState).toBe("pending-sync");

    expect(await controller.flushRetries()).toBe(0); // one outage left
    expect(await controller.flushRetries()).toBe(1); // recovered
    expect(first.verdictState).toBe("relabeled");
    expect(server.verdicts.get(first.clipId)).toBe("relabel_negative");
    expect(controller.queue.retryQueue).toHaveLength(0);
  });

  it("rebuilds verdict state from the server after a reload", async () => {
    const server = new FixtureServer();
    const first = build(server);
    await first.controller.load();
    await first.controller.submit(first.controller.queue.items[0], "confirm");
    await first.controller.submit(first.controller.queue.items[1], "relabel_positive");

    const second = build(server); // fresh page: no local state carried over
    await second.controller.load();
    const states = second.controller.queue.items.map((i) => i.verdictState);
    expect(states).toEqual(["confirmed", "relabeled", "pending", "pending", "pending"]);
    expect(second.controller.queue.progress).toEqual({ reviewed: 2, total: 5 });
    expect(second.controller.queue.current?.clipId).toBe("rec2_0_0");
  });

  it("shows an error state instead of an empty queue when loading fails", async () => {
    const server = new FixtureServer();
    server.fetch.mockResolvedValueOnce(new Response(null, { status: 500 }));
    const { controller, states } = build(server);
    await controller.load();
    expect(states).toEqual(["loading", "error"]);
    expect(controller.queue.items).toHaveLength(0);

    await controller.load(); // retry path
    expect(states.at(-1)).toBe("ready");
    expect(controller.queue.items).toHaveLength(5);
  });

  it("flags items whose audio cannot play", async () => {
    const server = new FixtureServer();
    const api = new ReviewApi("", server.fetch as unknown as typeof fetch);
    const player = new ClipPlayer(() => ({
      currentTime: 0,
      async play() {
        throw new Error("404");
      },
      pause() {},
    }));
    const audioErrors: string[] = [];
    const controller = new ReviewController(api, player, {
      onQueueChanged: () => {},
      onLoadState: () => {},
      onAudioError: (clipId) => audioErrors.push(clipId),
    });
    await controller.load();
    await controller.play(controller.queue.items[0]);
    expect(audioErrors).toEqual(["rec0_0_0"]);
  });

  it("reports the empty state explicitly", async () => {
    const server = new FixtureServer();
    server.items = [];
    const { controller, states } = build(server);
    await controller.load();
    expect(states.at(-1)).toBe("empty");
  });
});
