import { ReviewApi } from "./api.js";
import { ReviewController } from "./controller.js";
import { ClipPlayer } from "./player.js";
import type { ReviewItem, Verdict } from "./types.js";

const api = new ReviewApi("");
const player = new ClipPlayer((url) => new Audio(url));
const audioErrors = new Map<string, string>();

const banner = document.getElementById("banner") as HTMLElement;
const listEl = document.getElementById("queue") as HTMLElement;
const progressEl = document.getElementById("progress") as HTMLElement;
const retryEl = document.getElementById("retry-queue") as HTMLElement;
const noteEl = document.getElementById("note") as HTMLInputElement;

const controller = new ReviewController(api, player, {
  onQueueChanged: render,
  onLoadState(state, detail) {
    banner.className = state;
    if (state === "loading") banner.textContent = "Loading queue…";
    else if (state === "empty") banner.textContent = "No misclassifications to review.";
    else if (state === "error") {
      banner.innerHTML = `Could not load the queue (${detail ?? "network error"}). `;
      const retry = document.createElement("button");
      retry.textContent = "Retry";
      retry.onclick = () => void controller.load();
      banner.appendChild(retry);
    } else banner.textContent = "";
  },
  onAudioError(clipId, message) {
    audioErrors.set(clipId, message);
    render();
  },
});

function labelText(value: number): string {
  return value === 1 ? "positive" : "negative";
}

function stateBadge(item: ReviewItem): string {
  switch (item.verdictState) {
    case "confirmed": return `<span class="badge ok">confirmed</span>`;
    case "relabeled": return `<span class="badge ok">relabeled → ${labelText(item.verdict === "relabel_positive" ? 1 : 0)}</span>`;
    case "pending-sync": return `<span class="badge warn">saving…</span>`;
    default: return `<span class="badge">pending</span>`;
  }
}

function render(): void {
  const { queue } = controller;
  const progress = queue.progress;
  progressEl.textContent = `${progress.reviewed} / ${progress.total} reviewed`;

  const retries = queue.retryQueue;
  retryEl.hidden = retries.length === 0;
  retryEl.textContent = retries.length
    ? `${retries.length} verdict(s) waiting to sync — will retry automatically`
    : "";

  listEl.innerHTML = "";
  for (const item of queue.items) {
    const row = document.createElement("div");
    row.className = "item";
    if (item === queue.current) row.classList.add("current");
    if (controller.playingClipId === item.clipId) row.classList.add("playing");
    const audioError = audioErrors.get(item.clipId);
    row.innerHTML = `
      <div class="meta">
        <code>${item.clipId}</code>
        <span>truth: <b>${labelText(item.trueLabel)}</b></span>
        <span>predicted: <b>${labelText(item.predicted)}</b></span>
        <span>score: ${item.score.toFixed(3)}</span>
        ${stateBadge(item)}
        ${audioError ? `<span class="badge err" title="${audioError}">audio unavailable</span>` : ""}
      </div>`;
    const controls = document.createElement("div");
    controls.className = "controls";
    controls.appendChild(button("▶ play", () => void controller.play(item)));
    if (item.verdictState === "pending") {
      controls.appendChild(button("confirm label", () => void submit(item, "confirm")));
      controls.appendChild(button("relabel positive", () => void submit(item, "relabel_positive")));
      controls.appendChild(button("relabel negative", () => void submit(item, "relabel_negative")));
    }
    row.appendChild(controls);
    row.onclick = () => { queue.select(item.clipId); render(); };
    listEl.appendChild(row);
  }
}

function button(text: string, onClick: () => void): HTMLButtonElement {
  const b = document.createElement("button");
  b.textContent = text;
  b.onclick = (ev) => { ev.stopPropagation(); onClick(); };
  return b;
}

async function submit(item: ReviewItem, verdict: Verdict): Promise<void> {
  await controller.submit(item, verdict, noteEl.value);
  noteEl.value = "";
}

document.addEventListener("keydown", (ev) => {
  if (ev.target === noteEl) return;
  const item = controller.queue.current;
  if (!item) return;
  const actions: Record<string, () => void> = {
    " ": () => void controller.play(item),
    c: () => void submit(item, "confirm"),
    p: () => void submit(item, "relabel_positive"),
    n: () => void submit(item, "relabel_negative"),
  };
  const action = actions[ev.key];
  if (action) {
    ev.preventDefault();
    action();
  }
});

void controller.load();
setInterval(() => void controller.flushRetries(), 5000);
