export type Verdict = "confirm" | "relabel_positive" | "relabel_negative";

/** pending-sync = locally recorded, not yet acknowledged by the server */
export type VerdictState = "pending" | "pending-sync" | "confirmed" | "relabeled";

export interface ServerItem {
  clip_id: string;
  true_label: number;
  predicted: number;
  score: number;
  audio_url: string;
  verdict?: Verdict;
}

export interface ReviewItem {
  clipId: string;
  trueLabel: number;
  predicted: number;
  score: number;
  audioUrl: string;
  verdictState: VerdictState;
  verdict?: Verdict;
  note?: string;
}

export interface Progress {
  reviewed: number;
  total: number;
}

export interface PendingVerdict {
  clipId: string;
  verdict: Verdict;
  note: string;
}
