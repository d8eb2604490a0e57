/** Single-clip audio playback: starting one clip stops the previous one,
 * and each clip's element is created once so replays hit the cache. */

export interface AudioLike {
  play(): Promise<void>;
  pause(): void;
  currentTime: number;
}

export type AudioFactory = (url: string) => AudioLike;

export class ClipPlayer {
  private readonly elements = new Map<string, AudioLike>();
  private playing: string | null = null;

  constructor(private readonly createAudio: AudioFactory) {}

  get playingClipId(): string | null {
    return this.playing;
  }

  /** Resolves once playback starts; rejects (after clearing state) when the
   * clip cannot be fetched or decoded. */
  async play(clipId: string, url: string): Promise<void> {
    this.stop();
    let element = this.elements.get(clipId);
    if (!element) {
      element = this.createAudio(url);
      this.elements.set(clipId, element);
    }
    element.currentTime = 0;
    this.playing = clipId;
    try {
      await element.play();
    } catch (err) {
      this.playing = null;
      this.elements.delete(clipId); // broken element; refetch on retry
      throw err;
    }
  }

  stop(): void {
    if (this.playing) {
      this.elements.get(this.playing)?.pause();
      this.playing = null;
    }
  }

  loadedCount(): number {
    return this.elements.size;
  }
}
