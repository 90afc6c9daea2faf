// Audio playback for demonstration mode: six player actions over the
// trace's step sequence.  The audio element sits behind a small sink
// interface so tests can script "ended" events without real audio.

export type PlaybackState = "idle" | "playing-all" | "playing-line" | "paused";

export interface AudioSink {
  /** Start playing `src` from the beginning; call `onEnded` exactly once
   * when it finishes (unless stopped or replaced first). */
  play(src: string, onEnded: () => void): void;
  pause(): void;
  resume(): void;
  stop(): void;
}

export class HtmlAudioSink implements AudioSink {
  private element: HTMLAudioElement | null = null;

  play(src: string, onEnded: () => void): void {
    this.stop();
    const element = new Audio(src);
    element.addEventListener("ended", () => {
      if (this.element === element) {
        this.element = null;
        onEnded();
      }
    });
    this.element = element;
    void element.play();
  }

  pause(): void {
    this.element?.pause();
  }

  resume(): void {
    void this.element?.play();
  }

  stop(): void {
    if (this.element) {
      this.element.pause();
      this.element = null;
    }
  }
}

export interface PlaybackStep {
  line: number;
  audio: string | null;
}

export interface PlaybackHooks {
  onStepChange?: (index: number) => void;
  onStateChange?: (state: PlaybackState) => void;
}

export class PlaybackController {
  private index = 0;
  private current: PlaybackState = "idle";
  private pausedFrom: "playing-all" | "playing-line" | null = null;

  constructor(
    private readonly steps: PlaybackStep[],
    private readonly sink: AudioSink,
    private readonly hooks: PlaybackHooks = {},
  ) {}

  get stepIndex(): number {
    return this.index;
  }

  get state(): PlaybackState {
    return this.current;
  }

  get currentLine(): number | null {
    return this.steps.length ? this.steps[this.index].line : null;
  }

  private setState(state: PlaybackState): void {
    if (this.current !== state) {
      this.current = state;
      this.hooks.onStateChange?.(state);
    }
  }

  private setIndex(index: number): void {
    if (this.index !== index) {
      this.index = index;
      this.hooks.onStepChange?.(index);
    }
  }

  /** Move Back: step −1 (clamped); any audio stops. */
  moveBack(): void {
    this.interrupt();
    this.setIndex(Math.max(0, this.index - 1));
  }

  /** Move Forward: step +1 (clamped); any audio stops. */
  moveForward(): void {
    this.interrupt();
    this.setIndex(Math.min(this.steps.length - 1, this.index + 1));
  }

  /** Play All: narrate from the current step, auto-advancing on each
   * audio end until the last step finishes. */
  playAll(): void {
    if (this.current === "paused" && this.pausedFrom === "playing-all") {
      this.pausedFrom = null;
      this.setState("playing-all");
      this.sink.resume();
      return;
    }
    this.pausedFrom = null;
    this.setState("playing-all");
    this.playFrom(this.index);
  }

  /** Play Current Line: narrate one step, no advance. */
  playCurrent(): void {
    if (this.current === "paused" && this.pausedFrom === "playing-line") {
      this.pausedFrom = null;
      this.setState("playing-line");
      this.sink.resume();
      return;
    }
    this.pausedFrom = null;
    if (!this.steps.length) return;
    const step = this.steps[this.index];
    if (step.audio === null) return;
    this.setState("playing-line");
    this.sink.play(step.audio, () => {
      if (this.current === "playing-line") this.setState("idle");
    });
  }

  /** Pause Audio: toggles pause/resume of whatever is playing. */
  pauseAudio(): void {
    if (this.current === "playing-all" || this.current === "playing-line") {
      this.pausedFrom = this.current;
      this.sink.pause();
      this.setState("paused");
    } else if (this.current === "paused" && this.pausedFrom !== null) {
      const resumed = this.pausedFrom;
      this.pausedFrom = null;
      this.setState(resumed);
      this.sink.resume();
    }
  }

  /** Stop All: back to idle; the current step stays where it is. */
  stopAll(): void {
    this.interrupt();
  }

  private interrupt(): void {
    this.sink.stop();
    this.pausedFrom = null;
    this.setState("idle");
  }

  private playFrom(index: number): void {
    // steps without narration pass through immediately; the walk is
    // bounded by the trace length, so this recursion terminates
    while (true) {
      if (this.current !== "playing-all") return;
      this.setIndex(index);
      const step = this.steps[index];
      if (step === undefined) {
        this.setState("idle");
        return;
      }
      if (step.audio !== null) break;
      if (index + 1 >= this.steps.length) {
        this.setState("idle");
        return;
      }
      index += 1;
    }
    this.sink.play(this.steps[index].audio as string, () => {
      if (this.current !== "playing-all") return;
      if (index + 1 >= this.steps.length) {
        this.setState("idle");
      } else {
        this.playFrom(index + 1);
      }
    });
  }
}
