// Demonstration mode: narrated walkthrough with a self-test worksheet.
// The student fills cells and checks them line by line (green/red), or
// reveals a row; audio playback steps through the trace with the
// current line highlighted.

import { ApiClient, ApiError, DemoPayload, Verdict } from "./api.js";
import { button, clear, codePane, el, errorBanner } from "./dom.js";
import {
  AudioSink,
  HtmlAudioSink,
  PlaybackController,
  PlaybackStep,
} from "./playback.js";

function cellKey(line: number, vector: number[], variable: string): string {
  return `${line}@${vector.join(".")}#${variable}`;
}

function vectorLabel(vector: number[]): string {
  return vector.length ? vector.join(".") : "—";
}

export class DemoView {
  readonly playback: PlaybackController;

  // student-entered text per cell, across all passes of each line
  private readonly buffers = new Map<string, string>();
  private readonly verdicts = new Map<string, Verdict>();
  // which pass of each line the grid currently shows (index into the
  // layout's vector list)
  private readonly selection = new Map<number, number>();

  private readonly codeRows: Map<number, HTMLElement>;
  private readonly inputs = new Map<number, Map<string, HTMLInputElement>>();
  private readonly selects = new Map<number, HTMLSelectElement>();
  private readonly banner = errorBanner();
  private stateLabel: HTMLElement;
  private video: HTMLVideoElement | null = null;
  private tail: Promise<void> = Promise.resolve();

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    private readonly payload: DemoPayload,
    sink: AudioSink = new HtmlAudioSink(),
  ) {
    clear(root);
    root.appendChild(el("h2", "exercise-title", payload.title));
    root.appendChild(this.banner.banner);
    this.buildVideoPanel();
    this.buildAssumptions();

    const code = codePane(payload.source);
    this.codeRows = code.rows;
    root.appendChild(code.pane);

    const steps: PlaybackStep[] = payload.trace.steps.map((step) => {
      const ref = payload.media.audio[String(step.line)] ?? null;
      return { line: step.line, audio: ref === null ? null : api.mediaUrl(ref) };
    });
    this.playback = new PlaybackController(steps, sink, {
      onStepChange: () => this.syncToStep(),
      onStateChange: (state) => {
        this.stateLabel.textContent = state;
      },
    });

    this.stateLabel = el("span", "playback-state", "idle");
    this.buildPlayerControls();
    this.buildWorksheet();
    this.syncToStep();
  }

  /** Resolves once every queued server round-trip has finished. */
  settle(): Promise<void> {
    return this.tail;
  }

  private enqueue(action: () => Promise<void>): void {
    this.tail = this.tail.then(action).catch((err) => {
      this.banner.show(err instanceof ApiError
        ? `${err.code}: ${err.message}`
        : String(err));
    });
  }

  // -- static panels ------------------------------------------------------

  private buildVideoPanel(): void {
    if (this.payload.media.video === null) return;
    const wrap = el("div", "video-panel");
    const video = el("video", "intro-video");
    video.src = this.api.mediaUrl(this.payload.media.video);
    video.controls = true;
    video.hidden = true;
    this.video = video;
    wrap.appendChild(button("Toggle Video", "video-toggle", () => {
      video.hidden = !video.hidden;
      if (video.hidden) video.pause();
    }));
    wrap.appendChild(video);
    this.root.appendChild(wrap);
  }

  private buildAssumptions(): void {
    const panel = el("div", "assumptions-panel");
    panel.appendChild(el("h3", undefined, "Assumptions"));
    panel.appendChild(el("pre", "assumptions-text", this.payload.assumptions));
    this.root.appendChild(panel);
  }

  private buildPlayerControls(): void {
    const bar = el("div", "player-controls");
    const actions: [string, string, () => void][] = [
      ["Move Back", "move-back", () => this.playback.moveBack()],
      ["Play All", "play-all", () => this.playback.playAll()],
      ["Play Current Line", "play-current", () => this.playback.playCurrent()],
      ["Pause Audio", "pause", () => this.playback.pauseAudio()],
      ["Move Forward", "move-forward", () => this.playback.moveForward()],
      ["Stop All", "stop-all", () => this.playback.stopAll()],
    ];
    for (const [label, action, handler] of actions) {
      const node = button(label, "player-button", handler);
      node.dataset.action = action;
      bar.appendChild(node);
    }
    bar.appendChild(this.stateLabel);
    this.root.appendChild(bar);
  }

  // -- worksheet ----------------------------------------------------------

  private vectorsFor(line: number): number[][] {
    return this.payload.layout.line_iterations[String(line)] ?? [];
  }

  private selectedVector(line: number): number[] {
    const vectors = this.vectorsFor(line);
    if (!vectors.length) return [];
    return vectors[this.selection.get(line) ?? 0];
  }

  private buildWorksheet(): void {
    const table = el("table", "worksheet");
    const head = el("tr");
    head.appendChild(el("th", undefined, "line"));
    head.appendChild(el("th", undefined, "iteration"));
    for (const column of this.payload.columns) {
      head.appendChild(el("th", "variable-header", column));
    }
    head.appendChild(el("th"));
    table.appendChild(head);

    for (const line of this.payload.executable_lines) {
      table.appendChild(this.buildRow(line));
    }
    this.root.appendChild(table);
  }

  private buildRow(line: number): HTMLElement {
    const row = el("tr", "worksheet-row");
    row.dataset.line = String(line);
    row.appendChild(el("td", "row-line", String(line)));

    const iterationCell = el("td", "row-iteration");
    const vectors = this.vectorsFor(line);
    if (vectors.length && vectors[0].length) {
      const select = el("select", "iteration-select");
      select.dataset.line = String(line);
      vectors.forEach((vector, index) => {
        const option = el("option", undefined, vectorLabel(vector));
        option.value = String(index);
        select.appendChild(option);
      });
      select.addEventListener("change", () => {
        this.selection.set(line, select.selectedIndex);
        this.refreshRow(line);
      });
      this.selects.set(line, select);
      iterationCell.appendChild(select);
    } else {
      iterationCell.textContent = vectorLabel([]);
    }
    row.appendChild(iterationCell);

    const rowInputs = new Map<string, HTMLInputElement>();
    for (const column of this.payload.columns) {
      const cell = el("td");
      const input = el("input", "cell-input");
      input.type = "text";
      input.dataset.line = String(line);
      input.dataset.variable = column;
      input.addEventListener("input", () => {
        const vector = this.selectedVector(line);
        const key = cellKey(line, vector, column);
        this.buffers.set(key, input.value);
        // editing always clears the verdict color
        this.verdicts.delete(key);
        this.applyVerdictClass(input, undefined);
      });
      rowInputs.set(column, input);
      cell.appendChild(input);
      row.appendChild(cell);
    }
    this.inputs.set(line, rowInputs);

    const actions = el("td", "row-actions");
    const check = button("check", "check-button", () => this.checkRow(line));
    check.dataset.line = String(line);
    const show = button("show", "show-button", () => this.showRow(line));
    show.dataset.line = String(line);
    actions.appendChild(check);
    actions.appendChild(show);
    row.appendChild(actions);
    return row;
  }

  private applyVerdictClass(input: HTMLInputElement, verdict: Verdict | undefined): void {
    input.classList.remove("verdict-correct", "verdict-incorrect");
    if (verdict === "correct") input.classList.add("verdict-correct");
    if (verdict === "incorrect") input.classList.add("verdict-incorrect");
  }

  private refreshRow(line: number): void {
    const vector = this.selectedVector(line);
    const rowInputs = this.inputs.get(line);
    if (!rowInputs) return;
    for (const [column, input] of rowInputs) {
      const key = cellKey(line, vector, column);
      input.value = this.buffers.get(key) ?? "";
      this.applyVerdictClass(input, this.verdicts.get(key));
    }
  }

  checkRow(line: number): void {
    this.enqueue(async () => {
      this.banner.hide();
      const vector = this.selectedVector(line);
      const rowInputs = this.inputs.get(line);
      if (!rowInputs) return;
      for (const [column, input] of rowInputs) {
        const verdict = await this.api.check(
          this.payload.id, line, vector, column, input.value);
        const key = cellKey(line, vector, column);
        this.verdicts.set(key, verdict);
        this.applyVerdictClass(input, verdict);
      }
    });
  }

  showRow(line: number): void {
    this.enqueue(async () => {
      this.banner.hide();
      const vector = this.selectedVector(line);
      const values = await this.api.reveal(this.payload.id, line, vector);
      const rowInputs = this.inputs.get(line);
      if (!rowInputs) return;
      for (const [column, input] of rowInputs) {
        const value = values[column] ?? null;
        input.value = value === null ? "" : value;
        const key = cellKey(line, vector, column);
        this.buffers.set(key, input.value);
        this.verdicts.delete(key);
        this.applyVerdictClass(input, undefined);
      }
    });
  }

  // -- playback sync ------------------------------------------------------

  private syncToStep(): void {
    const index = this.playback.stepIndex;
    const step = this.payload.trace.steps[index];
    if (step === undefined) return;
    for (const [line, row] of this.codeRows) {
      row.classList.toggle("current-line", line === step.line);
    }
    // the grid follows the narration: the playing line's dropdown jumps
    // to the pass being executed
    const select = this.selects.get(step.line);
    if (select) {
      const vectors = this.vectorsFor(step.line);
      const position = vectors.findIndex(
        (v) => v.length === step.iteration.length
          && v.every((value, i) => value === step.iteration[i]));
      if (position >= 0 && select.selectedIndex !== position) {
        select.selectedIndex = position;
        this.selection.set(step.line, position);
        this.refreshRow(step.line);
      }
    }
  }
}
