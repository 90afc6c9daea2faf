// Evaluation mode: the student drives the control flow themselves —
// enter line, undo, make loop — with no feedback until submission.
// Every mutation is a serialized request; the server's response is the
// authoritative state and the grid re-renders from it.

import {
  AnswerWire,
  ApiClient,
  ApiError,
  EvalPayload,
  SessionWire,
} from "./api.js";
import { button, clear, codePane, el, errorBanner } from "./dom.js";

interface PassFrame {
  startOrdinal: number;
  targetLine: number;
  clearedStaged: Map<number, Record<string, string>>;
}

export class EvalView {
  private session: SessionWire | null = null;

  // Which spans of the answer log belong to the pass currently on
  // screen.  The grid has one row per code line (like the worksheet on
  // paper): a make-loop starts a fresh pass, so boxes from the target
  // down clear while answers from finished passes stay archived on the
  // server for grading.
  private passStack: PassFrame[] = [];
  private passStartOrdinal = 0;
  private passTargetLine: number | null = null;

  // Staged-but-unlocked box text by line.  Entering a line consumes its
  // staged text; undoing that entry puts the values straight back, and
  // a make-loop clears staging from the target down (restored if the
  // loop itself is undone) — so undo is an identity on what's visible.
  private staged = new Map<number, Record<string, string>>();

  private readonly banner = errorBanner();
  private readonly gridHost = el("div", "eval-grid");
  private readonly statusHost = el("div", "eval-status");
  private readonly resultHost = el("div", "eval-result");
  private codeRows: Map<number, HTMLElement>;
  private tagInput: HTMLInputElement;
  private tail: Promise<void> = Promise.resolve();

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    private readonly payload: EvalPayload,
  ) {
    clear(root);
    root.appendChild(el("h2", "exercise-title", payload.title));
    root.appendChild(this.banner.banner);

    const assumptions = el("div", "assumptions-panel");
    assumptions.appendChild(el("h3", undefined, "Assumptions"));
    assumptions.appendChild(el("pre", "assumptions-text", payload.assumptions));
    root.appendChild(assumptions);

    const code = codePane(payload.source);
    this.codeRows = code.rows;
    root.appendChild(code.pane);

    root.appendChild(this.statusHost);
    root.appendChild(this.gridHost);

    const submitBar = el("div", "submit-bar");
    this.tagInput = el("input", "respondent-tag");
    this.tagInput.type = "text";
    this.tagInput.placeholder = "respondent tag (optional)";
    submitBar.appendChild(this.tagInput);
    submitBar.appendChild(button("Submit Evaluation", "submit-button",
      () => this.submit()));
    root.appendChild(submitBar);
    root.appendChild(this.resultHost);
  }

  /** Resolves once every queued server round-trip has finished. */
  settle(): Promise<void> {
    return this.tail;
  }

  get sessionState(): SessionWire | null {
    return this.session;
  }

  start(): void {
    this.enqueue(async () => {
      this.session = await this.api.createSession(this.payload.id);
      this.render();
    });
  }

  private enqueue(action: () => Promise<void>): void {
    this.tail = this.tail.then(action).catch((err) => {
      this.banner.show(err instanceof ApiError
        ? `${err.code}: ${err.message}`
        : String(err));
    });
  }

  // -- actions ------------------------------------------------------------

  enterLine(): void {
    this.enqueue(async () => {
      const session = this.requireSession();
      this.banner.hide();
      const line = session.cursor_line;
      const entries: Record<string, string> = {};
      for (const column of this.payload.columns) {
        const input = this.openInput(column);
        entries[column] = input ? input.value : "";
      }
      this.session = await this.api.enterLine(
        session.session_id, session.revision, entries);
      if (line !== null) this.staged.delete(line);
      this.render();
    });
  }

  undo(): void {
    this.enqueue(async () => {
      const session = this.requireSession();
      this.banner.hide();
      const response = await this.api.undo(session.session_id, session.revision);
      if (response.undone.kind === "make_loop") {
        const frame = this.passStack.pop();
        this.passStartOrdinal = frame?.startOrdinal ?? 0;
        this.passTargetLine = frame?.targetLine ?? null;
        for (const [line, entries] of frame?.clearedStaged ?? []) {
          this.staged.set(line, entries);
        }
      } else if (response.undone.line !== null) {
        this.staged.set(response.undone.line,
          { ...(response.undone.entries ?? {}) });
      }
      this.session = response;
      this.render();
    });
  }

  makeLoop(target: number): void {
    this.enqueue(async () => {
      const session = this.requireSession();
      this.banner.hide();
      const response = await this.api.makeLoop(
        session.session_id, session.revision, target);
      const clearedStaged = new Map<number, Record<string, string>>();
      for (const [line, entries] of this.staged) {
        if (line >= target) clearedStaged.set(line, entries);
      }
      for (const line of clearedStaged.keys()) this.staged.delete(line);
      this.passStack.push({
        startOrdinal: this.passStartOrdinal,
        targetLine: this.passTargetLine ?? 0,
        clearedStaged,
      });
      this.passStartOrdinal = response.answers.length;
      this.passTargetLine = target;
      this.session = response;
      this.render();
    });
  }

  submit(): void {
    this.enqueue(async () => {
      const session = this.requireSession();
      this.banner.hide();
      const tag = this.tagInput.value.trim();
      this.session = await this.api.submit(
        session.session_id, session.revision, tag === "" ? undefined : tag);
      this.render();
    });
  }

  private requireSession(): SessionWire {
    if (this.session === null) throw new Error("session not started");
    return this.session;
  }

  private openInput(column: string): HTMLInputElement | null {
    return this.gridHost.querySelector<HTMLInputElement>(
      `tr.row-open input[data-variable="${column}"]`);
  }

  // -- row bookkeeping ----------------------------------------------------

  private latestAnswerFor(line: number, beforeOrdinal: number | null): AnswerWire | null {
    const answers = this.session?.answers ?? [];
    for (let i = answers.length - 1; i >= 0; i -= 1) {
      const answer = answers[i];
      if (answer.line !== line) continue;
      if (beforeOrdinal !== null && answer.ordinal >= beforeOrdinal) continue;
      return answer;
    }
    return null;
  }

  /** What the grid row for `line` should display right now. */
  private rowContent(line: number): { kind: "locked"; answer: AnswerWire }
      | { kind: "open" } | { kind: "empty" } {
    const session = this.requireSession();
    const current = this.latestAnswerFor(line, null);
    if (current !== null && current.ordinal >= this.passStartOrdinal) {
      return { kind: "locked", answer: current };
    }
    if (line === session.cursor_line) return { kind: "open" };
    if (this.passTargetLine !== null && line < this.passTargetLine) {
      const history = this.latestAnswerFor(line, this.passStartOrdinal);
      if (history !== null) return { kind: "locked", answer: history };
    }
    return { kind: "empty" };
  }

  // -- rendering ----------------------------------------------------------

  private render(): void {
    const session = this.requireSession();
    this.renderStatus(session);
    this.renderGrid(session);
    this.renderResult(session);
    for (const [line, row] of this.codeRows) {
      row.classList.toggle("current-line", line === session.cursor_line);
    }
    const submit = this.root.querySelector<HTMLButtonElement>(".submit-button");
    if (submit) submit.disabled = !session.can_submit || session.submitted;
  }

  private renderStatus(session: SessionWire): void {
    clear(this.statusHost);
    const indicator = el("span", "iteration-indicator",
      String(session.iteration_indicator));
    const label = el("div", "status-line");
    label.appendChild(el("span", undefined, "iteration: "));
    label.appendChild(indicator);
    this.statusHost.appendChild(label);
    this.statusHost.appendChild(el("div", "cursor-note",
      session.cursor_line === null
        ? "end of program reached"
        : `next line to enter: ${session.cursor_line}`));
  }

  private renderGrid(session: SessionWire): void {
    clear(this.gridHost);
    const table = el("table", "worksheet");
    const head = el("tr");
    head.appendChild(el("th", undefined, "line"));
    head.appendChild(el("th", undefined, "iteration"));
    for (const column of this.payload.columns) {
      head.appendChild(el("th", "variable-header", column));
    }
    table.appendChild(head);
    for (const line of this.payload.executable_lines) {
      table.appendChild(this.renderRow(session, line));
    }
    this.gridHost.appendChild(table);
    this.gridHost.appendChild(this.renderControls(session));
  }

  private renderRow(session: SessionWire, line: number): HTMLElement {
    const content = this.rowContent(line);
    const row = el("tr", `worksheet-row row-${content.kind}`);
    row.dataset.line = String(line);
    row.appendChild(el("td", "row-line", String(line)));

    const iteration = el("td", "row-iteration");
    if (content.kind === "locked") {
      iteration.textContent = content.answer.iteration_claimed.join(".");
    } else if (content.kind === "open") {
      iteration.textContent = String(session.iteration_indicator);
    }
    row.appendChild(iteration);

    const openEntries = {
      ...this.staged.get(line),
      ...session.open_entries[String(line)],
    };
    for (const column of this.payload.columns) {
      const cell = el("td");
      const input = el("input", "cell-input");
      input.type = "text";
      input.dataset.line = String(line);
      input.dataset.variable = column;
      if (content.kind === "locked") {
        input.value = content.answer.entries[column] ?? "";
        input.readOnly = true;
        input.classList.add("locked");
      } else if (content.kind === "open") {
        input.value = openEntries[column] ?? "";
        input.addEventListener("input", () => {
          const text = this.staged.get(line) ?? {};
          text[column] = input.value;
          this.staged.set(line, text);
        });
        input.addEventListener("keydown", (event) => {
          if ((event as KeyboardEvent).key === "Enter") this.enterLine();
        });
      } else {
        input.disabled = true;
      }
      cell.appendChild(input);
      row.appendChild(cell);
    }
    return row;
  }

  private renderControls(session: SessionWire): HTMLElement {
    const bar = el("div", "eval-controls");
    const enter = button("Enter Line", "enter-button", () => this.enterLine());
    enter.disabled = session.cursor_line === null || session.submitted;
    bar.appendChild(enter);

    const undo = button("Undo", "undo-button", () => this.undo());
    undo.disabled = session.submitted;
    bar.appendChild(undo);

    const targets = this.loopTargets(session);
    const select = el("select", "loopback-select");
    for (const line of targets) {
      const option = el("option", undefined, String(line));
      option.value = String(line);
      select.appendChild(option);
    }
    select.disabled = targets.length === 0 || session.submitted;
    bar.appendChild(el("span", "loopback-label", "Loop back to line:"));
    bar.appendChild(select);
    const loop = button("Make Loop", "make-loop-button", () => {
      if (select.value !== "") this.makeLoop(Number(select.value));
    });
    loop.disabled = targets.length === 0 || session.submitted;
    bar.appendChild(loop);
    return bar;
  }

  /** All previously entered lines the student could jump back to. */
  private loopTargets(session: SessionWire): number[] {
    const seen = new Set<number>();
    for (const answer of session.answers) {
      if (session.cursor_line === null || answer.line < session.cursor_line) {
        seen.add(answer.line);
      }
    }
    return [...seen].sort((a, b) => a - b);
  }

  private renderResult(session: SessionWire): void {
    clear(this.resultHost);
    if (!session.submitted || !session.result) return;
    const result = session.result;
    const panel = el("div", "result-panel");
    panel.appendChild(el("h3", undefined, "Submission graded"));
    panel.appendChild(el("div", "result-score",
      `score: ${result.score_percent.toFixed(1)}`));
    panel.appendChild(el("div", "result-cells",
      `cells: ${result.correct_cells}/${result.total_cells} correct`));

    const table = el("table", "result-steps");
    const head = el("tr");
    for (const title of ["step", "truth line", "claimed line", "cells"]) {
      head.appendChild(el("th", undefined, title));
    }
    table.appendChild(head);
    for (const step of result.per_step) {
      const row = el("tr");
      row.appendChild(el("td", undefined, String(step.index)));
      row.appendChild(el("td", undefined,
        step.truth_line === null ? "—" : String(step.truth_line)));
      row.appendChild(el("td", undefined,
        step.claimed_line === null ? "—" : String(step.claimed_line)));
      const cells = el("td", "result-cell-list");
      for (const cell of step.cells) {
        const chip = el("span", `result-cell verdict-${cell.verdict.kind}`,
          `${cell.variable}=${cell.entered === "" ? "∅" : cell.entered}`);
        cells.appendChild(chip);
      }
      row.appendChild(cells);
      table.appendChild(row);
    }
    panel.appendChild(table);
    this.resultHost.appendChild(panel);
  }
}
