// Demonstration view against the live server: check/show feedback,
// iteration dropdowns, and narration-synchronized highlighting.

import { beforeEach, describe, expect, it } from "vitest";

import type { DemoPayload } from "../src/api.js";
import { DemoView } from "../src/demo.js";
import { FakeSink, client, mount, typeInto } from "./helpers.js";

let payload: DemoPayload;
let sink: FakeSink;
let view: DemoView;
let root: HTMLElement;

function input(line: number, variable = "i"): HTMLInputElement {
  const node = root.querySelector<HTMLInputElement>(
    `input[data-line="${line}"][data-variable="${variable}"]`);
  if (!node) throw new Error(`no input for line ${line}`);
  return node;
}

function clickRowButton(kind: "check" | "show", line: number): void {
  const node = root.querySelector<HTMLButtonElement>(
    `button.${kind}-button[data-line="${line}"]`);
  if (!node) throw new Error(`no ${kind} button for line ${line}`);
  node.click();
}

function highlightedLine(): number | null {
  const row = root.querySelector<HTMLElement>(".code-line.current-line");
  return row ? Number(row.dataset.line) : null;
}

beforeEach(async () => {
  const api = client();
  payload = await api.demoPayload("count-up");
  root = mount();
  sink = new FakeSink();
  view = new DemoView(root, api, payload, sink);
});

describe("worksheet shape", () => {
  it("has one column per variable and one row per executable line", () => {
    const headers = [...root.querySelectorAll(".variable-header")]
      .map((th) => th.textContent);
    expect(headers).toEqual(["i"]);
    const rows = [...root.querySelectorAll<HTMLElement>("tr.worksheet-row")]
      .map((tr) => Number(tr.dataset.line));
    expect(rows).toEqual([1, 2, 3]);
  });

  it("iteration dropdowns list exactly the passes the line executes", () => {
    const options = (line: number) =>
      [...root.querySelectorAll<HTMLOptionElement>(
        `select.iteration-select[data-line="${line}"] option`)]
        .map((o) => o.textContent);
    expect(options(2)).toEqual(["1", "2", "3"]);
    expect(options(3)).toEqual(["1", "2"]);
    // straight-line code has a single unnumbered pass, no dropdown
    expect(root.querySelector('select.iteration-select[data-line="1"]')).toBeNull();
  });
});

describe("check and show", () => {
  it("colors a correct cell green and an incorrect cell red", async () => {
    typeInto(input(1), "0");
    clickRowButton("check", 1);
    await view.settle();
    expect(input(1).classList.contains("verdict-correct")).toBe(true);

    typeInto(input(2), "5");
    clickRowButton("check", 2);
    await view.settle();
    expect(input(2).classList.contains("verdict-incorrect")).toBe(true);
    expect(input(2).classList.contains("verdict-correct")).toBe(false);
  });

  it("clears the verdict color as soon as the cell is edited", async () => {
    typeInto(input(1), "0");
    clickRowButton("check", 1);
    await view.settle();
    expect(input(1).classList.contains("verdict-correct")).toBe(true);
    typeInto(input(1), "1");
    expect(input(1).classList.contains("verdict-correct")).toBe(false);
    expect(input(1).classList.contains("verdict-incorrect")).toBe(false);
  });

  it("show fills the row with the truth values", async () => {
    clickRowButton("show", 3);
    await view.settle();
    expect(input(3).value).toBe("1");
  });

  it("keeps each pass's entries and verdicts separate", async () => {
    typeInto(input(2), "0");
    clickRowButton("check", 2);
    await view.settle();
    expect(input(2).classList.contains("verdict-correct")).toBe(true);

    const select = root.querySelector<HTMLSelectElement>(
      'select.iteration-select[data-line="2"]')!;
    select.selectedIndex = 1;
    select.dispatchEvent(new Event("change", { bubbles: true }));
    expect(input(2).value).toBe("");
    expect(input(2).classList.contains("verdict-correct")).toBe(false);

    select.selectedIndex = 0;
    select.dispatchEvent(new Event("change", { bubbles: true }));
    expect(input(2).value).toBe("0");
    expect(input(2).classList.contains("verdict-correct")).toBe(true);
  });
});

describe("narrated playback", () => {
  it("keeps the highlighted line equal to the current trace step", () => {
    expect(highlightedLine()).toBe(1);
    const forward = root.querySelector<HTMLButtonElement>(
      'button[data-action="move-forward"]')!;
    forward.click();
    expect(highlightedLine()).toBe(2);
    forward.click();
    expect(highlightedLine()).toBe(3);
    root.querySelector<HTMLButtonElement>('button[data-action="move-back"]')!.click();
    expect(highlightedLine()).toBe(2);
  });

  it("play-all narrates every step and syncs the iteration dropdown", () => {
    root.querySelector<HTMLButtonElement>('button[data-action="play-all"]')!.click();
    for (let i = 0; i < 5; i += 1) sink.end();
    // last trace step: the while check that fails on pass 3
    expect(view.playback.stepIndex).toBe(5);
    expect(highlightedLine()).toBe(2);
    const select = root.querySelector<HTMLSelectElement>(
      'select.iteration-select[data-line="2"]')!;
    expect(select.selectedIndex).toBe(2);
    expect(sink.played).toHaveLength(6);

    sink.end();
    expect(view.playback.state).toBe("idle");
  });

  it("stop-all goes idle without moving the step", () => {
    root.querySelector<HTMLButtonElement>('button[data-action="play-all"]')!.click();
    sink.end();
    root.querySelector<HTMLButtonElement>('button[data-action="stop-all"]')!.click();
    expect(view.playback.state).toBe("idle");
    expect(view.playback.stepIndex).toBe(1);
    expect(highlightedLine()).toBe(2);
  });
});
