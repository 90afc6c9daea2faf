import { inject } from "vitest";

import { ApiClient } from "../src/api.js";
import type { AudioSink } from "../src/playback.js";

export function serverUrl(): string {
  return inject("serverUrl");
}

export function client(): ApiClient {
  return new ApiClient(serverUrl());
}

export function mount(): HTMLElement {
  document.body.innerHTML = "";
  const root = document.createElement("main");
  root.id = "app";
  document.body.appendChild(root);
  return root;
}

/** Scripted stand-in for the audio element: playback advances only when
 * a test fires `ended`. */
export class FakeSink implements AudioSink {
  played: string[] = [];
  events: string[] = [];
  private onEnded: (() => void) | null = null;

  play(src: string, onEnded: () => void): void {
    this.played.push(src);
    this.events.push(`play:${src.split("/").pop()}`);
    this.onEnded = onEnded;
  }

  pause(): void {
    this.events.push("pause");
  }

  resume(): void {
    this.events.push("resume");
  }

  stop(): void {
    this.events.push("stop");
    this.onEnded = null;
  }

  /** Simulate the current clip finishing. */
  end(): void {
    const callback = this.onEnded;
    this.onEnded = null;
    callback?.();
  }
}

/** Set an input's value the way a user would, firing the input event. */
export function typeInto(input: HTMLInputElement, value: string): void {
  input.value = value;
  input.dispatchEvent(new Event("input", { bubbles: true }));
}

export function choose(control: HTMLInputElement | HTMLSelectElement,
                       value: string): void {
  if (control instanceof HTMLSelectElement) {
    control.value = value;
  } else {
    control.checked = true;
  }
  control.dispatchEvent(new Event("change", { bubbles: true }));
}

/** String-valued JSON leaves equal to a truth rendering; object keys are
 * structural (line numbers) and stay out of scope. */
export function leakViolations(doc: unknown, truth: Set<string>): string[] {
  const found: string[] = [];
  const walk = (node: unknown, path: string): void => {
    if (typeof node === "string") {
      if (truth.has(node)) found.push(`${path} = ${node}`);
    } else if (Array.isArray(node)) {
      node.forEach((item, i) => walk(item, `${path}[${i}]`));
    } else if (node !== null && typeof node === "object") {
      for (const [key, value] of Object.entries(node)) {
        walk(value, `${path}.${key}`);
      }
    }
  };
  walk(doc, "$");
  return found;
}
