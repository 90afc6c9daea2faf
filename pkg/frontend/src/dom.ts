// Small DOM construction helpers shared by the views.

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function clear(node: HTMLElement): void {
  while (node.firstChild) node.removeChild(node.firstChild);
}

export function button(label: string, className: string,
                       onClick: () => void): HTMLButtonElement {
  const node = el("button", className, label);
  node.type = "button";
  node.addEventListener("click", onClick);
  return node;
}

/** Numbered read-only code pane; returns the per-line row elements so
 * callers can manage the current-line highlight. */
export function codePane(source: string): { pane: HTMLElement; rows: Map<number, HTMLElement> } {
  const pane = el("div", "code-pane");
  const rows = new Map<number, HTMLElement>();
  const lines = source.split("\n");
  if (lines.length && lines[lines.length - 1] === "") lines.pop();
  lines.forEach((text, i) => {
    const lineNo = i + 1;
    const row = el("div", "code-line");
    row.dataset.line = String(lineNo);
    row.appendChild(el("span", "code-line-number", String(lineNo)));
    row.appendChild(el("span", "code-line-text", text));
    rows.set(lineNo, row);
    pane.appendChild(row);
  });
  return { pane, rows };
}

export function errorBanner(): { banner: HTMLElement; show: (message: string) => void; hide: () => void } {
  const banner = el("div", "error-banner");
  banner.hidden = true;
  return {
    banner,
    show(message: string) {
      banner.textContent = message;
      banner.hidden = false;
    },
    hide() {
      banner.textContent = "";
      banner.hidden = true;
    },
  };
}
