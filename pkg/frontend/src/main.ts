// Entry point: a tiny hash router over the three views plus the
// exercise catalogue.

import { ApiClient, ApiError } from "./api.js";
import { DemoView } from "./demo.js";
import { clear, el, errorBanner } from "./dom.js";
import { EvalView } from "./eval.js";
import { SusForm } from "./sus.js";

async function renderCatalogue(root: HTMLElement, api: ApiClient): Promise<void> {
  clear(root);
  root.appendChild(el("h2", undefined, "Exercises"));
  const list = el("ul", "exercise-list");
  for (const exercise of await api.listExercises()) {
    const item = el("li", "exercise-entry");
    item.appendChild(el("span", "exercise-name", `${exercise.title} — `));
    for (const mode of exercise.modes) {
      const link = el("a", "mode-link",
        mode === "demonstration" ? "demonstration" : "evaluation");
      link.href = mode === "demonstration"
        ? `#/demo/${exercise.id}`
        : `#/eval/${exercise.id}`;
      item.appendChild(link);
      item.appendChild(document.createTextNode(" "));
    }
    list.appendChild(item);
  }
  root.appendChild(list);
  const susLink = el("a", "mode-link", "usability questionnaire");
  susLink.href = "#/sus";
  root.appendChild(susLink);
}

export async function route(root: HTMLElement, api: ApiClient,
                            hash: string): Promise<void> {
  const demoMatch = hash.match(/^#\/demo\/(.+)$/);
  const evalMatch = hash.match(/^#\/eval\/(.+)$/);
  try {
    if (demoMatch) {
      const payload = await api.demoPayload(decodeURIComponent(demoMatch[1]));
      new DemoView(root, api, payload);
    } else if (evalMatch) {
      const payload = await api.evalPayload(decodeURIComponent(evalMatch[1]));
      new EvalView(root, api, payload).start();
    } else if (hash === "#/sus") {
      new SusForm(root, api).start();
    } else {
      await renderCatalogue(root, api);
    }
  } catch (err) {
    clear(root);
    const banner = errorBanner();
    root.appendChild(banner.banner);
    banner.show(err instanceof ApiError
      ? `${err.code}: ${err.message}`
      : String(err));
  }
}

export function install(): void {
  const root = document.getElementById("app");
  if (!root) return;
  const api = new ApiClient();
  const dispatch = () => void route(root, api, window.location.hash);
  window.addEventListener("hashchange", dispatch);
  dispatch();
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  install();
}
