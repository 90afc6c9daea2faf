// Boots the real tutor server once for the whole test run; the UI
// contract tests talk to it over actual HTTP.

import { ChildProcess, spawn } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import type { TestProject } from "vitest/node";

const PORT = 8900 + (process.pid % 90);
const REPO_ROOT = resolve(__dirname, "..", "..");

let server: ChildProcess | null = null;
let dataDir: string | null = null;

async function waitForHealth(url: string): Promise<void> {
  for (let attempt = 0; attempt < 120; attempt += 1) {
    try {
      const response = await fetch(`${url}/api/health`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 250));
  }
  throw new Error(`server did not become healthy at ${url}`);
}

export default async function setup(project: TestProject): Promise<() => void> {
  dataDir = mkdtempSync(join(tmpdir(), "line-explorer-ui-"));
  const url = `http://127.0.0.1:${PORT}`;
  server = spawn(
    "python3",
    [
      "-m", "line_explorer", "serve",
      "--exercises-dir", join(REPO_ROOT, "exercises"),
      "--data-dir", dataDir,
      "--host", "127.0.0.1",
      "--port", String(PORT),
    ],
    { cwd: REPO_ROOT, stdio: ["ignore", "pipe", "pipe"] },
  );
  server.stderr?.on("data", (chunk: Buffer) => {
    const text = chunk.toString();
    if (text.includes("Traceback")) console.error(text);
  });
  await waitForHealth(url);
  project.provide("serverUrl", url);

  return () => {
    server?.kill();
    if (dataDir) rmSync(dataDir, { recursive: true, force: true });
  };
}

declare module "vitest" {
  export interface ProvidedContext {
    serverUrl: string;
  }
}
