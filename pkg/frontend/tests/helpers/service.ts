import { spawn, type ChildProcess } from "node:child_process";

export interface ServiceHandle {
  baseUrl: string;
  stop(): Promise<void>;
}

/**
 * Start the real labeling service on a local port and wait until it
 * answers HTTP. First startup compiles the placement kernel, so the
 * readiness loop is patient.
 */
export async function startService(port: number): Promise<ServiceHandle> {
  const child: ChildProcess = spawn("labelgrid", ["serve", "--port", String(port)], {
    stdio: ["ignore", "pipe", "pipe"],
  });
  let stderr = "";
  child.stderr?.on("data", (chunk) => {
    stderr += String(chunk);
  });
  const baseUrl = `http://127.0.0.1:${port}`;

  const deadline = Date.now() + 45_000;
  for (;;) {
    if (child.exitCode !== null) {
      throw new Error(`service exited early (code ${child.exitCode}):\n${stderr}`);
    }
    try {
      const resp = await fetch(`${baseUrl}/v1/datasets/probe/meta`);
      if (resp.status === 404) break; // up and routing
    } catch {
      // not listening yet
    }
    if (Date.now() > deadline) {
      child.kill("SIGKILL");
      throw new Error(`service did not become ready:\n${stderr}`);
    }
    await sleep(200);
  }

  return {
    baseUrl,
    stop: () =>
      new Promise<void>((resolve) => {
        child.once("exit", () => resolve());
        child.kill("SIGTERM");
        setTimeout(() => child.kill("SIGKILL"), 5000).unref();
      }),
  };
}

export function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

export async function waitFor(cond: () => boolean, timeoutMs = 10_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (!cond()) {
    if (Date.now() > deadline) throw new Error("condition not met in time");
    await sleep(10);
  }
}
