// Spawns two real simloop backends for the UI tests:
//  - a stub-provider project of 20 synthetic customers (port 8655)
//  - a replay-provider project of the bundled bathroom scenes (port 8656)

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { REPLAY_BACKEND, STUB_BACKEND } from "./ports.js";

function cli(args: string[]): string {
  const result = spawnSync("simloop", args, { encoding: "utf-8" });
  if (result.status !== 0) {
    throw new Error(
      `simloop ${args.join(" ")} failed (${result.status}): ${result.stderr}`,
    );
  }
  return result.stdout;
}

function python(code: string): string {
  const result = spawnSync("python3", ["-c", code], { encoding: "utf-8" });
  if (result.status !== 0) {
    throw new Error(`python failed: ${result.stderr}`);
  }
  return result.stdout.trim();
}

async function waitForHealth(base: string): Promise<void> {
  const deadline = Date.now() + 30_000;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${base}/health`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error(`backend at ${base} never became healthy`);
}

export default async function setup(): Promise<() => void> {
  const work = mkdtempSync(join(tmpdir(), "simloop-ui-"));
  const servers: ChildProcess[] = [];

  // backend 1: synthetic customers + stub provider
  const csv = join(work, "customers.csv");
  cli(["synth", "--seed", "7", "--n", "20", "--clusters", "4", "--fraction", "0.1",
       "--out", csv]);
  const stubProject = join(work, "stub-proj");
  cli(["ingest", "tabular", "--project", stubProject, "--path", csv,
       "--id-column", "id"]);
  servers.push(
    spawn("simloop", [
      "serve", "--project", stubProject,
      "--bind", STUB_BACKEND.replace("http://", ""),
      "--provider", "stub", "--embed-dim", "64",
    ], { stdio: "ignore" }),
  );

  // backend 2: bundled bathroom scenes + replay provider covering both the
  // room-function prompt and the room-and-floor-color refinement
  const manifest = python(
    "from simloop.fixtures import fixture_path; print(fixture_path('bathroom_scenes.json'))",
  );
  const functionRun = python(
    "from simloop.fixtures import fixture_path; print(fixture_path('room_function.jsonl'))",
  );
  const floorRun = python(
    "from simloop.fixtures import fixture_path; print(fixture_path('room_floor_color.jsonl'))",
  );
  const combined = join(work, "rooms.jsonl");
  writeFileSync(combined, readFileSync(functionRun, "utf-8") + readFileSync(floorRun, "utf-8"));
  const replayProject = join(work, "replay-proj");
  cli(["ingest", "images", "--project", replayProject, "--path", manifest]);
  servers.push(
    spawn("simloop", [
      "serve", "--project", replayProject,
      "--bind", REPLAY_BACKEND.replace("http://", ""),
      "--provider", "replay", "--fixture", combined,
    ], { stdio: "ignore" }),
  );

  await waitForHealth(STUB_BACKEND);
  await waitForHealth(REPLAY_BACKEND);

  return () => {
    for (const server of servers) server.kill();
  };
}
