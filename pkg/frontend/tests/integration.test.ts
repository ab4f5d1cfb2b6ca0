/** End-to-end acceptance: the console's client code against the real server.
 *
 * Seeds a workspace with exactly 50 pending reviews, resolves 10 through the
 * QueueController, double-submits one of them, and checks the written
 * statements through /query. Skipped when python3 is unavailable.
 */

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join, resolve } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { QueueController } from "../src/controller.js";

const ROOT = resolve(dirname(fileURLToPath(import.meta.url)), "..", "..");
const PORT = 18750 + (process.pid % 1000);
const BASE = `http://127.0.0.1:${PORT}`;

const havePython =
  spawnSync("python3", ["-c", "import citykb"], { cwd: ROOT }).status === 0;

const suite = havePython ? describe : describe.skip;

suite("review flow against a seeded server", () => {
  let server: ChildProcess;
  let workDir: string;

  beforeAll(async () => {
    workDir = mkdtempSync(join(tmpdir(), "citykb-console-"));
    server = spawn(
      "python3",
      [
        join(ROOT, "scripts", "seed_review_server.py"),
        "--out",
        join(workDir, "ws"),
        "--pending",
        "50",
        "--port",
        String(PORT),
      ],
      { cwd: ROOT, stdio: ["ignore", "pipe", "pipe"] },
    );
    let stderr = "";
    server.stderr?.on("data", (chunk) => (stderr += String(chunk)));
    const deadline = Date.now() + 120_000;
    for (;;) {
      if (server.exitCode !== null) {
        throw new Error(`seed server exited early: ${stderr}`);
      }
      try {
        const response = await fetch(`${BASE}/reviews?page_size=1`);
        if (response.ok) break;
      } catch {
        // not up yet
      }
      if (Date.now() > deadline) throw new Error(`server never came up: ${stderr}`);
      await new Promise((r) => setTimeout(r, 300));
    }
  }, 150_000);

  afterAll(() => {
    server?.kill("SIGTERM");
    if (workDir) rmSync(workDir, { recursive: true, force: true });
  });

  it("resolving 10 of 50 leaves exactly 40 pending server-side", async () => {
    const api = new ApiClient(BASE);
    const controller = new QueueController(api, 10);
    await controller.load();
    expect(controller.snapshot.total).toBe(50);

    const resolvedIds: string[] = [];
    for (let i = 0; i < 10; i++) {
      await controller.load();
      const card = controller.snapshot.cards[0]!;
      controller.select(card.review_id, card.candidates[0]!.iri);
      const result = await controller.submit(card.review_id, "console-test");
      expect(result.status).toBe("resolved");
      expect(result.replay).toBe(false);
      resolvedIds.push(card.review_id);
    }

    const pending = await api.listReviews({ status: "pending" }, 1, 1);
    expect(pending.total).toBe(40);
    const resolved = await api.listReviews({ status: "resolved" }, 1, 50);
    expect(resolved.total).toBe(10);
    expect(new Set(resolved.items.map((c) => c.review_id))).toEqual(new Set(resolvedIds));
  }, 60_000);

  it("double-submit records exactly one resolution", async () => {
    const api = new ApiClient(BASE);
    const controller = new QueueController(api, 10);
    await controller.load();
    const card = controller.snapshot.cards[0]!;
    controller.select(card.review_id, card.candidates[1]!.iri);
    const [a, b] = await Promise.all([
      controller.submit(card.review_id),
      controller.submit(card.review_id),
    ]);
    expect(a).toBe(b);
    // replay with the recorded key confirms a single stored resolution
    const again = await api.resolve(
      card.review_id,
      card.candidates[1]!.iri,
      (a as { review_id: string } & Record<string, unknown>) && controllerKey(controller, card.review_id),
    );
    expect(again.replay).toBe(true);
    const pending = await api.listReviews({ status: "pending" }, 1, 1);
    expect(pending.total).toBe(39);
  }, 60_000);

  it("a resolution's sameAs and link statements are retrievable via /query", async () => {
    const api = new ApiClient(BASE);
    const controller = new QueueController(api, 10);
    await controller.load();
    const card = controller.snapshot.cards[0]!;
    const chosen = card.candidates[0]!;
    controller.select(card.review_id, chosen.iri);
    await controller.submit(card.review_id);

    const sameAs = await api.query({
      patterns: [[`${card.service_iri}/toponym`, "owl:sameAs", "?road"]],
      project: ["road"],
    });
    expect(sameAs.rows.map((r) => r[0]!.value)).toEqual([chosen.road_iri]);

    const predicate = chosen.level === "street-number" ? "city:hasAccess" : "city:isIn";
    const link = await api.query({
      patterns: [[card.service_iri, predicate, "?target"]],
      project: ["target"],
    });
    expect(link.rows.map((r) => r[0]!.value)).toEqual([chosen.iri]);
  }, 60_000);
});

/** The controller keeps idempotency keys private; for the replay probe we
 * reach through its internals rather than widening the public surface. */
function controllerKey(controller: QueueController, reviewId: string): string {
  const keys = (controller as unknown as { keys: Map<string, string> }).keys;
  const key = keys.get(reviewId);
  if (!key) throw new Error("controller never issued a key");
  return key;
}
