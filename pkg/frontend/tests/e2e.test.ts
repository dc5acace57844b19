// Scripted browser session against the real service: seed a store, start
// `quizforge serve` on a loopback port, and drive the actual DOM through the
// answer -> rubric -> submit flow.

import { ChildProcess, execFileSync, spawn } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { Api } from "../src/api";
import { renderAnnotate } from "../src/annotate";
import { renderDashboard } from "../src/dashboard";
import { UiSession } from "../src/session";

const here = dirname(fileURLToPath(import.meta.url));
const port = 20000 + Math.floor(Math.random() * 9000);
const base = `http://127.0.0.1:${port}`;

let server: ChildProcess;

async function waitFor(check: () => boolean | Promise<boolean>, timeoutMs = 15000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    if (await check()) return;
    await new Promise((resolve) => setTimeout(resolve, 100));
  }
  throw new Error("timed out waiting for condition");
}

beforeAll(async () => {
  const storeDir = join(mkdtempSync(join(tmpdir(), "qf-ui-")), "store");
  execFileSync("python3", [join(here, "seed_store.py"), storeDir], { stdio: "pipe" });
  server = spawn("quizforge", ["serve", "--store", storeDir, "--port", String(port)], {
    stdio: "ignore",
  });
  await waitFor(async () => {
    try {
      const response = await fetch(`${base}/api/rubric`);
      return response.ok;
    } catch {
      return false;
    }
  });
});

afterAll(() => {
  server?.kill();
});

const FIRST_CATEGORY: Record<string, string> = {
  sufficient_info: "pass",
  correct_answer: "single",
  unique_choices: "unique",
  no_obvious_wrong: "pass",
  correct_code: "correct",
  lo_alignment: "aligned",
};

describe("annotation flow against the live service", () => {
  it("completes answer -> rubric -> submit, with the rubric unreachable pre-answer", async () => {
    const app = document.createElement("div");
    document.body.appendChild(app);

    const api = new Api(base);
    const session = new UiSession(api, "e2e-rater", "student");
    await session.loadNext();
    renderAnnotate(session, app);

    // The task rendered with its stem and choices.
    expect(session.current).not.toBeNull();
    expect(app.querySelector(".stem")?.textContent).toBeTruthy();
    expect(app.querySelectorAll(".choice").length).toBe(3);

    // Nothing the server sent before the answer contains the key.
    expect(JSON.stringify(session.current)).not.toContain("correctAnswer");
    expect(JSON.stringify(session.current)).not.toContain("explanation");

    // Rubric pane unreachable pre-answer: not rendered, and the session
    // refuses to accept judgments or submit.
    expect(app.querySelector(".rubric")).toBeNull();
    expect(() => session.setJudgment("lo_alignment", "aligned")).toThrow();
    await expect(session.submit()).rejects.toThrow();

    // The server enforces the same rule independently of the UI: 412.
    const mcqId = session.current!.task.mcqId;
    const premature = await fetch(`${base}/api/tasks/${mcqId}/rubric`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({
        raterId: "e2e-rater",
        raterRole: "student",
        judgments: FIRST_CATEGORY,
      }),
    });
    expect(premature.status).toBe(412);

    // Answer by clicking a choice button; the reveal and rubric pane appear.
    app.querySelector<HTMLButtonElement>(".choice")!.click();
    await waitFor(() => app.querySelector(".rubric") !== null);
    expect(app.querySelector(".reveal")).not.toBeNull();
    expect(app.querySelectorAll(".rubric fieldset").length).toBe(6);

    // Tick one radio per rubric item (the first/best category everywhere,
    // matching the seed raters so the store stays unanimous).
    for (const fieldset of app.querySelectorAll(".rubric fieldset")) {
      const radio = fieldset.querySelector<HTMLInputElement>("input[type=radio]")!;
      radio.click();
    }
    expect(session.missingItems).toEqual([]);

    // Submit and advance to the next task.
    app.querySelector<HTMLButtonElement>(".submit")!.click();
    await waitFor(() => session.current?.task.mcqId !== mcqId);
    expect(session.phase).toBe("answering");
    expect(session.current!.progress.annotatedByRater).toBe(1);

    // The annotation is retrievable through the API: the verdict endpoint
    // resolves it, and a repeated answer attempt is rejected as a duplicate
    // because the stored annotation exists.
    const verdict = await api.verdict(mcqId);
    expect(verdict.categories.lo_alignment).toBe("aligned");
    const duplicate = await fetch(`${base}/api/tasks/${mcqId}/answer`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ raterId: "e2e-rater", option: "A" }),
    });
    expect(duplicate.status).toBe(409);

    document.body.removeChild(app);
  });

  it("renders 1.00 agreement cells for the unanimous fixture", async () => {
    const view = document.createElement("div");
    document.body.appendChild(view);
    await renderDashboard(new Api(base), view);

    const kappaCells = [...view.querySelectorAll("td.kappa")];
    const ac1Cells = [...view.querySelectorAll("td.ac1")];
    expect(kappaCells.length).toBe(6);
    expect(ac1Cells.length).toBe(6);
    for (const cell of [...kappaCells, ...ac1Cells]) {
      expect(cell.textContent).toBe("1.00");
    }

    // Both pools exist in the seeded store, so comparison sections render.
    expect(view.querySelectorAll(".comparison-item").length).toBe(6);
    document.body.removeChild(view);
  });
});
