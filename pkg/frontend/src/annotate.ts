// Annotation view: answer first, rubric second. Entered state survives
// failed submissions; errors land in an inline banner.

import { ApiError } from "./api";
import { renderRichText, escapeHtml } from "./highlight";
import { UiSession } from "./session";
import { displayOrder } from "./shuffle";

const ITEM_LABELS: Record<string, string> = {
  sufficient_info: "Provides sufficient information",
  correct_answer: "Has a correct answer",
  unique_choices: "Choices are unique",
  no_obvious_wrong: "No obviously wrong choice",
  correct_code: "Code is correct",
  lo_alignment: "Aligned with the learning objective",
};

function label(name: string): string {
  return ITEM_LABELS[name] ?? name;
}

export function renderAnnotate(session: UiSession, root: HTMLElement): void {
  root.innerHTML = "";

  const banner = document.createElement("div");
  banner.className = "banner";
  banner.hidden = true;
  root.appendChild(banner);

  const showError = (message: string) => {
    banner.textContent = message;
    banner.hidden = false;
  };

  if (session.phase === "done" || !session.current) {
    const done = document.createElement("p");
    done.className = "all-done";
    done.textContent = "No tasks left for you. Thanks for rating!";
    root.appendChild(done);
    return;
  }

  const { task, progress } = session.current;

  const meta = document.createElement("p");
  meta.className = "progress";
  meta.textContent =
    `Question ${progress.annotatedByRater + 1} of ${progress.totalMcqs} ` +
    `(${progress.remainingForRater} remaining for you)`;
  root.appendChild(meta);

  const stem = document.createElement("div");
  stem.className = "stem";
  stem.innerHTML = renderRichText(task.stem);
  root.appendChild(stem);

  if (task.lints.length > 0) {
    const lints = document.createElement("div");
    lints.className = "lint-badges";
    for (const finding of task.lints) {
      const badge = document.createElement("span");
      badge.className = `lint-badge lint-${finding.severity}`;
      badge.title = finding.detail;
      badge.textContent = finding.code;
      lints.appendChild(badge);
    }
    root.appendChild(lints);
  }

  const choicesBox = document.createElement("div");
  choicesBox.className = "choices";
  const ordered = displayOrder(task.mcqId, session.raterId, task.choices);
  for (const choice of ordered) {
    const button = document.createElement("button");
    button.className = "choice";
    button.dataset.option = choice.option;
    button.disabled = session.phase !== "answering";
    button.innerHTML =
      `<span class="choice-label">${escapeHtml(choice.option)}</span>` +
      `<span class="choice-text">${renderRichText(choice.text)}</span>`;
    button.addEventListener("click", async () => {
      try {
        await session.answer(choice.option);
        renderAnnotate(session, root);
      } catch (error) {
        showError(error instanceof ApiError ? `Server: ${error.message}` : String(error));
      }
    });
    choicesBox.appendChild(button);
  }
  root.appendChild(choicesBox);

  // The rubric pane exists only after the answer has been recorded; before
  // that there is nothing to block because there is nothing to click.
  if (session.phase !== "judging" || !session.reveal) return;

  const reveal = document.createElement("div");
  reveal.className = session.reveal.correct ? "reveal correct" : "reveal incorrect";
  reveal.innerHTML =
    `<p>${session.reveal.correct ? "Correct." : "Not quite."} ` +
    `The key is <strong>${escapeHtml(session.reveal.key)}</strong>.</p>` +
    `<div class="explanation">${renderRichText(session.reveal.explanation)}</div>`;
  root.appendChild(reveal);

  const rubric = document.createElement("form");
  rubric.className = "rubric";
  for (const [item, categories] of Object.entries(session.rubricItems)) {
    const fieldset = document.createElement("fieldset");
    fieldset.dataset.item = item;
    const legend = document.createElement("legend");
    legend.textContent = label(item);
    fieldset.appendChild(legend);
    for (const category of categories) {
      const wrap = document.createElement("label");
      const radio = document.createElement("input");
      radio.type = "radio";
      radio.name = item;
      radio.value = category;
      radio.checked = session.judgments[item] === category;
      radio.addEventListener("change", () => session.setJudgment(item, category));
      wrap.appendChild(radio);
      wrap.appendChild(document.createTextNode(" " + category.replaceAll("_", " ")));
      fieldset.appendChild(wrap);
    }
    rubric.appendChild(fieldset);
  }

  const submit = document.createElement("button");
  submit.type = "submit";
  submit.className = "submit";
  submit.textContent = "Submit annotation";
  rubric.appendChild(submit);

  rubric.addEventListener("submit", async (event) => {
    event.preventDefault();
    try {
      await session.submit();
      renderAnnotate(session, root);
    } catch (error) {
      if (error instanceof ApiError) {
        showError(`Submission failed (${error.status}): ${error.message}. Your entries are kept; retry.`);
      } else {
        showError(String(error));
      }
    }
  });
  root.appendChild(rubric);
}
