import { BlindingViolationError } from "./api";
import { applyKey } from "./keyboard";
import { RaterQueue } from "./queue";
import { CRITERIA, Criterion } from "./types";

const DEFINITIONS: Record<Criterion, string> = {
  simplicity: "The output should be easy to understand for a reader below US grade 8.",
  accuracy: "The output should contain the accurate information from the source text.",
  completeness: "The output should minimize information lost from the original text.",
  brevity: "The output should be concise.",
};

function param(name: string): string | null {
  return new URLSearchParams(window.location.search).get(name);
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K, className: string, text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  node.className = className;
  node.textContent = text;
  return node;
}

function renderScoreRow(queue: RaterQueue, criterion: Criterion): HTMLElement {
  const row = el("div", `score-row${queue.focused === criterion ? " focused" : ""}`);
  row.title = DEFINITIONS[criterion];
  row.appendChild(el("span", "criterion-name", criterion));
  for (let score = 1; score <= 5; score++) {
    const button = el(
      "button",
      `score${queue.draft[criterion] === score ? " selected" : ""}`,
      String(score),
    );
    button.onclick = () => {
      queue.setScore(criterion, score);
      queue.focused = criterion;
      render(queue);
    };
    row.appendChild(button);
  }
  return row;
}

function render(queue: RaterQueue): void {
  const root = document.getElementById("app");
  if (!root) return;
  root.textContent = "";

  const progress = el(
    "div", "progress",
    `${queue.progress.done} / ${queue.progress.total} rated`,
  );
  root.appendChild(progress);

  if (queue.status === "loading") {
    root.appendChild(el("p", "status", "Loading..."));
    return;
  }
  if (queue.status === "error") {
    const banner = el("div", "banner error", queue.lastError);
    const retry = el("button", "retry", "Retry");
    retry.onclick = () => queue.load().then(() => render(queue), () => render(queue));
    banner.appendChild(retry);
    root.appendChild(banner);
    return;
  }
  if (queue.status === "done" || !queue.current) {
    root.appendChild(el("p", "status done", "All items rated. Thank you!"));
    return;
  }

  const panes = el("div", "panes");
  const sourcePane = el("div", "pane");
  sourcePane.appendChild(el("h2", "", "Abstract"));
  sourcePane.appendChild(el("p", "text", queue.current.source));
  const adaptedPane = el("div", "pane");
  adaptedPane.appendChild(el("h2", "", "Adaptation"));
  adaptedPane.appendChild(el("p", "text", queue.current.adaptation));
  panes.appendChild(sourcePane);
  panes.appendChild(adaptedPane);
  root.appendChild(panes);

  const scores = el("div", "scores");
  for (const criterion of CRITERIA) {
    scores.appendChild(renderScoreRow(queue, criterion));
  }
  root.appendChild(scores);

  const submit = el("button", "submit", "Submit");
  submit.disabled = !queue.canSubmit();
  submit.onclick = () =>
    queue.submit().then(() => render(queue), () => render(queue));
  root.appendChild(submit);
  root.appendChild(
    el("p", "hint", "Keys 1-5 score the highlighted criterion, Tab moves on, Enter submits."),
  );
}

export function start(): void {
  const sessionId = param("session") ?? localStorage.getItem("session_id");
  const rater = param("rater") ?? localStorage.getItem("rater_id");
  const root = document.getElementById("app");
  if (!sessionId || !rater) {
    root?.appendChild(
      el("p", "status error", "Open this page with ?session=...&rater=... in the URL."),
    );
    return;
  }

  const queue = new RaterQueue("", sessionId, rater);
  for (const [key, value] of Object.entries(queue.persistable())) {
    localStorage.setItem(key, value);
  }

  document.addEventListener("keydown", (event) => {
    if (queue.status !== "rating") return;
    if (event.key === "Tab") event.preventDefault();
    const result = applyKey(queue, event.key);
    if (result instanceof Promise) {
      result.then(() => render(queue), () => render(queue));
    } else {
      render(queue);
    }
  });

  queue.load().then(
    () => render(queue),
    (err) => {
      if (err instanceof BlindingViolationError) {
        root!.textContent = "";
        root!.appendChild(el("p", "status error", err.message));
      } else {
        render(queue);
      }
    },
  );
}

start();
