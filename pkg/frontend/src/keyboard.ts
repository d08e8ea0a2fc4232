import { RaterQueue } from "./queue";

export type KeyAction =
  | { kind: "score"; score: number }
  | { kind: "focus-next" }
  | { kind: "submit" }
  | { kind: "none" };

/** Digits 1-5 score the focused criterion, Tab moves focus to the next
 * criterion, Enter submits once all four are set. */
export function actionForKey(key: string, canSubmit: boolean): KeyAction {
  if (key >= "1" && key <= "5") {
    return { kind: "score", score: Number(key) };
  }
  if (key === "Tab") {
    return { kind: "focus-next" };
  }
  if (key === "Enter" && canSubmit) {
    return { kind: "submit" };
  }
  return { kind: "none" };
}

export function applyKey(queue: RaterQueue, key: string): Promise<void> | void {
  const action = actionForKey(key, queue.canSubmit());
  switch (action.kind) {
    case "score":
      queue.setScore(queue.focused, action.score);
      queue.focusNext();
      return;
    case "focus-next":
      queue.focusNext();
      return;
    case "submit":
      return queue.submit();
    case "none":
      return;
  }
}
