import { ConflictError, fetchNext, submitRating } from "./api";
import { CRITERIA, Criterion, Progress, RaterItem, Scores } from "./types";

export type QueueStatus = "loading" | "rating" | "done" | "error";

/** Queue position lives on the server; this class only holds the item
 * currently on screen and the rater's draft scores for it. Reloading the
 * page and constructing a fresh queue therefore resumes at the first
 * unrated item with no client-side bookkeeping. */
export class RaterQueue {
  status: QueueStatus = "loading";
  current: RaterItem | null = null;
  progress: Progress = { done: 0, total: 0 };
  draft: Scores = {};
  focused: Criterion = CRITERIA[0];
  lastError = "";

  constructor(
    private baseUrl: string,
    private sessionId: string,
    private rater: string,
  ) {}

  async load(): Promise<void> {
    this.status = "loading";
    try {
      const payload = await fetchNext(this.baseUrl, this.sessionId, this.rater);
      this.progress = payload.progress;
      this.current = payload.item;
      this.draft = {};
      this.focused = CRITERIA[0];
      this.status = payload.item === null ? "done" : "rating";
    } catch (err) {
      this.status = "error";
      this.lastError = err instanceof Error ? err.message : String(err);
      throw err;
    }
  }

  setScore(criterion: Criterion, score: number): void {
    if (score < 1 || score > 5 || !Number.isInteger(score)) {
      throw new RangeError(`score ${score} outside 1-5`);
    }
    this.draft = { ...this.draft, [criterion]: score };
  }

  focusNext(): void {
    const i = CRITERIA.indexOf(this.focused);
    this.focused = CRITERIA[(i + 1) % CRITERIA.length];
  }

  canSubmit(): boolean {
    return (
      this.current !== null &&
      CRITERIA.every((criterion) => this.draft[criterion] !== undefined)
    );
  }

  /** POST the draft; the draft is cleared only once the server acknowledged
   * it (or reported it already rated), so a failed request loses nothing. */
  async submit(): Promise<void> {
    if (!this.current || !this.canSubmit()) {
      throw new Error("all four criteria must be scored before submitting");
    }
    try {
      await submitRating(
        this.baseUrl, this.sessionId, this.rater,
        this.current.sample_id, this.draft,
      );
    } catch (err) {
      if (!(err instanceof ConflictError)) {
        this.status = "error";
        this.lastError = err instanceof Error ? err.message : String(err);
        throw err;
      }
      // already rated (another tab, double-click): skip forward
    }
    await this.load();
  }

  /** The only state worth keeping across reloads; deliberately excludes the
   * item and draft so nothing about approach identity can ever land in
   * browser storage. */
  persistable(): Record<string, string> {
    return { session_id: this.sessionId, rater_id: this.rater };
  }
}
