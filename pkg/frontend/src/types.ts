export const CRITERIA = ["simplicity", "accuracy", "completeness", "brevity"] as const;

export type Criterion = (typeof CRITERIA)[number];

export interface Progress {
  done: number;
  total: number;
}

/** What the server is allowed to tell a rater about an item. Anything
 * beyond these fields (approach, model, ...) is a blinding violation. */
export interface RaterItem {
  sample_id: string;
  source: string;
  adaptation: string;
}

export interface NextPayload {
  item: RaterItem | null;
  progress: Progress;
}

export type Scores = Partial<Record<Criterion, number>>;
