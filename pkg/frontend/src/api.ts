import { CRITERIA, NextPayload, RaterItem, Scores } from "./types";

export class BlindingViolationError extends Error {
  constructor(field: string) {
    super(`refusing to render: payload carries unexpected field "${field}"`);
  }
}

export class ConflictError extends Error {}

export class ApiError extends Error {
  constructor(public status: number, detail: string) {
    super(detail);
  }
}

const ALLOWED_ITEM_FIELDS = new Set(["sample_id", "source", "adaptation"]);

/** Defensive mirror of the server-side blinding contract: the client never
 * displays an item that names its approach or model, even if a future
 * server regression leaks one. */
export function assertBlinded(item: Record<string, unknown>): RaterItem {
  for (const field of Object.keys(item)) {
    if (!ALLOWED_ITEM_FIELDS.has(field)) {
      throw new BlindingViolationError(field);
    }
  }
  return item as unknown as RaterItem;
}

async function detail(response: Response): Promise<string> {
  const body = await response.json().catch(() => ({}));
  return typeof body.detail === "string" ? body.detail : `HTTP ${response.status}`;
}

export async function fetchNext(
  baseUrl: string,
  sessionId: string,
  rater: string,
): Promise<NextPayload> {
  const url = `${baseUrl}/session/${encodeURIComponent(sessionId)}/next?rater=${encodeURIComponent(rater)}`;
  const response = await fetch(url);
  if (!response.ok) {
    throw new ApiError(response.status, await detail(response));
  }
  const payload = await response.json();
  return {
    item: payload.item === null ? null : assertBlinded(payload.item),
    progress: payload.progress,
  };
}

export async function submitRating(
  baseUrl: string,
  sessionId: string,
  rater: string,
  sampleId: string,
  scores: Scores,
): Promise<void> {
  const body: Record<string, unknown> = { sample_id: sampleId, rater_id: rater };
  for (const criterion of CRITERIA) {
    body[criterion] = scores[criterion];
  }
  const response = await fetch(
    `${baseUrl}/session/${encodeURIComponent(sessionId)}/rating`,
    {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    },
  );
  if (response.status === 409) {
    throw new ConflictError(await detail(response));
  }
  if (!response.ok) {
    throw new ApiError(response.status, await detail(response));
  }
}
