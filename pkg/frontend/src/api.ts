/** Thin typed client over the review routes. Every failure becomes an
 * ApiError carrying the server's problem-detail code, so callers can
 * distinguish a lost race (already-resolved) from a bad request. */

import type {
  ProblemDetail,
  QueueFilter,
  ResolutionResult,
  ReviewPage,
} from "./types.js";

export class ApiError extends Error {
  readonly status: number;
  readonly code: string;
  readonly detail: string;

  constructor(status: number, code: string, detail: string) {
    super(`${code}: ${detail}`);
    this.status = status;
    this.code = code;
    this.detail = detail;
  }
}

async function asApiError(response: Response): Promise<ApiError> {
  let code = "http-error";
  let detail = response.statusText;
  try {
    const body = (await response.json()) as Partial<ProblemDetail>;
    if (body.code) code = body.code;
    if (body.detail) detail = body.detail;
  } catch {
    // non-JSON error body: keep the defaults
  }
  return new ApiError(response.status, code, detail);
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    if (!response.ok) {
      throw await asApiError(response);
    }
    return (await response.json()) as T;
  }

  listReviews(filter: QueueFilter, page: number, pageSize: number): Promise<ReviewPage> {
    const params = new URLSearchParams({
      status: filter.status,
      page: String(page),
      page_size: String(pageSize),
    });
    if (filter.municipality) params.set("municipality", filter.municipality);
    if (filter.step !== undefined) params.set("step", String(filter.step));
    return this.request<ReviewPage>(`/reviews?${params.toString()}`);
  }

  resolve(
    reviewId: string,
    choice: string,
    idempotencyKey: string,
    reviewer = "",
  ): Promise<ResolutionResult> {
    return this.request<ResolutionResult>(`/reviews/${reviewId}/resolution`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ choice, idempotencyKey, reviewer }),
    });
  }

  /** Graph-pattern query passthrough; the console uses it to show what a
   * resolution actually wrote. */
  query(body: unknown): Promise<{ columns: string[]; rows: { value: string }[][] }> {
    return this.request(`/query`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }
}

export function newIdempotencyKey(): string {
  if (typeof crypto !== "undefined" && "randomUUID" in crypto) {
    return crypto.randomUUID();
  }
  return `key-${Date.now()}-${Math.floor(Math.random() * 1e9)}`;
}
