/** Queue state machine. The server is the source of truth: cards render
 * exactly what the last response said, resolutions are pessimistic (a card
 * only leaves the pending list after a success response), and a second
 * submit of the same card reuses both the in-flight promise and the
 * idempotency key, so at most one resolution can ever be recorded. */

import { ApiClient, ApiError, newIdempotencyKey } from "./api.js";
import type { QueueFilter, ResolutionResult, ReviewCard } from "./types.js";
import { REJECT } from "./types.js";

export interface QueueState {
  filter: QueueFilter;
  page: number;
  pageSize: number;
  total: number;
  cards: ReviewCard[];
  loading: boolean;
  error: string | null;
  /** review id -> candidate iri (or "reject") chosen in the UI; never preset */
  selections: Map<string, string>;
}

export type Listener = (state: QueueState) => void;

export class QueueController {
  private state: QueueState;
  private listeners: Listener[] = [];
  private keys = new Map<string, string>(); // review id -> idempotency key
  private inflight = new Map<string, Promise<ResolutionResult>>();

  constructor(
    private readonly api: ApiClient,
    pageSize = 10,
  ) {
    this.state = {
      filter: { status: "pending" },
      page: 1,
      pageSize,
      total: 0,
      cards: [],
      loading: false,
      error: null,
      selections: new Map(),
    };
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this.state);
  }

  private patch(partial: Partial<QueueState>): void {
    this.state = { ...this.state, ...partial };
    this.emit();
  }

  get snapshot(): QueueState {
    return this.state;
  }

  pageCount(): number {
    return Math.max(1, Math.ceil(this.state.total / this.state.pageSize));
  }

  async load(): Promise<void> {
    this.patch({ loading: true, error: null });
    try {
      const page = await this.api.listReviews(
        this.state.filter,
        this.state.page,
        this.state.pageSize,
      );
      // server page rendered verbatim: no client-side re-sorting
      this.patch({
        cards: page.items,
        total: page.total,
        page: page.page,
        loading: false,
      });
    } catch (err) {
      this.patch({ loading: false, error: describe(err) });
    }
  }

  async setFilter(filter: Partial<QueueFilter>): Promise<void> {
    this.patch({ filter: { ...this.state.filter, ...filter }, page: 1 });
    await this.load();
  }

  async goToPage(page: number): Promise<void> {
    const clamped = Math.min(Math.max(1, page), this.pageCount());
    this.patch({ page: clamped });
    await this.load();
  }

  select(reviewId: string, choice: string): void {
    const selections = new Map(this.state.selections);
    selections.set(reviewId, choice);
    this.patch({ selections });
  }

  selectionFor(reviewId: string): string | undefined {
    return this.state.selections.get(reviewId);
  }

  /** Commit the current selection. Resolves to the server's answer; throws
   * when nothing is selected. Repeat calls while a submit is in flight get
   * the same promise (one network call, one resolution). */
  submit(reviewId: string, reviewer = ""): Promise<ResolutionResult> {
    const running = this.inflight.get(reviewId);
    if (running) return running;
    const choice = this.state.selections.get(reviewId);
    if (!choice) {
      return Promise.reject(new Error("select a candidate (or reject) first"));
    }
    let key = this.keys.get(reviewId);
    if (!key) {
      key = newIdempotencyKey();
      this.keys.set(reviewId, key); // kept across retries: replays dedupe
    }
    const attempt = this.api
      .resolve(reviewId, choice, key, reviewer)
      .then((result) => {
        this.inflight.delete(reviewId);
        this.applyResolution(result);
        return result;
      })
      .catch(async (err) => {
        this.inflight.delete(reviewId);
        if (err instanceof ApiError && err.code === "already-resolved") {
          await this.load(); // lost the race: show the server's state
        }
        throw err;
      });
    this.inflight.set(reviewId, attempt);
    return attempt;
  }

  reject(reviewId: string, reviewer = ""): Promise<ResolutionResult> {
    this.select(reviewId, REJECT);
    return this.submit(reviewId, reviewer);
  }

  private applyResolution(result: ResolutionResult): void {
    const selections = new Map(this.state.selections);
    selections.delete(result.review_id);
    let cards = this.state.cards.map((card) =>
      card.review_id === result.review_id ? { ...card, status: result.status } : card,
    );
    let total = this.state.total;
    if (this.state.filter.status === "pending") {
      const before = cards.length;
      cards = cards.filter((card) => card.review_id !== result.review_id);
      if (cards.length < before && !result.replay) total = Math.max(0, total - 1);
    }
    this.patch({ cards, selections, total });
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) return `${err.code}: ${err.detail}`;
  if (err instanceof Error) return err.message;
  return String(err);
}
