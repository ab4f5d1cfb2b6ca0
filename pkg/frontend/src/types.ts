/** Wire types, mirroring the server's JSON exactly. */

export interface Candidate {
  iri: string;
  road_iri: string;
  road_name: string;
  matched_field: string;
  level: "street-number" | "street";
  step: number;
  lat: number | null;
  lon: number | null;
}

export type CardStatus = "pending" | "resolved" | "rejected";

export interface ReviewCard {
  review_id: string;
  service_iri: string;
  street: string;
  number: string;
  municipality: string;
  candidates: Candidate[];
  discovered_at: string;
  status: CardStatus;
  chosen_iri: string | null;
  reviewer: string | null;
}

export interface ReviewPage {
  items: ReviewCard[];
  total: number;
  page: number;
  page_size: number;
}

export interface QueueFilter {
  status: CardStatus;
  municipality?: string;
  step?: number;
}

export interface ResolutionResult {
  review_id: string;
  status: CardStatus;
  replay: boolean;
  emitted: { subject: string; predicate: string; object: string; graph: string }[];
}

export interface ProblemDetail {
  type: string;
  title: string;
  status: number;
  detail: string;
  code: string;
}

export const REJECT = "reject";
