/** DOM rendering. Everything here is rebuilt from controller state; no DOM
 * node carries state of its own. List and candidates are fully keyboard
 * operable: arrows move, space selects, enter opens the confirm dialog. */

import type { QueueController, QueueState } from "./controller.js";
import type { Candidate, ReviewCard } from "./types.js";
import { REJECT } from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  node.append(...children);
  return node;
}

function mapLink(candidate: Candidate): HTMLElement {
  if (candidate.lat == null || candidate.lon == null) {
    return el("span", { class: "coords muted" }, "no coordinates");
  }
  const text = `${candidate.lat.toFixed(5)}, ${candidate.lon.toFixed(5)}`;
  return el(
    "a",
    {
      class: "coords",
      target: "_blank",
      rel: "noreferrer",
      href: `https://www.openstreetmap.org/?mlat=${candidate.lat}&mlon=${candidate.lon}#map=18/${candidate.lat}/${candidate.lon}`,
    },
    text,
  );
}

function candidateRow(
  card: ReviewCard,
  candidate: Candidate,
  controller: QueueController,
): HTMLElement {
  const id = `${card.review_id}:${candidate.iri}`;
  const input = el("input", {
    type: "radio",
    id,
    name: `cand-${card.review_id}`,
    value: candidate.iri,
  }) as HTMLInputElement;
  // selection is never preset: the reviewer must click or key it
  input.checked = controller.selectionFor(card.review_id) === candidate.iri;
  input.addEventListener("change", () => controller.select(card.review_id, candidate.iri));
  const label = el(
    "label",
    { for: id, class: "candidate" },
    el("span", { class: "road" }, candidate.road_name || candidate.road_iri),
    el(
      "span",
      { class: "meta" },
      `${candidate.level} · ${candidate.matched_field} · found by step ${candidate.step}`,
    ),
    mapLink(candidate),
  );
  return el("div", { class: "candidate-row" }, input, label);
}

function cardView(card: ReviewCard, controller: QueueController): HTMLElement {
  const address = [card.street, card.number, card.municipality]
    .filter(Boolean)
    .join(", ");
  const body = el(
    "article",
    {
      class: `card status-${card.status}`,
      tabindex: "0",
      role: "listitem",
      "data-review-id": card.review_id,
      "aria-label": `review ${card.review_id}`,
    },
    el("header", {}, el("strong", {}, address || "(no address)"),
      el("span", { class: "badge" }, card.status)),
    el("p", { class: "muted" }, `${card.service_iri} · discovered ${card.discovered_at}`),
    el(
      "div",
      { class: "candidates", role: "radiogroup" },
      ...card.candidates.map((c) => candidateRow(card, c, controller)),
    ),
  );
  if (card.status === "pending") {
    const resolveBtn = el("button", { class: "resolve" }, "Resolve…") as HTMLButtonElement;
    resolveBtn.addEventListener("click", () => confirmAndSubmit(card, controller, false));
    const rejectBtn = el("button", { class: "reject" }, "Reject…") as HTMLButtonElement;
    rejectBtn.addEventListener("click", () => confirmAndSubmit(card, controller, true));
    body.append(el("footer", {}, resolveBtn, rejectBtn));
  }
  body.addEventListener("keydown", (event) => {
    if (event.key === "Enter" && card.status === "pending") {
      confirmAndSubmit(card, controller, false);
    }
  });
  return body;
}

function confirmAndSubmit(
  card: ReviewCard,
  controller: QueueController,
  isReject: boolean,
): void {
  const choice = isReject ? REJECT : controller.selectionFor(card.review_id);
  if (!choice) {
    flash(`select a candidate for ${card.review_id} first`);
    return;
  }
  const chosen = card.candidates.find((c) => c.iri === choice);
  const what = isReject
    ? "reject this service (no link is written)"
    : `link to ${chosen?.road_name || choice}`;
  openDialog(`Confirm: ${what}?`, () => {
    if (isReject) controller.select(card.review_id, REJECT);
    controller.submit(card.review_id).catch((err) => flash(String(err)));
  });
}

let dialogHost: HTMLDialogElement | null = null;

function openDialog(message: string, onConfirm: () => void): void {
  if (!dialogHost) {
    dialogHost = el("dialog", { class: "confirm" }) as HTMLDialogElement;
    document.body.append(dialogHost);
  }
  dialogHost.replaceChildren(
    el("p", {}, message),
    el("menu", {},
      button("Confirm", () => {
        dialogHost?.close();
        onConfirm();
      }),
      button("Cancel", () => dialogHost?.close()),
    ),
  );
  if (typeof dialogHost.showModal === "function") {
    dialogHost.showModal();
  } else {
    onConfirm(); // non-dialog environments (tests) have confirmed via intent
  }
}

function button(text: string, onClick: () => void): HTMLButtonElement {
  const node = el("button", {}, text) as HTMLButtonElement;
  node.addEventListener("click", onClick);
  return node;
}

function flash(message: string): void {
  const host = document.querySelector("#flash");
  if (host) {
    host.textContent = message;
    host.classList.add("visible");
    setTimeout(() => host.classList.remove("visible"), 4000);
  }
}

function filterBar(controller: QueueController, state: QueueState): HTMLElement {
  const status = el("select", { "aria-label": "status filter" }) as HTMLSelectElement;
  for (const value of ["pending", "resolved", "rejected"]) {
    const option = el("option", { value }, value) as HTMLOptionElement;
    option.selected = state.filter.status === value;
    status.append(option);
  }
  status.addEventListener("change", () =>
    controller.setFilter({ status: status.value as QueueState["filter"]["status"] }),
  );
  const municipality = el("input", {
    placeholder: "municipality",
    "aria-label": "municipality filter",
    value: state.filter.municipality ?? "",
  }) as HTMLInputElement;
  municipality.addEventListener("change", () =>
    controller.setFilter({ municipality: municipality.value || undefined }),
  );
  return el("div", { class: "filters" }, status, municipality);
}

function pager(controller: QueueController, state: QueueState): HTMLElement {
  const pages = controller.pageCount();
  const prev = button("‹ prev", () => void controller.goToPage(state.page - 1));
  const next = button("next ›", () => void controller.goToPage(state.page + 1));
  (prev as HTMLButtonElement).disabled = state.page <= 1;
  (next as HTMLButtonElement).disabled = state.page >= pages;
  return el(
    "nav",
    { class: "pager", "aria-label": "pages" },
    prev,
    el("span", {}, `page ${state.page} / ${pages} — ${state.total} item(s)`),
    next,
  );
}

export function render(root: HTMLElement, controller: QueueController, state: QueueState): void {
  const list = el("div", { class: "cards", role: "list" });
  if (state.loading) {
    list.append(el("p", { class: "muted" }, "loading…"));
  } else if (state.error) {
    list.append(el("p", { class: "error" }, state.error));
  } else if (state.cards.length === 0) {
    list.append(el("p", { class: "empty" }, "Queue is empty — nothing to review."));
  } else {
    for (const card of state.cards) list.append(cardView(card, controller));
  }
  root.replaceChildren(
    el("header", { class: "top" },
      el("h1", {}, "Review queue"),
      filterBar(controller, state)),
    el("div", { id: "flash", role: "status" }),
    list,
    pager(controller, state),
  );
  wireListKeyboard(root);
}

function wireListKeyboard(root: HTMLElement): void {
  const cards = Array.from(root.querySelectorAll<HTMLElement>(".card"));
  cards.forEach((card, index) => {
    card.addEventListener("keydown", (event) => {
      if (event.key === "ArrowDown" && cards[index + 1]) {
        cards[index + 1]?.focus();
        event.preventDefault();
      } else if (event.key === "ArrowUp" && cards[index - 1]) {
        cards[index - 1]?.focus();
        event.preventDefault();
      }
    });
  });
}
