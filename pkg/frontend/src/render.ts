/**
 * DOM construction for the result panes.
 *
 * Everything here is presentation: the functions take a response (plus the
 * diff against the previous one) and write nodes. No count, category, or
 * score is computed in this layer; values land in the DOM exactly as the
 * service sent them, only trimmed of trailing zeros for display.
 */

import type { CountChange, Move } from "./diff.js";
import { cnpKey } from "./diff.js";
import type {
  AnswerResponse,
  CnpEntry,
  SegmentIn,
  SpanOut,
} from "./types.js";

export interface ResultView {
  response: AnswerResponse;
  moves: Map<string, Move>;
  change: CountChange | null;
  /** Ad-hoc segment texts for inline highlighting; null in dataset mode. */
  segments: SegmentIn[] | null;
  /** Extra note above the panes, e.g. for a partial provider failure. */
  notice: string | null;
}

/** "700" for 700.0, "0.625" as-is, "none" for a missing count. */
export function formatNumber(value: number | null): string {
  if (value === null) {
    return "none";
  }
  return String(value);
}

function el(
  tag: string,
  className: string | null = null,
  text: string | null = null
): HTMLElement {
  const node = document.createElement(tag);
  if (className !== null) {
    node.className = className;
  }
  if (text !== null) {
    node.textContent = text;
  }
  return node;
}

/**
 * Text with the given spans wrapped in <mark>. Only the first occurrence
 * of each span is wrapped; overlapping matches keep the earlier one.
 */
export function highlightSpans(
  text: string,
  spans: string[]
): DocumentFragment {
  const ranges: Array<[number, number]> = [];
  for (const span of spans) {
    if (span.length === 0) {
      continue;
    }
    const start = text.indexOf(span);
    if (start >= 0) {
      ranges.push([start, start + span.length]);
    }
  }
  ranges.sort((a, b) => a[0] - b[0]);

  const fragment = document.createDocumentFragment();
  let cursor = 0;
  for (const [start, end] of ranges) {
    if (start < cursor) {
      continue;
    }
    if (start > cursor) {
      fragment.appendChild(document.createTextNode(text.slice(cursor, start)));
    }
    const mark = document.createElement("mark");
    mark.textContent = text.slice(start, end);
    fragment.appendChild(mark);
    cursor = end;
  }
  if (cursor < text.length) {
    fragment.appendChild(document.createTextNode(text.slice(cursor)));
  }
  return fragment;
}

function cnpItem(entry: CnpEntry, moves: Map<string, Move>): HTMLElement {
  const item = el("li", "cnp-entry");
  item.dataset.key = cnpKey(entry);
  item.appendChild(el("span", "cnp-text", entry.cnp_text));
  item.appendChild(
    el("span", "cnp-value", ` (${formatNumber(entry.value)})`)
  );
  item.appendChild(el("sub", "badge conf", formatNumber(entry.confidence)));
  const move = moves.get(cnpKey(entry));
  if (move !== undefined) {
    const badge = el("span", "badge moved", "moved");
    badge.title = `was ${move.from}`;
    item.appendChild(badge);
  }
  return item;
}

function cnpPane(
  title: string,
  slug: string,
  entries: CnpEntry[],
  moves: Map<string, Move>
): HTMLElement {
  const pane = el("section", `pane ${slug}`);
  pane.appendChild(el("h3", null, title));
  if (entries.length === 0) {
    pane.appendChild(el("p", "empty", "none"));
    return pane;
  }
  const list = el("ul", "cnp-list");
  for (const entry of entries) {
    list.appendChild(cnpItem(entry, moves));
  }
  pane.appendChild(list);
  return pane;
}

function countLine(
  response: AnswerResponse,
  change: CountChange | null
): HTMLElement {
  const line = el("h2", "count-line", "Count: ");
  if (change !== null) {
    line.appendChild(el("del", "old-count", formatNumber(change.from)));
    line.appendChild(document.createTextNode(" → "));
  }
  line.appendChild(el("strong", "count-value", formatNumber(response.c_pred)));
  line.appendChild(
    el("span", "strategy-echo", ` via ${response.settings.count_strategy}`)
  );
  return line;
}

function queryMeta(response: AnswerResponse): HTMLElement {
  const meta = el("p", "query-meta");
  const parts: string[] = [];
  if (response.answer_type !== null) {
    parts.push(`type: ${response.answer_type}`);
  }
  if (response.entities.length > 0) {
    parts.push(`entities: ${response.entities.join(", ")}`);
  }
  if (response.relation !== null) {
    parts.push(`relation: ${response.relation}`);
  }
  meta.textContent = parts.join(" · ");
  return meta;
}

function instancesPane(response: AnswerResponse): HTMLElement {
  const pane = el("section", "instances");
  pane.appendChild(el("h3", null, "Instances"));
  const items = response.instances ?? [];
  if (items.length === 0) {
    pane.appendChild(el("p", "empty", "none found"));
    return pane;
  }
  const list = el("ol", "instance-list");
  for (const item of items) {
    const row = el("li", "instance");
    row.appendChild(el("span", "instance-name", item.instance));
    row.appendChild(el("span", "score", formatNumber(item.score)));
    list.appendChild(row);
  }
  pane.appendChild(list);
  return pane;
}

function segmentList(
  segments: SegmentIn[],
  response: AnswerResponse
): HTMLElement {
  const pane = el("section", "provenance");
  pane.appendChild(el("h3", null, "Segments"));
  const bySegment = new Map<string, string[]>();
  const allSpans = [
    ...response.provenance.inference_spans,
    ...response.provenance.explanation_spans,
  ];
  for (const span of allSpans) {
    const bucket = bySegment.get(span.segment_id) ?? [];
    bucket.push(span.span);
    bySegment.set(span.segment_id, bucket);
  }
  const list = el("ol", "segment-list");
  for (const segment of segments) {
    const row = el("li", "segment");
    row.dataset.segmentId = segment.id;
    row.appendChild(
      highlightSpans(segment.text, bySegment.get(segment.id) ?? [])
    );
    list.appendChild(row);
  }
  pane.appendChild(list);
  return pane;
}

function spanChips(title: string, slug: string, spans: SpanOut[]): HTMLElement {
  const block = el("div", `span-chips ${slug}`);
  block.appendChild(el("h4", null, title));
  if (spans.length === 0) {
    block.appendChild(el("p", "empty", "none"));
    return block;
  }
  const list = el("ul", "chips");
  for (const span of spans) {
    const chip = el("li", "chip");
    chip.appendChild(el("span", "chip-segment", span.segment_id));
    chip.appendChild(el("span", "chip-span", span.span));
    chip.appendChild(el("sub", "badge conf", formatNumber(span.confidence)));
    list.appendChild(chip);
  }
  block.appendChild(list);
  return block;
}

function provenanceChips(response: AnswerResponse): HTMLElement {
  const pane = el("section", "provenance");
  pane.appendChild(el("h3", null, "Supporting spans"));
  pane.appendChild(
    spanChips("Count spans", "inference", response.provenance.inference_spans)
  );
  pane.appendChild(
    spanChips(
      "Instance spans",
      "explanation",
      response.provenance.explanation_spans
    )
  );
  return pane;
}

export function renderResult(container: HTMLElement, view: ResultView): void {
  const { response } = view;
  container.replaceChildren();

  if (view.notice !== null) {
    container.appendChild(el("p", "notice", view.notice));
  }
  container.appendChild(countLine(response, view.change));
  container.appendChild(queryMeta(response));

  const cnpSection = el("section", "cnp");
  const cnp = response.cnp;
  if (cnp !== null) {
    const repPane = el("section", "pane representative");
    repPane.appendChild(el("h3", null, "Representative"));
    if (cnp.representative !== null) {
      const list = el("ul", "cnp-list");
      list.appendChild(cnpItem(cnp.representative, view.moves));
      repPane.appendChild(list);
    } else {
      repPane.appendChild(el("p", "empty", "none"));
    }
    cnpSection.appendChild(repPane);
    cnpSection.appendChild(
      cnpPane("Synonyms", "synonyms", cnp.synonyms, view.moves)
    );
    cnpSection.appendChild(
      cnpPane("Subgroups", "subgroups", cnp.subgroups, view.moves)
    );
    cnpSection.appendChild(
      cnpPane("Incomparables", "incomparables", cnp.incomparables, view.moves)
    );
  } else {
    cnpSection.appendChild(el("p", "empty", "no context available"));
  }
  container.appendChild(cnpSection);

  container.appendChild(instancesPane(response));
  if (view.segments !== null) {
    container.appendChild(segmentList(view.segments, response));
  } else {
    container.appendChild(provenanceChips(response));
  }

  if (response.diagnostics.length > 0) {
    const diag = el("section", "diagnostics");
    diag.appendChild(el("h3", null, "Diagnostics"));
    const list = el("ul", null);
    for (const entry of response.diagnostics) {
      list.appendChild(el("li", null, entry));
    }
    diag.appendChild(list);
    container.appendChild(diag);
  }
}

export function renderError(
  container: HTMLElement,
  message: string,
  onRetry: () => void
): void {
  container.replaceChildren();
  const banner = el("div", "error-banner");
  banner.setAttribute("role", "alert");
  banner.appendChild(el("span", "error-message", message));
  const retry = el("button", "retry", "Retry") as HTMLButtonElement;
  retry.type = "button";
  retry.addEventListener("click", onRetry);
  banner.appendChild(retry);
  container.appendChild(banner);
}

export function clearError(container: HTMLElement): void {
  container.replaceChildren();
}
