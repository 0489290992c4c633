/**
 * Scripted network layer for the app tests.
 *
 * The suite never talks to a real server: a fake fetch routes the three
 * endpoints to canned service responses generated by the engine itself
 * (scripts/generate_ui_fixtures.py), while recording every call so tests
 * can assert on request bodies, cancellation, and call counts.
 */

import { ApiClient } from "../src/api.js";
import type { FetchLike, HttpResponseLike } from "../src/api.js";
import { boot } from "../src/main.js";
import type { AppHandle } from "../src/main.js";
import type { AnswerRequest, SegmentIn } from "../src/types.js";
import adhocRaw from "./fixtures/answer-adhoc.json";
import alpha00 from "./fixtures/answer-languages-alpha00.json";
import alpha03 from "./fixtures/answer-languages-alpha03.json";
import datasets from "./fixtures/datasets.json";
import queries from "./fixtures/queries.json";

export { alpha00, alpha03 };

export interface RecordedCall {
  url: string;
  method: string;
  body: AnswerRequest | null;
  signal: AbortSignal | null;
}

export function jsonResponse(status: number, body: unknown): HttpResponseLike {
  return {
    ok: status >= 200 && status < 300,
    status,
    json: async () => clone(body),
  };
}

export function clone<T>(value: T): T {
  return JSON.parse(JSON.stringify(value)) as T;
}

export function abortError(): Error {
  return new DOMException("The operation was aborted.", "AbortError");
}

/** The adhoc fixture without its test-only _segments input block. */
export function adhocResponse(): Record<string, unknown> {
  const { _segments, ...response } = adhocRaw as Record<string, unknown>;
  void _segments;
  return response;
}

export function adhocSegments(): SegmentIn[] {
  return clone((adhocRaw as { _segments: SegmentIn[] })._segments);
}

export type AnswerResponder = (
  request: AnswerRequest,
  init: RequestInit
) => HttpResponseLike | Promise<HttpResponseLike>;

export function defaultAnswerResponder(
  request: AnswerRequest
): HttpResponseLike {
  if (request.segments !== undefined) {
    return jsonResponse(200, adhocResponse());
  }
  if (request.dataset_query_id === "q-ind-languages") {
    const body = request.overrides?.alpha === 0 ? alpha00 : alpha03;
    return jsonResponse(200, body);
  }
  return jsonResponse(404, {
    detail: `unknown dataset query id '${String(request.dataset_query_id)}'`,
  });
}

/** Answers from a one-shot queue, falling back to the default routing. */
export class AnswerScript {
  private readonly queue: AnswerResponder[] = [];

  enqueue(responder: AnswerResponder): void {
    this.queue.push(responder);
  }

  enqueueBody(status: number, body: unknown): void {
    this.enqueue(() => jsonResponse(status, body));
  }

  /** A request that only ever settles by rejecting on abort. */
  enqueueHanging(): void {
    this.enqueue(
      (_request, init) =>
        new Promise<HttpResponseLike>((_resolve, reject) => {
          init.signal?.addEventListener("abort", () => reject(abortError()));
        })
    );
  }

  readonly responder: AnswerResponder = (request, init) => {
    const next = this.queue.shift();
    return next ? next(request, init) : defaultAnswerResponder(request);
  };
}

export function scriptedFetch(
  calls: RecordedCall[],
  answer: AnswerResponder = defaultAnswerResponder
): FetchLike {
  return async (url, init) => {
    const method = init?.method ?? "GET";
    const signal = init?.signal ?? null;
    const body =
      typeof init?.body === "string"
        ? (JSON.parse(init.body) as AnswerRequest)
        : null;
    calls.push({ url, method, body, signal });
    if (signal?.aborted) {
      throw abortError();
    }
    if (method === "GET" && url.endsWith("/datasets")) {
      return jsonResponse(200, datasets);
    }
    if (method === "GET" && /\/datasets\/[^/]+\/queries$/.test(url)) {
      return jsonResponse(200, queries);
    }
    if (method === "POST" && url.endsWith("/answer")) {
      if (body === null) {
        throw new Error("POST /answer without a JSON body");
      }
      return answer(body, init ?? {});
    }
    return jsonResponse(404, { detail: `no route for ${method} ${url}` });
  };
}

export interface App {
  root: HTMLElement;
  calls: RecordedCall[];
  script: AnswerScript;
  handle: AppHandle;
}

export function mount(): App {
  document.body.innerHTML = '<div id="root"></div>';
  const root = document.getElementById("root") as HTMLElement;
  const calls: RecordedCall[] = [];
  const script = new AnswerScript();
  const api = new ApiClient({ fetchImpl: scriptedFetch(calls, script.responder) });
  const handle = boot(root, { api });
  return { root, calls, script, handle };
}

/** Settle the promise chains behind the scripted fetch (no timers involved). */
export async function flush(turns = 20): Promise<void> {
  for (let i = 0; i < turns; i += 1) {
    await Promise.resolve();
  }
}

export function posts(calls: RecordedCall[]): RecordedCall[] {
  return calls.filter((call) => call.method === "POST");
}

export function q<T extends Element>(root: ParentNode, selector: string): T {
  const node = root.querySelector<T>(selector);
  if (node === null) {
    throw new Error(`expected element ${selector}`);
  }
  return node;
}

export function texts(root: ParentNode, selector: string): string[] {
  return Array.from(root.querySelectorAll(selector), (node) =>
    (node.textContent ?? "").trim()
  );
}

export function chooseQuery(root: HTMLElement, queryId: string): void {
  const select = q<HTMLSelectElement>(root, "select[name=query]");
  select.value = queryId;
  select.dispatchEvent(new Event("change"));
}

export function submitForm(root: HTMLElement): void {
  const form = q<HTMLFormElement>(root, "form.controls");
  form.dispatchEvent(new Event("submit", { cancelable: true }));
}

export function setSlider(root: HTMLElement, name: string, value: string): void {
  const input = q<HTMLInputElement>(root, `input[name=${name}]`);
  input.value = value;
  input.dispatchEvent(new Event("input"));
}

export function setSelect(root: HTMLElement, name: string, value: string): void {
  const select = q<HTMLSelectElement>(root, `select[name=${name}]`);
  select.value = value;
  select.dispatchEvent(new Event("change"));
}

export function clickTab(root: HTMLElement, mode: string): void {
  const tab = q<HTMLButtonElement>(root, `.tab[data-mode=${mode}]`);
  tab.click();
}

export function typeText(
  root: HTMLElement,
  selector: string,
  value: string
): void {
  const field = q<HTMLInputElement | HTMLTextAreaElement>(root, selector);
  field.value = value;
  field.dispatchEvent(new Event("input"));
}

/** Boot, wait for listings, pick the bundled language-count query, submit. */
export async function mountAndAnswer(): Promise<App> {
  const app = mount();
  await flush();
  chooseQuery(app.root, "q-ind-languages");
  submitForm(app.root);
  await flush();
  return app;
}
