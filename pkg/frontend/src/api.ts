/**
 * Thin fetch wrapper around the service endpoints.
 *
 * Failures become ApiError with the server's detail string attached, and
 * 502s keep their partial result so callers can still render what the
 * inference stage produced. Abort rejections pass through untouched so the
 * request gate can tell a superseded call from a broken one.
 */

import type {
  AnswerRequest,
  AnswerResponse,
  DatasetInfo,
  ErrorBody,
  QueryInfo,
} from "./types.js";

// Structural stand-in for the Response bits we use; lets tests inject a
// scripted fetch without faking the whole Response class.
export interface HttpResponseLike {
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
}

export type FetchLike = (
  url: string,
  init?: RequestInit
) => Promise<HttpResponseLike>;

export class ApiError extends Error {
  readonly status: number;
  readonly partial: boolean;
  readonly result: AnswerResponse | null;

  constructor(
    message: string,
    status: number,
    partial = false,
    result: AnswerResponse | null = null
  ) {
    super(message);
    this.name = "ApiError";
    this.status = status;
    this.partial = partial;
    this.result = result;
  }
}

export function isAbortError(error: unknown): boolean {
  // DOMException is not instanceof Error in every realm, so match by name.
  return (
    typeof error === "object" &&
    error !== null &&
    (error as { name?: unknown }).name === "AbortError"
  );
}

export interface ApiClientOptions {
  baseUrl?: string;
  fetchImpl?: FetchLike;
}

export class ApiClient {
  private readonly baseUrl: string;
  private readonly fetchImpl: FetchLike;

  constructor(options: ApiClientOptions = {}) {
    this.baseUrl = (options.baseUrl ?? "").replace(/\/+$/, "");
    const impl = options.fetchImpl ?? (globalThis.fetch as FetchLike);
    if (!impl) {
      throw new Error("no fetch implementation available");
    }
    // bind so a bare globalThis.fetch keeps its receiver
    this.fetchImpl = (url, init) => impl.call(globalThis, url, init);
  }

  async answer(
    request: AnswerRequest,
    signal?: AbortSignal
  ): Promise<AnswerResponse> {
    const response = await this.request("/answer", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(request),
      signal,
    });
    return (await response.json()) as AnswerResponse;
  }

  async datasets(signal?: AbortSignal): Promise<DatasetInfo[]> {
    const response = await this.request("/datasets", { signal });
    return (await response.json()) as DatasetInfo[];
  }

  async queries(datasetId: string, signal?: AbortSignal): Promise<QueryInfo[]> {
    const path = `/datasets/${encodeURIComponent(datasetId)}/queries`;
    const response = await this.request(path, { signal });
    return (await response.json()) as QueryInfo[];
  }

  private async request(
    path: string,
    init: RequestInit
  ): Promise<HttpResponseLike> {
    let response: HttpResponseLike;
    try {
      response = await this.fetchImpl(this.baseUrl + path, init);
    } catch (error) {
      if (isAbortError(error)) {
        throw error;
      }
      const reason = error instanceof Error ? error.message : String(error);
      throw new ApiError(`service unreachable: ${reason}`, 0);
    }
    if (!response.ok) {
      throw await this.toApiError(response);
    }
    return response;
  }

  private async toApiError(response: HttpResponseLike): Promise<ApiError> {
    let body: ErrorBody = {};
    try {
      body = (await response.json()) as ErrorBody;
    } catch {
      // non-JSON error body; fall through to the status line
    }
    const detail = body.detail ?? `request failed with status ${response.status}`;
    return new ApiError(
      detail,
      response.status,
      body.partial === true,
      body.result ?? null
    );
  }
}
