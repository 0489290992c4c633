/**
 * Client-side state for the explorer.
 *
 * Holds the control values (thresholds, interval width, strategies), the
 * selected target (dataset query or ad-hoc text), the last response, and a
 * comparison slot with the response before it for diff badges. Control
 * setters clamp sliders to [0, 1] and reject strategy names outside the
 * two fixed menus, so the state can never describe a request the service
 * would refuse.
 */

import type { AnswerRequest, AnswerResponse, SegmentIn } from "./types.js";

export const COUNT_STRATEGIES = [
  "most_confident",
  "most_frequent",
  "median",
  "weighted_median",
] as const;

export const INSTANCE_STRATEGIES = [
  "no_consolidation",
  "context_frequency",
  "summed_confidence",
  "type_compatibility",
] as const;

export type CountStrategyName = (typeof COUNT_STRATEGIES)[number];
export type InstanceStrategyName = (typeof INSTANCE_STRATEGIES)[number];

export interface ControlValues {
  thetaInference: number;
  thetaExplanation: number;
  alpha: number;
  countStrategy: CountStrategyName;
  instanceStrategy: InstanceStrategyName;
}

export type Mode = "dataset" | "adhoc";

export interface UiState {
  mode: Mode;
  datasetId: string | null;
  queryId: string | null;
  adhocQuery: string;
  adhocSegmentsText: string;
  controls: ControlValues;
  lastResponse: AnswerResponse | null;
  previousResponse: AnswerResponse | null;
  lastIssued: AnswerRequest | null;
}

export function defaultControls(): ControlValues {
  return {
    thetaInference: 0.5,
    thetaExplanation: 0.2,
    alpha: 0.3,
    countStrategy: "weighted_median",
    instanceStrategy: "type_compatibility",
  };
}

export function initialState(): UiState {
  return {
    mode: "dataset",
    datasetId: null,
    queryId: null,
    adhocQuery: "",
    adhocSegmentsText: "",
    controls: defaultControls(),
    lastResponse: null,
    previousResponse: null,
    lastIssued: null,
  };
}

export function clamp01(value: number): number {
  if (!Number.isFinite(value)) {
    return 0;
  }
  return Math.min(1, Math.max(0, value));
}

export function asCountStrategy(name: string): CountStrategyName {
  const found = COUNT_STRATEGIES.find((s) => s === name);
  if (found === undefined) {
    throw new Error(`unknown count strategy ${JSON.stringify(name)}`);
  }
  return found;
}

export function asInstanceStrategy(name: string): InstanceStrategyName {
  const found = INSTANCE_STRATEGIES.find((s) => s === name);
  if (found === undefined) {
    throw new Error(`unknown instance strategy ${JSON.stringify(name)}`);
  }
  return found;
}

/** Parse the ad-hoc segments textarea: one segment per non-blank line. */
export function parseSegments(text: string): SegmentIn[] {
  const lines = text
    .split("\n")
    .map((line) => line.trim())
    .filter((line) => line.length > 0);
  return lines.map((line, i) => ({ id: `s${i + 1}`, rank: i + 1, text: line }));
}

/** True when the current selection and text allow a request at all. */
export function canSubmit(state: UiState): boolean {
  if (state.mode === "dataset") {
    return state.queryId !== null;
  }
  return (
    state.adhocQuery.trim().length > 0 &&
    parseSegments(state.adhocSegmentsText).length > 0
  );
}

/** Build the request the current state describes. */
export function buildRequest(state: UiState): AnswerRequest {
  const overrides = {
    theta_inference: state.controls.thetaInference,
    theta_explanation: state.controls.thetaExplanation,
    alpha: state.controls.alpha,
    strategy_count: state.controls.countStrategy,
    strategy_instance: state.controls.instanceStrategy,
  };
  if (state.mode === "dataset") {
    if (state.queryId === null) {
      throw new Error("no dataset query selected");
    }
    return { dataset_query_id: state.queryId, overrides };
  }
  return {
    query: state.adhocQuery.trim(),
    segments: parseSegments(state.adhocSegmentsText),
    overrides,
  };
}

/** Deep-equal on request payloads; used to skip no-op re-queries. */
export function sameRequest(
  a: AnswerRequest | null,
  b: AnswerRequest | null
): boolean {
  if (a === null || b === null) {
    return a === b;
  }
  return JSON.stringify(a) === JSON.stringify(b);
}

/**
 * One in-flight request at a time. begin() cancels whatever was running
 * and hands back a ticket; a response is only applied while its ticket is
 * still the current one.
 */
export class RequestGate {
  private seq = 0;
  private controller: AbortController | null = null;

  begin(): { signal: AbortSignal; ticket: number } {
    this.controller?.abort();
    this.controller = new AbortController();
    this.seq += 1;
    return { signal: this.controller.signal, ticket: this.seq };
  }

  isCurrent(ticket: number): boolean {
    return ticket === this.seq;
  }

  cancel(): void {
    this.controller?.abort();
    this.controller = null;
    this.seq += 1;
  }
}
