/**
 * Wire types for the count answering service.
 *
 * These mirror the JSON the HTTP API accepts and returns. The UI never
 * derives counts, categories, or scores on its own; everything numeric in
 * the DOM comes straight out of an AnswerResponse.
 */

export interface SegmentIn {
  id: string;
  rank: number;
  text: string;
}

export interface Overrides {
  theta_inference?: number;
  theta_explanation?: number;
  alpha?: number;
  strategy_count?: string;
  strategy_instance?: string;
}

export interface AnswerRequest {
  query?: string;
  segments?: SegmentIn[];
  dataset_query_id?: string;
  overrides?: Overrides;
}

export interface SettingsEcho {
  theta_inference: number;
  theta_explanation: number;
  alpha: number;
  count_strategy: string;
  instance_strategy: string;
}

export interface CandidateOut {
  segment_id: string;
  span: string;
  confidence: number;
  value: number;
}

export interface CnpEntry {
  cnp_text: string;
  value: number;
  confidence: number;
  segment_id: string;
}

export interface CnpBuckets {
  representative: CnpEntry | null;
  synonyms: CnpEntry[];
  subgroups: CnpEntry[];
  incomparables: CnpEntry[];
}

export interface InstanceOut {
  instance: string;
  score: number;
}

export interface SpanOut {
  segment_id: string;
  span: string;
  confidence: number;
}

export interface ProvenanceOut {
  inference_spans: SpanOut[];
  explanation_spans: SpanOut[];
}

export interface AnswerResponse {
  id: string;
  query: string;
  answer_type: string | null;
  entities: string[];
  relation: string | null;
  context_terms: string[];
  settings: SettingsEcho;
  c_pred: number | null;
  candidates: CandidateOut[];
  cnp: CnpBuckets | null;
  instances: InstanceOut[] | null;
  provenance: ProvenanceOut;
  diagnostics: string[];
}

export interface DatasetInfo {
  id: string;
  queries: number;
}

export interface QueryInfo {
  id: string;
  query: string;
}

/** Error payload: {"detail": ...}, plus partial/result on 502s. */
export interface ErrorBody {
  detail?: string;
  partial?: boolean;
  result?: AnswerResponse | null;
}
