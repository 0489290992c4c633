/**
 * Response-to-response comparison for the what-if workflow.
 *
 * After a control tweak re-queries the service, entries that changed
 * category get a "moved" badge and a changed consolidated count renders as
 * old -> new. Identity is the (text, value) pair: the service may reorder
 * entries within a category, which is not a move.
 */

import type { AnswerResponse, CnpEntry } from "./types.js";

export type Category =
  | "representative"
  | "synonyms"
  | "subgroups"
  | "incomparables";

export interface Move {
  from: Category;
  to: Category;
}

export function cnpKey(entry: CnpEntry): string {
  return `${entry.cnp_text}${entry.value}`;
}

export function categoriesOf(
  response: AnswerResponse
): Map<string, Category> {
  const out = new Map<string, Category>();
  const cnp = response.cnp;
  if (cnp === null) {
    return out;
  }
  if (cnp.representative !== null) {
    out.set(cnpKey(cnp.representative), "representative");
  }
  for (const entry of cnp.synonyms) {
    out.set(cnpKey(entry), "synonyms");
  }
  for (const entry of cnp.subgroups) {
    out.set(cnpKey(entry), "subgroups");
  }
  for (const entry of cnp.incomparables) {
    out.set(cnpKey(entry), "incomparables");
  }
  return out;
}

/**
 * Entries of `next` whose category differs from where `prev` had them.
 * Entries `prev` never saw are not moves. Responses for different query
 * ids never diff.
 */
export function movedEntries(
  prev: AnswerResponse | null,
  next: AnswerResponse
): Map<string, Move> {
  const moves = new Map<string, Move>();
  if (prev === null || prev.id !== next.id) {
    return moves;
  }
  const before = categoriesOf(prev);
  const after = categoriesOf(next);
  for (const [key, to] of after) {
    const from = before.get(key);
    if (from !== undefined && from !== to) {
      moves.set(key, { from, to });
    }
  }
  return moves;
}

export interface CountChange {
  from: number | null;
  to: number | null;
}

/** Null when the consolidated count did not change (or there is no prior). */
export function countChange(
  prev: AnswerResponse | null,
  next: AnswerResponse
): CountChange | null {
  if (prev === null || prev.id !== next.id) {
    return null;
  }
  if (Object.is(prev.c_pred, next.c_pred)) {
    return null;
  }
  return { from: prev.c_pred, to: next.c_pred };
}
