import { describe, expect, it } from "vitest";

import { formatNumber, highlightSpans } from "../src/render.js";

describe("formatNumber", () => {
  it("prints integral floats without a decimal point", () => {
    expect(formatNumber(700)).toBe("700");
    expect(formatNumber(8)).toBe("8");
  });

  it("keeps fractional values verbatim", () => {
    expect(formatNumber(0.625)).toBe("0.625");
    expect(formatNumber(123.25)).toBe("123.25");
  });

  it("names the missing case", () => {
    expect(formatNumber(null)).toBe("none");
  });
});

describe("highlightSpans", () => {
  const text = "Hawaii has eight main islands in the chain.";

  it("wraps the first occurrence in a mark", () => {
    const fragment = highlightSpans(text, ["eight main islands"]);
    const div = document.createElement("div");
    div.appendChild(fragment);
    expect(div.textContent).toBe(text);
    const marks = div.querySelectorAll("mark");
    expect(marks).toHaveLength(1);
    expect(marks[0]?.textContent).toBe("eight main islands");
  });

  it("keeps the earlier of two overlapping spans", () => {
    const fragment = highlightSpans(text, [
      "has eight main",
      "eight main islands",
    ]);
    const div = document.createElement("div");
    div.appendChild(fragment);
    expect(div.textContent).toBe(text);
    const marks = div.querySelectorAll("mark");
    expect(marks).toHaveLength(1);
    expect(marks[0]?.textContent).toBe("has eight main");
  });

  it("marks several disjoint spans in order", () => {
    const fragment = highlightSpans(text, ["chain", "Hawaii"]);
    const div = document.createElement("div");
    div.appendChild(fragment);
    expect(div.textContent).toBe(text);
    expect(
      Array.from(div.querySelectorAll("mark"), (m) => m.textContent)
    ).toEqual(["Hawaii", "chain"]);
  });

  it("ignores spans that do not occur, and empty spans", () => {
    const fragment = highlightSpans(text, ["volcano", ""]);
    const div = document.createElement("div");
    div.appendChild(fragment);
    expect(div.textContent).toBe(text);
    expect(div.querySelectorAll("mark")).toHaveLength(0);
  });

  it("never interprets segment text as markup", () => {
    const hostile = "a <b>bold</b> claim of 5 things";
    const fragment = highlightSpans(hostile, ["<b>bold</b>"]);
    const div = document.createElement("div");
    div.appendChild(fragment);
    expect(div.textContent).toBe(hostile);
    expect(div.querySelector("b")).toBeNull();
    expect(div.querySelector("mark")?.textContent).toBe("<b>bold</b>");
  });
});
