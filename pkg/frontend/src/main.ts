/**
 * Wiring between the controls, the API client, and the result renderer.
 *
 * One request is in flight at a time. Submitting answers the selected
 * query; afterwards every slider or strategy tweak re-queries with the new
 * overrides, debounced at 250 ms, cancelling whatever was still running.
 * A tweak that lands back on the issued values does not re-query.
 */

import { ApiClient, ApiError, isAbortError } from "./api.js";
import { countChange, movedEntries } from "./diff.js";
import { clearError, renderError, renderResult } from "./render.js";
import {
  asCountStrategy,
  asInstanceStrategy,
  buildRequest,
  canSubmit,
  clamp01,
  COUNT_STRATEGIES,
  initialState,
  INSTANCE_STRATEGIES,
  RequestGate,
  sameRequest,
} from "./state.js";
import type { Mode, UiState } from "./state.js";
import type { AnswerRequest, AnswerResponse } from "./types.js";

export const DEBOUNCE_MS = 250;

export interface BootOptions {
  api?: ApiClient;
  debounceMs?: number;
}

export interface AppHandle {
  destroy(): void;
}

type Trigger = "submit" | "whatif";

const SKELETON = `
  <header class="app-header">
    <h1>Count explorer</h1>
    <p class="tagline">Ask "how many", then tune the engine and watch the
    answer move.</p>
  </header>
  <form class="controls" novalidate>
    <div class="mode-tabs" role="tablist">
      <button type="button" class="tab" data-mode="dataset"
              aria-selected="true">Dataset</button>
      <button type="button" class="tab" data-mode="adhoc"
              aria-selected="false">Ad hoc</button>
    </div>
    <fieldset class="dataset-controls">
      <label>Dataset
        <select name="dataset"></select>
      </label>
      <label>Query
        <select name="query"></select>
      </label>
    </fieldset>
    <fieldset class="adhoc-controls" hidden>
      <label>Query
        <input type="text" name="adhoc-query" placeholder="how many ...">
      </label>
      <label>Segments, one per line
        <textarea name="adhoc-segments" rows="5"></textarea>
      </label>
    </fieldset>
    <fieldset class="tuning">
      <label>Count span threshold
        <input type="range" name="theta_inference"
               min="0" max="1" step="0.01" value="0.5">
        <output data-for="theta_inference">0.5</output>
      </label>
      <label>Instance span threshold
        <input type="range" name="theta_explanation"
               min="0" max="1" step="0.01" value="0.2">
        <output data-for="theta_explanation">0.2</output>
      </label>
      <label>Synonym interval width
        <input type="range" name="alpha"
               min="0" max="1" step="0.01" value="0.3">
        <output data-for="alpha">0.3</output>
      </label>
      <label>Count strategy
        <select name="strategy_count"></select>
      </label>
      <label>Instance strategy
        <select name="strategy_instance"></select>
      </label>
    </fieldset>
    <button type="submit" class="submit" disabled>Answer</button>
  </form>
  <div class="error-slot"></div>
  <main class="result-slot"></main>
`;

function fillSelect(
  select: HTMLSelectElement,
  values: readonly string[],
  selected: string
): void {
  select.replaceChildren();
  for (const value of values) {
    const option = document.createElement("option");
    option.value = value;
    option.textContent = value.replace(/_/g, " ");
    option.selected = value === selected;
    select.appendChild(option);
  }
}

export function boot(root: HTMLElement, options: BootOptions = {}): AppHandle {
  const api = options.api ?? new ApiClient();
  const debounceMs = options.debounceMs ?? DEBOUNCE_MS;
  const state: UiState = initialState();
  const gate = new RequestGate();
  let debounceTimer: ReturnType<typeof setTimeout> | null = null;

  root.innerHTML = SKELETON;
  const pick = <T extends Element>(selector: string): T => {
    const node = root.querySelector<T>(selector);
    if (node === null) {
      throw new Error(`missing element ${selector}`);
    }
    return node;
  };

  const form = pick<HTMLFormElement>("form.controls");
  const datasetSelect = pick<HTMLSelectElement>("select[name=dataset]");
  const querySelect = pick<HTMLSelectElement>("select[name=query]");
  const adhocQuery = pick<HTMLInputElement>("input[name=adhoc-query]");
  const adhocSegments = pick<HTMLTextAreaElement>(
    "textarea[name=adhoc-segments]"
  );
  const datasetFieldset = pick<HTMLFieldSetElement>(".dataset-controls");
  const adhocFieldset = pick<HTMLFieldSetElement>(".adhoc-controls");
  const submitButton = pick<HTMLButtonElement>("button.submit");
  const errorSlot = pick<HTMLElement>(".error-slot");
  const resultSlot = pick<HTMLElement>(".result-slot");
  const countStrategySelect = pick<HTMLSelectElement>(
    "select[name=strategy_count]"
  );
  const instanceStrategySelect = pick<HTMLSelectElement>(
    "select[name=strategy_instance]"
  );

  fillSelect(countStrategySelect, COUNT_STRATEGIES, state.controls.countStrategy);
  fillSelect(
    instanceStrategySelect,
    INSTANCE_STRATEGIES,
    state.controls.instanceStrategy
  );

  function refreshSubmit(): void {
    submitButton.disabled = !canSubmit(state);
  }

  function applyResponse(
    trigger: Trigger,
    request: AnswerRequest,
    response: AnswerResponse,
    notice: string | null
  ): void {
    state.previousResponse = trigger === "whatif" ? state.lastResponse : null;
    state.lastResponse = response;
    state.lastIssued = request;
    renderResult(resultSlot, {
      response,
      moves: movedEntries(state.previousResponse, response),
      change: countChange(state.previousResponse, response),
      segments: request.segments ?? null,
      notice,
    });
  }

  async function issue(trigger: Trigger, request?: AnswerRequest): Promise<void> {
    const req = request ?? buildRequest(state);
    const { signal, ticket } = gate.begin();
    root.setAttribute("aria-busy", "true");
    let response: AnswerResponse;
    try {
      response = await api.answer(req, signal);
    } catch (error) {
      if (!gate.isCurrent(ticket) || isAbortError(error)) {
        return; // superseded by a newer request
      }
      root.removeAttribute("aria-busy");
      if (
        error instanceof ApiError &&
        error.partial &&
        error.result !== null
      ) {
        applyResponse(trigger, req, error.result, `partial: ${error.message}`);
        renderError(errorSlot, error.message, () => void issue(trigger, req));
        return;
      }
      const message = error instanceof Error ? error.message : String(error);
      renderError(errorSlot, message, () => void issue(trigger, req));
      return;
    }
    if (!gate.isCurrent(ticket)) {
      return;
    }
    root.removeAttribute("aria-busy");
    clearError(errorSlot);
    applyResponse(trigger, req, response, null);
  }

  function scheduleWhatIf(): void {
    if (state.lastResponse === null) {
      return; // nothing answered yet, wait for an explicit submit
    }
    if (debounceTimer !== null) {
      clearTimeout(debounceTimer);
    }
    debounceTimer = setTimeout(() => {
      debounceTimer = null;
      const request = buildRequest(state);
      if (sameRequest(request, state.lastIssued)) {
        return; // controls ended up where they already were
      }
      void issue("whatif", request);
    }, debounceMs);
  }

  function setMode(mode: Mode): void {
    state.mode = mode;
    datasetFieldset.hidden = mode !== "dataset";
    adhocFieldset.hidden = mode !== "adhoc";
    for (const tab of root.querySelectorAll<HTMLButtonElement>(".tab")) {
      tab.setAttribute(
        "aria-selected",
        tab.dataset.mode === mode ? "true" : "false"
      );
    }
    refreshSubmit();
  }

  async function loadQueries(datasetId: string): Promise<void> {
    const queries = await api.queries(datasetId);
    querySelect.replaceChildren();
    const placeholder = document.createElement("option");
    placeholder.value = "";
    placeholder.textContent = "choose a query";
    placeholder.selected = true;
    querySelect.appendChild(placeholder);
    for (const query of queries) {
      const option = document.createElement("option");
      option.value = query.id;
      option.textContent = `${query.id}: ${query.query}`;
      querySelect.appendChild(option);
    }
    state.queryId = null;
    refreshSubmit();
  }

  async function loadListings(): Promise<void> {
    try {
      const datasets = await api.datasets();
      datasetSelect.replaceChildren();
      for (const dataset of datasets) {
        const option = document.createElement("option");
        option.value = dataset.id;
        option.textContent = `${dataset.id} (${dataset.queries})`;
        datasetSelect.appendChild(option);
      }
      const first = datasets[0];
      if (first !== undefined) {
        state.datasetId = first.id;
        datasetSelect.value = first.id;
        await loadQueries(first.id);
      }
    } catch (error) {
      const message = error instanceof Error ? error.message : String(error);
      renderError(errorSlot, message, () => void loadListings());
    }
  }

  for (const tab of root.querySelectorAll<HTMLButtonElement>(".tab")) {
    tab.addEventListener("click", () => {
      const mode = tab.dataset.mode;
      if (mode === "dataset" || mode === "adhoc") {
        setMode(mode);
      }
    });
  }

  datasetSelect.addEventListener("change", () => {
    state.datasetId = datasetSelect.value || null;
    if (state.datasetId !== null) {
      void loadQueries(state.datasetId).catch((error: unknown) => {
        const message = error instanceof Error ? error.message : String(error);
        renderError(errorSlot, message, () => {
          void loadListings();
        });
      });
    }
  });

  querySelect.addEventListener("change", () => {
    state.queryId = querySelect.value === "" ? null : querySelect.value;
    refreshSubmit();
  });

  adhocQuery.addEventListener("input", () => {
    state.adhocQuery = adhocQuery.value;
    refreshSubmit();
  });

  adhocSegments.addEventListener("input", () => {
    state.adhocSegmentsText = adhocSegments.value;
    refreshSubmit();
  });

  const sliders: Array<[HTMLInputElement, "thetaInference" | "thetaExplanation" | "alpha"]> = [
    [pick<HTMLInputElement>("input[name=theta_inference]"), "thetaInference"],
    [pick<HTMLInputElement>("input[name=theta_explanation]"), "thetaExplanation"],
    [pick<HTMLInputElement>("input[name=alpha]"), "alpha"],
  ];
  for (const [input, field] of sliders) {
    const readout = pick<HTMLOutputElement>(`output[data-for=${input.name}]`);
    input.addEventListener("input", () => {
      const value = clamp01(Number(input.value));
      input.value = String(value);
      state.controls[field] = value;
      readout.textContent = String(value);
      scheduleWhatIf();
    });
  }

  countStrategySelect.addEventListener("change", () => {
    try {
      state.controls.countStrategy = asCountStrategy(countStrategySelect.value);
    } catch {
      countStrategySelect.value = state.controls.countStrategy;
      return;
    }
    scheduleWhatIf();
  });

  instanceStrategySelect.addEventListener("change", () => {
    try {
      state.controls.instanceStrategy = asInstanceStrategy(
        instanceStrategySelect.value
      );
    } catch {
      instanceStrategySelect.value = state.controls.instanceStrategy;
      return;
    }
    scheduleWhatIf();
  });

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    if (canSubmit(state)) {
      void issue("submit");
    }
  });

  setMode("dataset");
  void loadListings();

  return {
    destroy(): void {
      if (debounceTimer !== null) {
        clearTimeout(debounceTimer);
        debounceTimer = null;
      }
      gate.cancel();
      root.replaceChildren();
    },
  };
}
