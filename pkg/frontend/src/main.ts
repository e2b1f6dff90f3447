/** Page wiring: sentence form, current grid, and a history strip of previous
 * analyses for side-by-side comparison. At most one request is in flight;
 * submitting again aborts the previous one. */

import { analyzeSentence, fetchModelInfo } from "./api.js";
import { renderGrid, renderLegend } from "./render.js";
import type { ModelInfo } from "./types.js";

const HISTORY_LIMIT = 3;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

export async function boot(): Promise<void> {
  const form = el<HTMLFormElement>("analyze-form");
  const input = el<HTMLInputElement>("sentence-input");
  const errorBox = el<HTMLElement>("error-box");
  const current = el<HTMLElement>("current-analysis");
  const history = el<HTMLElement>("history-strip");
  const legendBox = el<HTMLElement>("legend-box");
  const modelLine = el<HTMLElement>("model-line");

  let info: ModelInfo;
  try {
    info = await fetchModelInfo();
  } catch (err) {
    errorBox.textContent = `cannot reach the analysis service: ${String(err)}`;
    return;
  }
  modelLine.textContent =
    `${info.num_layers}-layer LSTM, ${info.hidden_size} units, ` +
    `vocabulary ${info.vocab_size}, top-${info.k_dominance} color interpolation`;
  legendBox.appendChild(renderLegend(info));

  let inflight: AbortController | null = null;

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const sentence = input.value.trim();
    errorBox.textContent = "";
    if (!sentence) {
      errorBox.textContent = "type a sentence first";
      return;
    }
    inflight?.abort();
    const controller = new AbortController();
    inflight = controller;
    analyzeSentence(sentence, undefined, controller.signal)
      .then((payload) => {
        if (controller.signal.aborted) return;
        // move the previous grid into the history strip
        const previous = current.firstElementChild;
        if (previous) {
          const entry = document.createElement("div");
          entry.className = "history-entry";
          const label = document.createElement("div");
          label.className = "history-label";
          label.textContent = previous.getAttribute("data-sentence") ?? "";
          entry.appendChild(label);
          entry.appendChild(previous);
          history.prepend(entry);
          while (history.children.length > HISTORY_LIMIT) {
            history.lastElementChild?.remove();
          }
        }
        const wrap = document.createElement("div");
        wrap.setAttribute("data-sentence", payload.sentence);
        wrap.appendChild(renderGrid(payload, info));
        current.replaceChildren(wrap);
      })
      .catch((err) => {
        if (controller.signal.aborted) return;
        errorBox.textContent = `analysis failed: ${String(err instanceof Error ? err.message : err)}`;
      });
  });
}

if (typeof document !== "undefined" && document.getElementById("analyze-form")) {
  void boot();
}
