/** DOM construction for the analysis grid. All probabilities and colors come
 * straight from the API payload; the client never recomputes encodings. */

import type { AnalyzeResponse, EncodingData, KindHint, ModelInfo } from "./types.js";

export const BAR_FULL_PX = 56;

export function barWidthPx(p: number, pMax: number): number {
  if (pMax <= 0) return 0;
  return Math.round((p / pMax) * BAR_FULL_PX);
}

/** First tag in the legend mapped to the given color (for text alternatives). */
export function tagForColor(info: ModelInfo, color: string): string {
  for (const entry of info.legend) {
    if (entry.color === color) return entry.tag;
  }
  return info.default_tag;
}

export function renderCell(
  encoding: EncodingData,
  kDisplay: number,
  info: ModelInfo,
): HTMLElement {
  const cell = document.createElement("div");
  cell.className = "cell";
  cell.dataset.kind = encoding.kind;
  cell.dataset.t = String(encoding.timestep);

  const bars = document.createElement("div");
  bars.className = "bars";
  const shown = encoding.bars.slice(0, kDisplay);
  const pMax = shown.length ? shown[0].p : 0;
  for (const bar of shown) {
    const el = document.createElement("div");
    el.className = "bar";
    el.style.width = `${barWidthPx(bar.p, pMax)}px`;
    el.style.backgroundColor = bar.color;
    el.title = `${bar.token}  p=${bar.p.toPrecision(4)}  (${bar.tag})`;
    bars.appendChild(el);
  }
  cell.appendChild(bars);

  const swatch = document.createElement("div");
  swatch.className = "swatch";
  swatch.style.backgroundColor = encoding.swatch;
  const dominantTag = tagForColor(info, encoding.dominant_color);
  const pct = (encoding.dominance * 100).toFixed(1);
  swatch.setAttribute("role", "img");
  swatch.setAttribute("aria-label", `${dominantTag} ${pct}%`);
  swatch.title = `${dominantTag} ${pct}%`;
  cell.appendChild(swatch);
  return cell;
}

function kindHeader(hint: KindHint): HTMLElement {
  const th = document.createElement("div");
  th.className = "kind-header";
  const name = document.createElement("span");
  name.className = "kind-name";
  name.textContent = hint.layer ? `${hint.name}[${hint.layer}]` : hint.key;
  name.title = hint.label;
  th.appendChild(name);
  if (hint.test_ppl !== null) {
    const badge = document.createElement("span");
    badge.className = "ppl-badge";
    badge.textContent = hint.test_ppl.toFixed(1);
    badge.title = `probe test perplexity ${hint.test_ppl.toPrecision(6)}`;
    th.appendChild(badge);
  }
  return th;
}

/** The full grid: header row of kinds, then one row per timestep with the
 * input token on the left and the model's own prediction on the right. */
export function renderGrid(payload: AnalyzeResponse, info: ModelInfo): HTMLElement {
  const hints = [...payload.layout_hints].sort((a, b) => a.column - b.column);
  const container = document.createElement("div");
  container.className = "grid";
  container.style.setProperty("--columns", String(hints.length));

  const corner = document.createElement("div");
  corner.className = "kind-header token-header";
  corner.textContent = "input";
  container.appendChild(corner);
  for (const hint of hints) {
    container.appendChild(kindHeader(hint));
  }

  payload.grid.forEach((row, t) => {
    const tokenCell = document.createElement("div");
    tokenCell.className = "token";
    tokenCell.textContent = payload.tokens[t];
    container.appendChild(tokenCell);
    const byKind = new Map(row.map((cell) => [cell.kind, cell]));
    for (const hint of hints) {
      if (hint.key === "y") {
        container.appendChild(renderCell(payload.outputs[t], payload.k_bars, info));
      } else {
        const cell = byKind.get(hint.key);
        if (!cell) throw new Error(`response row ${t} is missing kind ${hint.key}`);
        container.appendChild(renderCell(cell, payload.k_bars, info));
      }
    }
  });
  return container;
}

export function renderLegend(info: ModelInfo): HTMLElement {
  const legend = document.createElement("div");
  legend.className = "legend";
  for (const entry of info.legend) {
    const item = document.createElement("span");
    item.className = "legend-item";
    const chip = document.createElement("span");
    chip.className = "legend-chip";
    chip.style.backgroundColor = entry.color;
    item.appendChild(chip);
    item.appendChild(document.createTextNode(entry.tag));
    legend.appendChild(item);
  }
  return legend;
}
