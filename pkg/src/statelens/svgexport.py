"""Static SVG rendering of an analysis grid: rows are timesteps, columns are
state kinds in dependence order, with the model's own prediction on the far
right. Output is deterministic for identical inputs."""

from __future__ import annotations

from xml.sax.saxutils import escape, quoteattr

from .encoding import PseEncoding
from .workbench import AnalyzeResult

CELL_W = 66
CELL_H = 46
CELL_PAD = 3
BAR_H = 6
BAR_GAP = 2
SWATCH_H = 11
LEFT_MARGIN = 110
TOP_MARGIN = 96
OUTPUT_GAP = 14
FONT = "font-family=\"sans-serif\""


def _cell(x: int, y: int, enc: PseEncoding, k_bars: int, swatch_class: str) -> list[str]:
    parts = [f'<g transform="translate({x},{y})">']
    bar_max = CELL_W - 2 * CELL_PAD
    by = CELL_PAD
    for bar in enc.bars[:k_bars]:
        width = bar.probability * bar_max
        title = f"{bar.token} {bar.probability:.4f} ({bar.tag})"
        parts.append(
            f'<rect x="{CELL_PAD}" y="{by}" width="{width:.2f}" height="{BAR_H}" '
            f'fill={quoteattr(bar.color.hex())}><title>{escape(title)}</title></rect>'
        )
        by += BAR_H + BAR_GAP
    swatch_y = CELL_H - SWATCH_H - CELL_PAD
    title = f"{enc.kind.key} t={enc.timestep} dominance {enc.dominance:.4f}"
    parts.append(
        f'<rect class="{swatch_class}" data-kind={quoteattr(enc.kind.key)} '
        f'data-t="{enc.timestep}" x="{CELL_PAD}" y="{swatch_y}" '
        f'width="{CELL_W - 2 * CELL_PAD}" height="{SWATCH_H}" '
        f'fill={quoteattr(enc.swatch.hex())} stroke="#dddddd" stroke-width="0.5">'
        f"<title>{escape(title)}</title></rect>"
    )
    parts.append("</g>")
    return parts


def render_grid_svg(result: AnalyzeResult) -> str:
    """The same grid the browser UI shows, as a standalone SVG document."""
    rows = len(result.grid)
    kinds = [cell.kind for cell in result.grid[0]] if rows else []
    n_cols = len(kinds) + 1  # plus the model-prediction column
    width = LEFT_MARGIN + n_cols * CELL_W + OUTPUT_GAP + 10
    height = TOP_MARGIN + rows * CELL_H + 10

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
        f'<text x="{LEFT_MARGIN}" y="22" {FONT} font-size="13">'
        f"{escape(result.sentence)}</text>",
    ]
    for col, kind in enumerate(kinds):
        x = LEFT_MARGIN + col * CELL_W + CELL_W // 2
        label = kind.key if kind.name == "embedding" else f"{kind.name}[{kind.layer}]"
        out.append(
            f'<text x="{x}" y="{TOP_MARGIN - 8}" {FONT} font-size="10" '
            f'text-anchor="start" transform="rotate(-45 {x} {TOP_MARGIN - 8})">'
            f"{escape(label)}</text>"
        )
    y_x = LEFT_MARGIN + len(kinds) * CELL_W + OUTPUT_GAP + CELL_W // 2
    out.append(
        f'<text x="{y_x}" y="{TOP_MARGIN - 8}" {FONT} font-size="10" '
        f'text-anchor="start" transform="rotate(-45 {y_x} {TOP_MARGIN - 8})">y</text>'
    )
    for t in range(rows):
        y = TOP_MARGIN + t * CELL_H
        out.append(
            f'<text x="{LEFT_MARGIN - 8}" y="{y + CELL_H // 2 + 4}" {FONT} '
            f'font-size="11" text-anchor="end">{escape(result.tokens[t])}</text>'
        )
        for col, cell in enumerate(result.grid[t]):
            out.extend(_cell(LEFT_MARGIN + col * CELL_W, y, cell, result.k_bars, "swatch"))
        out.extend(
            _cell(
                LEFT_MARGIN + len(kinds) * CELL_W + OUTPUT_GAP,
                y,
                result.outputs[t],
                result.k_bars,
                "swatch-output",
            )
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
