"""Static SVG export of the analysis grid."""

import re
import xml.etree.ElementTree as ET

import pytest

from statelens.svgexport import render_grid_svg
from statelens.workbench import encoding_json

DEMO_SENTENCE = "we stand in solidarity , she emphasized ."


@pytest.fixture(scope="module")
def analysis(small_workbench):
    return small_workbench.analyze(DEMO_SENTENCE)


class TestRenderGridSvg:
    def test_swatch_count_is_rows_times_kinds(self, analysis):
        svg = render_grid_svg(analysis)
        swatches = re.findall(r'class="swatch"', svg)
        assert len(swatches) == 9 * 17
        outputs = re.findall(r'class="swatch-output"', svg)
        assert len(outputs) == 9

    def test_swatch_fills_equal_encodings(self, analysis):
        """Every swatch rect's fill is exactly the encoding's swatch hex."""
        svg = render_grid_svg(analysis)
        root = ET.fromstring(svg)
        ns = {"svg": "http://www.w3.org/2000/svg"}
        by_cell = {}
        for rect in root.iter("{http://www.w3.org/2000/svg}rect"):
            if rect.get("class") == "swatch":
                by_cell[(rect.get("data-kind"), int(rect.get("data-t")))] = rect.get("fill")
        assert len(by_cell) == 9 * 17
        for t, row in enumerate(analysis.grid):
            for cell in row:
                assert by_cell[(cell.kind.key, t)] == cell.swatch.hex()

    def test_deterministic_bytes(self, analysis):
        assert render_grid_svg(analysis) == render_grid_svg(analysis)

    def test_well_formed_xml(self, analysis):
        root = ET.fromstring(render_grid_svg(analysis))
        assert root.tag.endswith("svg")

    def test_bar_widths_proportional_to_probability(self, analysis):
        svg = render_grid_svg(analysis)
        root = ET.fromstring(svg)
        bar_rects = [
            r
            for r in root.iter("{http://www.w3.org/2000/svg}rect")
            if r.get("class") is None and r.get("height") == "6"
        ]
        assert bar_rects
        bar_max = 60.0  # CELL_W - 2 * CELL_PAD
        first_row_bars = [b.probability for b in analysis.grid[0][0].bars]
        widths = [float(r.get("width")) for r in bar_rects[: len(first_row_bars)]]
        for width, p in zip(widths, first_row_bars):
            assert width == pytest.approx(p * bar_max, abs=0.01)

    def test_row_labels_present(self, analysis):
        svg = render_grid_svg(analysis)
        assert ">we</text>" in svg
        assert "&lt;eos&gt;</text>" in svg
