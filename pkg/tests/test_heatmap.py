"""SVG heatmap rendering."""

import numpy as np
import pytest

from cltm.errors import CltmError
from cltm.heatmap import HeatmapSpec, render_heatmap, value_color
from cltm.transfer import Cltm


def make_cltm(matrix, row_valid=None):
    matrix = np.array(matrix, dtype=float)
    n = matrix.shape[0]
    codes = [f"l{i}" for i in range(n)]
    if row_valid is None:
        row_valid = np.ones(n, dtype=bool)
    return Cltm(languages=codes, entries=matrix, row_valid=np.asarray(row_valid))


class TestColors:
    def test_zero_is_white(self):
        assert value_color(0.0, HeatmapSpec()) == "#FFFFFF"

    def test_clipping(self):
        spec = HeatmapSpec()
        assert value_color(2.0, spec) == value_color(1.5, spec)
        assert value_color(-99.0, spec) == value_color(-1.5, spec)

    def test_endpoints(self):
        spec = HeatmapSpec()
        assert value_color(-1.5, spec) == "#2166AC"
        assert value_color(1.5, spec) == "#B2182B"

    def test_sign_side(self):
        spec = HeatmapSpec()
        r_neg = int(value_color(-0.5, spec)[1:3], 16)
        r_pos = int(value_color(0.5, spec)[1:3], 16)
        assert r_neg < 255 and r_pos == 255 or r_neg < r_pos  # reddish on + side

    def test_custom_anchors(self):
        spec = HeatmapSpec(negative_color="#000000", positive_color="#FFFFFF")
        assert value_color(-1.5, spec) == "#000000"


class TestRender:
    def test_byte_determinism(self):
        cltm = make_cltm([[1.0, 0.4], [-0.3, 1.0]])
        assert render_heatmap(cltm) == render_heatmap(cltm)

    def test_structure(self):
        cltm = make_cltm([[1.0, 0.4], [-0.3, 1.0]])
        svg = render_heatmap(cltm).decode()
        assert svg.startswith('<?xml version="1.0"')
        assert svg.count("<rect") == 2 + 4  # pattern def + background + cells
        assert svg.count("<text") == 4  # row + column labels
        assert "l0" in svg and "l1" in svg

    def test_invalid_rows_hatched(self):
        matrix = np.array([[1.0, 0.4], [np.nan, np.nan]])
        cltm = make_cltm(matrix, row_valid=[True, False])
        svg = render_heatmap(cltm).decode()
        assert svg.count('fill="url(#invalid)"') == 2
        assert "invalid</title>" in svg

    def test_annotate(self):
        cltm = make_cltm([[1.0, 0.4], [-0.3, 1.0]])
        svg = render_heatmap(cltm, HeatmapSpec(annotate=True)).decode()
        assert "0.40" in svg and "-0.30" in svg

    def test_all_invalid_rejected(self):
        matrix = np.full((2, 2), np.nan)
        cltm = make_cltm(matrix, row_valid=[False, False])
        with pytest.raises(CltmError, match="no valid"):
            render_heatmap(cltm)

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            HeatmapSpec(scale_min=1.0, scale_max=-1.0)
        with pytest.raises(ValueError):
            HeatmapSpec(cell_size=0)
