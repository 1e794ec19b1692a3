import json
import xml.etree.ElementTree as ET

import matplotlib
import numpy as np
import pytest

from src.datasets import GenSpec, generate
from src.embed import EmbedConfig, embed
from src.errors import InvalidArgumentError
from src.knn_core import Dataset, LatentOrdering, dsre
from src.report import (
    COLORMAP,
    REPORT_COLUMNS,
    compare,
    compare_many,
    latent_colors,
    plot_embedding,
    ramp_positions,
    write_report,
)

SVG_NS = "{http://www.w3.org/2000/svg}"


def point_elements(svg):
    """Marker elements inside the group holding the scatter."""
    root = ET.fromstring(svg.encode())
    groups = [g for g in root.iter(f"{SVG_NS}g") if g.get("id") == "patterns"]
    assert len(groups) == 1
    uses = list(groups[0].iter(f"{SVG_NS}use"))
    if uses:
        return uses
    return [p for p in groups[0].iter(f"{SVG_NS}path")]


class TestCompare:

    def test_rows_and_columns(self):
        data = Dataset(np.random.default_rng(0).normal(size=(20, 2)))
        report = compare(data, [1, 3], seed=None, label="gauss")
        frame = report.to_frame()
        assert list(frame.columns) == REPORT_COLUMNS
        assert list(frame["K"]) == [1, 3]
        row = report.rows[1]
        assert row.init == dsre(LatentOrdering.identity(20), data, 3)
        assert row.unn1 == embed(data, EmbedConfig(K=3)).final_dsre
        assert row.unn2 == embed(data, EmbedConfig(K=3, strategy="unn2")).final_dsre

    def test_identical_points(self):
        report = compare(Dataset([[1.0, 2.0]] * 6), [1, 2, 5])
        for row in report.rows:
            assert (row.init, row.unn1, row.unn2) == (0.0, 0.0, 0.0)

    def test_s2d_improves(self):
        data = generate(GenSpec(shape="s2d", n=200, seed=1))
        for row in compare(data, [2, 5, 10], seed=1, label="s2d").rows:
            assert row.init > row.unn1
            assert row.init > row.unn2

    def test_metadata(self):
        report = compare(Dataset([[0.0], [1.0], [3.0]]), [1], seed=4, label="tiny")
        assert report.metadata["datasets"] == {"tiny": {"seed": 4, "N": 3, "d": 1}}
        assert report.metadata["criterion"] == "pointwise"
        assert report.metadata["insertion_order"] == "dataset"

    @pytest.mark.parametrize("ks", [[], [0, 2]])
    def test_invalid_ks(self, ks):
        with pytest.raises(InvalidArgumentError):
            compare(Dataset([[0.0], [1.0]]), ks)

    def test_compare_many_keeps_order(self):
        a = Dataset(np.arange(6.0))
        b = Dataset(np.arange(6.0)[::-1])
        report = compare_many([("a", a, 1), ("b", b, 2)], [1, 2])
        assert [(r.dataset, r.K) for r in report.rows] == [("a", 1), ("a", 2), ("b", 1), ("b", 2)]
        assert set(report.metadata["datasets"]) == {"a", "b"}

    def test_write_report_is_reproducible(self, tmp_path):
        data = generate(GenSpec(shape="s2d", n=40, seed=3))
        first = write_report(compare(data, [2, 5], seed=3, label="s2d"), tmp_path / "a" / "r.csv")
        second = write_report(compare(data, [2, 5], seed=3, label="s2d"), tmp_path / "b" / "r.csv")
        for p, q in zip(first, second):
            assert p.read_bytes() == q.read_bytes()
        csv_path, meta_path = first
        assert csv_path.read_text().splitlines()[0] == "dataset,K,init,unn1,unn2"
        assert meta_path.name == "r.csv.meta.json"
        meta = json.loads(meta_path.read_text())
        assert meta["colormap"] == COLORMAP
        assert meta["ks"] == [2, 5]


class TestColors:

    def test_ramp_positions(self):
        np.testing.assert_array_equal(ramp_positions(LatentOrdering((2, 0, 1))), [0.5, 1.0, 0.0])

    def test_two_points_get_ramp_endpoints(self):
        cmap = matplotlib.colormaps[COLORMAP]
        colors = latent_colors(LatentOrdering((1, 0)))
        np.testing.assert_array_equal(colors[1], cmap(0.0))
        np.testing.assert_array_equal(colors[0], cmap(1.0))

    def test_reversal_reverses_ramp(self):
        ordering = LatentOrdering((3, 0, 4, 1, 2))
        np.testing.assert_allclose(ramp_positions(ordering.reversed()), 1 - ramp_positions(ordering))

    def test_distinct_slots_distinct_positions(self):
        pos = ramp_positions(LatentOrdering(tuple(np.random.default_rng(1).permutation(50))))
        assert len(set(pos)) == 50

    @pytest.mark.parametrize("n", [300, 1000])
    def test_more_slots_than_lookup_entries(self, n):
        ordering = LatentOrdering(tuple(np.random.default_rng(2).permutation(n)))
        colors = latent_colors(ordering)
        assert len({tuple(row) for row in colors}) == n
        cmap = matplotlib.colormaps[COLORMAP]
        first, last = ordering.sequence[0], ordering.sequence[-1]
        np.testing.assert_allclose(colors[first], cmap(0.0), atol=1e-12)
        np.testing.assert_allclose(colors[last], cmap(1.0), atol=1e-12)


class TestPlot:

    def test_one_point_per_pattern(self):
        data = generate(GenSpec(shape="s2d", n=30, seed=2))
        ordering = embed(data, EmbedConfig(K=3)).ordering
        svg = plot_embedding(data, ordering, title="s2d")
        assert svg.lstrip().startswith("<?xml")
        assert len(point_elements(svg)) == 30

    def test_three_dimensional(self):
        data = generate(GenSpec(shape="s3d", n=25, seed=2))
        svg = plot_embedding(data, dims=(0, 1, 2))
        assert len(point_elements(svg)) == 25

    def test_two_points(self):
        svg = plot_embedding(Dataset([[0.0, 0.0], [1.0, 1.0]]), LatentOrdering((0, 1)))
        assert len(point_elements(svg)) == 2

    def test_deterministic(self):
        data = generate(GenSpec(shape="s3d-hole", n=40, seed=5))
        ordering = embed(data, EmbedConfig(K=4)).ordering
        assert plot_embedding(data, ordering, dims=(0, 2)) == plot_embedding(data, ordering, dims=(0, 2))

    @pytest.mark.parametrize("dims", [(0, 2), (0,), (0, 1, 1, 0), (1, 1)])
    def test_invalid_dims(self, dims):
        with pytest.raises(InvalidArgumentError):
            plot_embedding(Dataset(np.zeros((3, 2))), dims=dims)

    def test_needs_two_dimensions(self):
        with pytest.raises(InvalidArgumentError):
            plot_embedding(Dataset(np.arange(4.0)))

    def test_incomplete_ordering(self):
        with pytest.raises(InvalidArgumentError):
            plot_embedding(Dataset(np.zeros((3, 2))), LatentOrdering((0, 1)))
