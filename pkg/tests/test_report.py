import os
import re
import xml.etree.ElementTree as ET
from pathlib import Path

import pytest

from sicgram.census import Checkpoint, Histogram, ShardInterrupted, ShardSpec, census, merge, run_shard, shard_specs
from sicgram.diagnostics import diagnostics
from sicgram.plot import histogram_svg, save_figure
from sicgram.report import ReportFormatError, export, from_csv, from_json, load_histogram, to_csv, to_json
from sicgram.words import parse_word

GOLDEN = Path(__file__).parent / "golden"
UPDATE = bool(os.environ.get("SICGRAM_UPDATE_GOLDEN"))


def check_golden(name: str, text: str) -> None:
    path = GOLDEN / name
    if UPDATE:
        path.write_text(text, encoding="ascii" if name.endswith(("csv", "json")) else "utf-8", newline="\n")
    assert path.read_bytes() == text.encode()


@pytest.fixture(scope="module")
def h6():
    return census(6)


class TestCsv:
    def test_length_one(self):
        h = Histogram(1, {0: 4})
        assert export(h, diagnostics(h), "csv") == b"sic,count\n0,4\n"

    def test_golden(self, h6):
        check_golden("census_n6.csv", to_csv(h6))

    def test_no_gap_filling(self):
        assert to_csv(Histogram(9, {7: 1, 2: 5})) == "sic,count\n2,5\n7,1\n"

    def test_round_trip(self, h6):
        assert from_csv(to_csv(h6), 6) == h6

    def test_merged_shards(self):
        whole = census(8)
        merged = Histogram(8)
        for spec in shard_specs(8, 2):
            merged = merge(merged, run_shard(spec))
        assert to_csv(merged) == to_csv(whole)

    @pytest.mark.parametrize(
        "text",
        ["", "k,count\n0,1\n", "sic,count\n0\n", "sic,count\nx,1\n", "sic,count\n-1,2\n", "sic,count\n1,2\n1,3\n"],
    )
    def test_malformed(self, text):
        with pytest.raises(ReportFormatError):
            from_csv(text)


class TestJson:
    def test_golden(self, h6):
        check_golden("report_n6.json", to_json(h6, diagnostics(h6)))

    def test_round_trip(self, h6):
        text = to_json(h6, diagnostics(h6))
        h, doc = from_json(text)
        assert h == h6
        assert to_json(h, diagnostics(h)) == text
        assert list(doc) == ["length", "order", "engine_version", "bins", "diagnostics"]
        assert list(doc["diagnostics"]) == [
            "total",
            "mean",
            "variance",
            "skewness",
            "excess_kurtosis",
            "fit_distance",
        ]

    def test_degenerate_diagnostics_are_null(self):
        h = Histogram(1, {0: 4})
        assert '"skewness": null' in to_json(h, diagnostics(h))

    @pytest.mark.parametrize("text", ["{", "{}", '{"bins": [[1]]}', '{"bins": 3}'])
    def test_malformed(self, text):
        with pytest.raises(ReportFormatError):
            from_json(text)

    def test_unknown_format(self, h6):
        with pytest.raises(ValueError):
            export(h6, diagnostics(h6), "xml")


class TestCheckpointFile:
    def test_golden(self, tmp_path):
        spec = ShardSpec(6, parse_word("a"))
        path = tmp_path / spec.checkpoint_name
        with pytest.raises(ShardInterrupted):
            run_shard(spec, checkpoint_path=path, checkpoint_every=8, stop_after=20)
        check_golden("shard-a.ckpt.json", path.read_text())

    def test_golden_loads(self):
        ckpt = Checkpoint.load(GOLDEN / "shard-a.ckpt.json")
        assert ckpt.shard == ShardSpec(6, parse_word("a"))
        assert ckpt.partial.total == 16 and not ckpt.complete


class TestLoad:
    def test_detects_format(self, tmp_path, h6):
        (tmp_path / "h.csv").write_text(to_csv(h6))
        (tmp_path / "h.json").write_text(to_json(h6, diagnostics(h6)))
        assert load_histogram(tmp_path / "h.csv").bins == h6.bins
        assert load_histogram(tmp_path / "h.json") == h6

    def test_binary(self, tmp_path):
        (tmp_path / "x").write_bytes(b"\xff\xfe")
        with pytest.raises(ReportFormatError):
            load_histogram(tmp_path / "x")


class TestSvg:
    def test_single_bar(self):
        svg = histogram_svg(Histogram(1, {0: 4}))
        assert svg.count("<rect") == 1
        ET.fromstring(svg.split("\n", 1)[1])

    def test_golden(self, h6):
        check_golden("census_n6.svg", histogram_svg(h6))

    def test_bars_per_bin(self):
        h = census(10)
        root = ET.fromstring(histogram_svg(h).split("\n", 1)[1])
        bars = [el for el in root.iter("{http://www.w3.org/2000/svg}rect")]
        assert len(bars) == len(h.bins)
        assert [int(el.get("data-k")) for el in bars] == sorted(h.bins)
        assert [int(el.get("data-count")) for el in bars] == [c for _, c in h.items()]
        heights = [float(el.get("height")) for el in bars]
        assert heights.index(max(heights)) == [c for _, c in h.items()].index(max(h.bins.values()))

    def test_title_and_axis_origin(self):
        svg = histogram_svg(Histogram(7, {2: 5, 3: 9}))
        assert "length 7" in svg
        assert re.search(r'<g class="xticks"[^>]*>\n<text [^>]*>0</text>', svg)

    def test_deterministic(self, h6):
        assert histogram_svg(h6) == histogram_svg(Histogram(6, dict(reversed(h6.items()))))

    def test_empty(self):
        with pytest.raises(ValueError):
            histogram_svg(Histogram(3))


def test_matplotlib_figure(tmp_path, h6):
    out = tmp_path / "fig.png"
    save_figure(h6, out)
    assert out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
