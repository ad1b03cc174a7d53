"""Command-line interface."""

import json
import xml.etree.ElementTree as ET

import pytest
from click.testing import CliRunner

from labelgrid.cli import main
from labelgrid.datasets import uniform_random
from labelgrid.io import parse_placements_json, write_feature_xml


@pytest.fixture(scope="module")
def point_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "points.xml"
    path.write_bytes(write_feature_xml(uniform_random(300, seed=21)))
    return str(path)


def _run(*args):
    return CliRunner().invoke(main, list(args), catch_exceptions=False)


def test_label_json_to_stdout(point_file):
    res = _run("label", point_file)
    assert res.exit_code == 0
    doc = json.loads(res.stdout)
    assert doc["metrics"]["n_input"] == 300
    assert doc["viewport"]["width"] == 770.0


def test_label_json_to_file(point_file, tmp_path):
    out = tmp_path / "placements.json"
    res = _run("label", point_file, "--out", str(out), "--width", "1500",
               "--height", "1000", "--label-w", "100", "--label-h", "10")
    assert res.exit_code == 0
    assert res.stdout == ""
    doc = parse_placements_json(out.read_bytes())
    assert doc["viewport"] == {
        "width": 1500.0, "height": 1000.0, "pan_x": 0.0, "pan_y": 0.0, "zoom": 1.0,
    }
    assert doc["label_dims"] == {"width": 100.0, "height": 10.0}


def test_label_svg_with_grid(point_file):
    res = _run("label", point_file, "--format", "svg", "--grid")
    assert res.exit_code == 0
    root = ET.fromstring(res.stdout)
    ids = {g.attrib.get("id") for g in root.iter("{http://www.w3.org/2000/svg}g")}
    assert {"grid", "points", "labels"} <= ids


def test_label_metrics_go_to_stderr(point_file):
    res = _run("label", point_file, "--metrics")
    assert res.exit_code == 0
    json.loads(res.stdout)  # stdout stays pure JSON
    assert "labeled" in res.stderr
    assert "traverse+select" in res.stderr


def test_label_threshold_option(point_file):
    res = _run("label", point_file, "--threshold", "25")
    doc = json.loads(res.stdout)
    assert doc["options"]["priority_threshold"] == 25
    assert doc["metrics"]["labels_placed"] <= 25
    reasons = {p.get("reason") for p in doc["placements"] if p["candidate_index"] is None}
    assert "below-threshold" in reasons


def test_label_missing_file_fails_cleanly():
    res = CliRunner().invoke(main, ["label", "/no/such/file.xml"])
    assert res.exit_code != 0
    assert "no such file" in res.stderr
    assert "fetch_benchmarks" in res.stderr


def test_label_bad_option_fails_cleanly(point_file):
    res = CliRunner().invoke(
        main, ["label", point_file, "--overlap-pct", "100"]
    )
    assert res.exit_code != 0
    assert "overlap" in res.stderr


def test_bench_tiny_grid():
    res = _run("bench", "uniform", "--sizes", "200", "--dims", "100x10,150x12",
               "--repeat", "1", "--seed", "5")
    assert res.exit_code == 0
    lines = res.stdout.strip().splitlines()
    assert lines[0].split() == ["n", "100x10", "150x12"]
    assert lines[1].split()[0] == "200"
    assert lines[1].count("s/") == 2


def test_bench_rejects_bad_sizes():
    res = CliRunner().invoke(main, ["bench", "uniform", "--sizes", "a,b"])
    assert res.exit_code != 0
    assert "bad sizes" in res.stderr


def test_zoom_ladder_levels_are_valid_and_monotone(point_file, tmp_path):
    res = _run("zoom-ladder", point_file, "--levels", "4", "--out-dir", str(tmp_path))
    assert res.exit_code == 0
    placed = []
    for level in range(4):
        doc = parse_placements_json((tmp_path / f"level_{level}.json").read_bytes())
        assert doc["label_dims"]["width"] == pytest.approx(150.0 * 1.5 ** -level)
        placed.append(doc["metrics"]["labels_placed"])
    # smaller labels at deeper zoom never lose placements
    assert placed == sorted(placed)


def test_zoom_ladder_validates_arguments(point_file, tmp_path):
    res = CliRunner().invoke(
        main, ["zoom-ladder", point_file, "--levels", "0", "--out-dir", str(tmp_path)]
    )
    assert res.exit_code != 0
    res = CliRunner().invoke(
        main, ["zoom-ladder", point_file, "--zoom-factor", "1.0", "--out-dir", str(tmp_path)]
    )
    assert res.exit_code != 0
