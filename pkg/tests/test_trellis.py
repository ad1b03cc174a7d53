"""Grid construction, table loading, and the neighborhood traversal.

The brute-force rectangle oracle is the arbiter throughout: whatever the
classification trees emit must equal what the rectangles actually do.
"""

import numpy as np
import pytest

import checks
from labelgrid.datasets import clustered, uniform_random
from labelgrid.model import EngineOptions, LabelDims, Viewport
from labelgrid.oracle import oracle_graph
from labelgrid.trellis import (
    CODES,
    NeighborhoodTestTable,
    PredicateCounter,
    TableFormatError,
    classify_pair,
    default_table_path,
    emit_conflicts,
    grid_shape,
    populate,
    trellis_coords,
)
from labelgrid.trellis import test_neighborhood as traverse_window  # not a test

VP = Viewport(width_px=770, height_px=840)


# --- table loading ---------------------------------------------------------


def test_default_table_loads(table):
    assert table.version == "v1"
    assert len(table.trees) == 81
    assert set(table.configurations) == set(CODES)
    assert table.pairs_for("beta0") == ((0, 3),)
    assert table.pairs_for("alpha2") == ()
    assert len(table.pairs_for("delta3")) == 9


def test_checksum_mismatch_is_rejected():
    text = default_table_path().read_text(encoding="ascii")
    tampered = text.replace("beta0 = 0:3", "beta0 = 0:2")
    with pytest.raises(TableFormatError, match="checksum"):
        NeighborhoodTestTable.parse(tampered)


def test_unknown_version_is_rejected():
    text = default_table_path().read_text(encoding="ascii")
    with pytest.raises(TableFormatError):
        NeighborhoodTestTable.parse(text.replace("# format: v1", "# format: v9"))


def _with_body_edit(text, old, new):
    """Apply a body edit and recompute the checksum header so the edit
    reaches the parser instead of tripping the integrity check."""
    import hashlib
    import re

    lines = text.splitlines(keepends=True)
    start = next(i for i, ln in enumerate(lines) if ln.startswith("["))
    body = "".join(lines[start:]).replace(old, new, 1)
    digest = hashlib.sha256(body.encode("ascii")).hexdigest()
    head = re.sub(r"sha256:[0-9a-f]+", f"sha256:{digest}", "".join(lines[:start]))
    return head + body


def test_malformed_tree_is_rejected():
    text = default_table_path().read_text(encoding="ascii")
    broken = _with_body_edit(text, "0,0 = xa>xb ?", "0,0 = xa>xb ?? ")
    with pytest.raises(TableFormatError):
        NeighborhoodTestTable.parse(broken)


def test_wrong_pair_count_is_rejected():
    text = default_table_path().read_text(encoding="ascii")
    broken = _with_body_edit(text, "beta0 = 0:3", "beta0 = 0:3 1:3")
    with pytest.raises(TableFormatError):
        NeighborhoodTestTable.parse(broken)


def test_data_dir_override(tmp_path, monkeypatch):
    copy = tmp_path / "neighborhood_table.txt"
    copy.write_text(default_table_path().read_text(encoding="ascii"), encoding="ascii")
    monkeypatch.setenv("LABELGRID_DATA_DIR", str(tmp_path))
    assert default_table_path() == copy
    loaded = NeighborhoodTestTable.load()
    assert len(loaded.trees) == 81


# --- grid geometry ---------------------------------------------------------


def test_grid_shape_quarter_cells():
    cell_w, cell_h, n_cols, n_rows = grid_shape(
        Viewport(width_px=1500, height_px=1000), LabelDims(150.0, 20.0)
    )
    assert (cell_w, cell_h) == (75.0, 10.0)
    assert (n_cols, n_rows) == (20, 100)
    assert n_cols * n_rows == 2000


def test_grid_shape_rounds_up_partial_cells():
    _, _, n_cols, n_rows = grid_shape(
        Viewport(width_px=770, height_px=840), LabelDims(150.0, 12.0)
    )
    assert n_cols == 11  # 770 / 75 = 10.27
    assert n_rows == 140


def test_populate_orders_by_rank_and_projects():
    feats = checks.screen_features(
        [(10.0, 10.0), (700.0, 800.0), (400.0, 400.0)], VP, ranks=[3, 1, 2]
    )
    t = populate(feats, VP, LabelDims(100.0, 40.0))
    assert [f.rank for f in t.features] == [1, 2, 3]
    assert t.xs[0] == pytest.approx(700.0)
    assert t.ys[2] == pytest.approx(10.0)
    # sorted key array is a permutation of the cell keys, ascending
    keys = t.rows * t.n_cols + t.cols
    assert np.array_equal(np.sort(keys), t.key_sorted)
    assert np.array_equal(t.key_sorted, keys[t.sorted_to_pos])


def test_populate_drops_off_screen():
    feats = checks.screen_features([(10.0, 10.0), (770.0, 10.0), (-1.0, 10.0)], VP)
    t = populate(feats, VP, LabelDims(100.0, 40.0))
    assert len(t.features) == 1


def test_trellis_coords_floor_and_clamp():
    feats = checks.screen_features([(10.0, 10.0)], VP)
    t = populate(feats, VP, LabelDims(100.0, 40.0))  # cells 50 x 20
    assert trellis_coords((49.9, 19.9), t) == (0, 0)
    assert trellis_coords((50.0, 20.0), t) == (1, 1)
    assert trellis_coords((10_000.0, 10_000.0), t) == (t.n_cols - 1, t.n_rows - 1)


# --- pair classification ---------------------------------------------------


DIMS = LabelDims(100.0, 40.0)


def _offset_for(pa, pb, dims):
    cw, ch = dims.width_px / 2.0, dims.height_px / 2.0
    return (
        int(np.floor(pb[0] / cw)) - int(np.floor(pa[0] / cw)),
        int(np.floor(pb[1] / ch)) - int(np.floor(pa[1] / ch)),
    )


def test_classify_rejects_out_of_window_offsets(table):
    with pytest.raises(ValueError):
        classify_pair((0.0, 0.0), (500.0, 0.0), (5, 0), table, DIMS)


def test_classify_known_configurations(table):
    pa = (1000.0, 400.0)
    cases = [
        ((25.0, 10.0), "delta2"),  # near right, near below
        ((-25.0, -10.0), "delta1"),  # near left, near above
        ((150.0, 70.0), "beta2"),  # far right, far below
        ((25.0, -70.0), "gamma31"),  # near right, far above
        ((-150.0, 15.0), "gamma01"),  # far left, near below
    ]
    for (dx, dy), expected in cases:
        pb = (pa[0] + dx, pa[1] + dy)
        off = _offset_for(pa, pb, DIMS)
        assert classify_pair(pa, pb, off, table, DIMS) == expected, (dx, dy)


def test_odd_odd_offsets_need_no_predicates(table):
    pa = (1000.0, 400.0)
    pb = (975.0, 390.0)  # offset (-1, -1)
    counter = PredicateCounter()
    code = classify_pair(pa, pb, (-1, -1), table, DIMS, counter)
    assert code == "delta1"
    assert counter.count == 0


def test_escape_classifies_to_empty_alpha(table):
    pa = (1000.0, 419.0)
    pb = (1025.0, 334.0)  # |dy| = 85 > 2H = 80, four rows up
    off = _offset_for(pa, pb, DIMS)
    assert off[1] == -4
    code = classify_pair(pa, pb, off, table, DIMS)
    assert code.startswith("alpha")
    assert table.pairs_for(code) == ()


def test_classification_needs_at_most_two_predicates(table):
    rng = np.random.default_rng(42)
    for _ in range(300):
        pa = (rng.uniform(500, 1500), rng.uniform(300, 700))
        pb = (pa[0] + rng.uniform(-220, 220), pa[1] + rng.uniform(-88, 88))
        off = _offset_for(pa, pb, DIMS)
        if abs(off[0]) > 4 or abs(off[1]) > 4:
            continue
        counter = PredicateCounter()
        classify_pair(pa, pb, off, table, DIMS, counter)
        assert counter.count <= 2


def test_classified_pairs_match_rectangle_oracle(table):
    rng = np.random.default_rng(7)
    checked = 0
    for _ in range(600):
        pa = (rng.uniform(500, 1500), rng.uniform(300, 700))
        pb = (pa[0] + rng.uniform(-220, 220), pa[1] + rng.uniform(-88, 88))
        off = _offset_for(pa, pb, DIMS)
        if abs(off[0]) > 4 or abs(off[1]) > 4:
            continue
        code = classify_pair(pa, pb, off, table, DIMS)
        assert set(table.pairs_for(code)) == checks.brute_force_pair_set(pa, pb, DIMS)
        checked += 1
    assert checked > 400


# --- neighborhood traversal ------------------------------------------------


def _record_sink(log):
    def sink(a, ca, b, cb, rad):
        log.append((a, ca, b, cb, rad))

    return sink


def test_features_five_cells_apart_are_never_tested(table):
    vp = Viewport(width_px=600, height_px=200)
    feats = checks.screen_features([(25.0, 10.0), (275.0, 10.0)], vp)
    t = populate(feats, vp, DIMS)
    assert abs(int(t.cols[1]) - int(t.cols[0])) == 5
    log = []
    traverse_window(0, t, table, _record_sink(log), skip_higher=False)
    assert log == []
    assert emit_conflicts(t, table) == set()


def test_window_edge_conflicts_are_found(table):
    # four columns apart but within 2W: the far edge of the window matters
    vp = Viewport(width_px=600, height_px=200)
    pa = (45.0, 50.0)
    pb = (45.0 + 185.0, 55.0)  # dx = 185 < 2W = 200, dcol = 4
    feats = checks.screen_features([pa, pb], vp)
    t = populate(feats, vp, DIMS)
    assert int(t.cols[1]) - int(t.cols[0]) == 4
    log = []
    traverse_window(0, t, table, _record_sink(log), skip_higher=False)
    assert {(a, ca, b, cb) for a, ca, b, cb, rad in log} == {
        (0, 2, 1, 0),
        (0, 2, 1, 1),
        (0, 3, 1, 1),
    }
    assert all(rad == 4 for *_, rad in log)


def test_skip_higher_ignores_better_ranked_neighbors(table):
    vp = Viewport(width_px=600, height_px=200)
    feats = checks.screen_features([(100.0, 50.0), (110.0, 55.0)], vp)
    t = populate(feats, vp, DIMS)
    log = []
    traverse_window(1, t, table, _record_sink(log), skip_higher=True)
    assert log == []
    traverse_window(1, t, table, _record_sink(log), skip_higher=False)
    assert log != []


def test_radial_distance_is_capped_chebyshev(table):
    vp = Viewport(width_px=600, height_px=200)
    feats = checks.screen_features([(25.0, 50.0), (130.0, 55.0)], vp)  # two cols apart
    t = populate(feats, vp, DIMS)
    log = []
    traverse_window(0, t, table, _record_sink(log), skip_higher=False)
    assert log and all(rad == 2 for *_, rad in log)


def test_full_window_predicate_budget(table):
    # one occupant in every cell of the 9x9 window: at most 90 predicate
    # evaluations to classify the whole neighborhood
    dims = DIMS  # cells 50 x 20
    vp = Viewport(width_px=450, height_px=180)
    pts, ranks = [], []
    rank = 2
    for r in range(9):
        for c in range(9):
            pts.append((c * 50.0 + 25.0, r * 20.0 + 10.0))
            if (c, r) == (4, 4):
                ranks.append(1)  # the traversed feature, best rank
            else:
                ranks.append(rank)
                rank += 1
    feats = checks.screen_features(pts, vp, ranks=ranks)
    t = populate(feats, vp, dims)
    assert t.n_cells == 81
    counter = PredicateCounter()
    log = []
    traverse_window(0, t, table, _record_sink(log), skip_higher=True, counter=counter)
    assert counter.count <= 90
    assert len({b for _, _, b, _, _ in log}) <= 80


def test_emitted_conflicts_equal_oracle_uniform(table):
    feats = uniform_random(300, seed=7)
    dims = LabelDims(100.0, 14.0)
    t = populate(feats, VP, dims)
    assert emit_conflicts(t, table) == oracle_graph(feats, VP, dims).edges


def test_emitted_conflicts_equal_oracle_clustered(table):
    feats = clustered(300, seed=8)
    dims = LabelDims(60.0, 10.0)
    t = populate(feats, VP, dims)
    assert emit_conflicts(t, table) == oracle_graph(feats, VP, dims).edges


def test_emitted_conflicts_respect_effective_dims(table):
    feats = uniform_random(200, seed=9)
    opts = EngineOptions(allowed_overlap_pct=40.0)
    dims = LabelDims(100.0, 14.0)
    t = populate(feats, VP, dims, opts)
    assert emit_conflicts(t, table) == oracle_graph(feats, VP, dims, opts).edges
