"""Screen-space quarter-cell grid and the neighborhood conflict tables.

A cell is half a label wide and half a label tall, so any two features
whose candidate rectangles can strictly intersect are at most four cells
apart on either axis. Conflict detection for a feature therefore never
looks beyond the 9x9 block of cells around it, and each neighbor pair is
classified with at most two predicate evaluations using the decision
trees loaded from the packaged data file.
"""

from __future__ import annotations

import hashlib
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .model import EngineOptions, Feature, LabelDims, Viewport

# Configuration codes in canonical order; the numeric ids used by the
# selection kernel are indices into this tuple.
CODES: Tuple[str, ...] = (
    "alpha0", "alpha1", "alpha2", "alpha3",
    "beta0", "beta1", "beta2", "beta3",
    "gamma01", "gamma02", "gamma10", "gamma13",
    "gamma20", "gamma23", "gamma31", "gamma32",
    "delta0", "delta1", "delta2", "delta3",
)

PREDICATE_TOKENS = ("dx>1", "dx>2", "dy>1", "dy>2", "xa>xb", "ya>yb")

_SUPPORTED_VERSIONS = ("v1",)

Tree = Tuple  # ('leaf', code) | ('test', token, true_branch, false_branch)


class TableFormatError(ValueError):
    pass


@dataclass(frozen=True)
class ConflictConfiguration:
    code: str
    pairs: Tuple[Tuple[int, int], ...]


class PredicateCounter:
    """Counts atomic predicate evaluations during classification."""

    __slots__ = ("count",)

    def __init__(self) -> None:
        self.count = 0


def default_table_path() -> Path:
    override = os.environ.get("LABELGRID_DATA_DIR")
    if override:
        return Path(override) / "neighborhood_table.txt"
    return Path(__file__).resolve().parent / "data" / "neighborhood_table.txt"


def _parse_tree(tokens: List[str], pos: int, codes: set) -> Tuple[Tree, int]:
    tok = tokens[pos]
    if tok == "(":
        inner, pos = _parse_tree(tokens, pos + 1, codes)
        if pos >= len(tokens) or tokens[pos] != ")":
            raise TableFormatError("unbalanced parenthesis in tree expression")
        return inner, pos + 1
    if tok in PREDICATE_TOKENS:
        if pos + 1 >= len(tokens) or tokens[pos + 1] != "?":
            raise TableFormatError(f"predicate {tok!r} not followed by '?'")
        t_branch, pos = _parse_tree(tokens, pos + 2, codes)
        if pos >= len(tokens) or tokens[pos] != ":":
            raise TableFormatError(f"missing ':' after true branch of {tok!r}")
        f_branch, pos = _parse_tree(tokens, pos + 1, codes)
        return ("test", tok, t_branch, f_branch), pos
    if tok in codes:
        return ("leaf", tok), pos + 1
    raise TableFormatError(f"unknown token {tok!r} in tree expression")


def parse_tree_expression(text: str, codes: set) -> Tree:
    tokens = text.replace("(", " ( ").replace(")", " ) ").split()
    tree, pos = _parse_tree(tokens, 0, codes)
    if pos != len(tokens):
        raise TableFormatError(f"trailing tokens in tree expression: {tokens[pos:]}")
    return tree


_EXPECTED_PAIR_COUNTS = {"alpha": 0, "beta": 1, "gamma": 3, "delta": 9}


@dataclass
class NeighborhoodTestTable:
    """The 9x9 grid of classification trees plus the 20 pair lists."""

    version: str
    trees: Dict[Tuple[int, int], Tree]
    configurations: Dict[str, ConflictConfiguration]

    @classmethod
    def load(cls, path: Optional[Path] = None) -> "NeighborhoodTestTable":
        path = Path(path) if path is not None else default_table_path()
        text = path.read_text(encoding="ascii")
        return cls.parse(text, source=str(path))

    @classmethod
    def parse(cls, text: str, source: str = "<string>") -> "NeighborhoodTestTable":
        version: Optional[str] = None
        checksum: Optional[str] = None
        lines = text.splitlines()
        body_start = None
        for i, line in enumerate(lines):
            if line.startswith("# format:"):
                version = line.split(":", 1)[1].strip()
            elif line.startswith("# checksum: sha256:"):
                checksum = line.split("sha256:", 1)[1].strip()
            elif line.startswith("["):
                body_start = i
                break
        if version is None or body_start is None:
            raise TableFormatError(f"{source}: missing format header")
        if version not in _SUPPORTED_VERSIONS:
            raise TableFormatError(f"{source}: unsupported format {version!r}")
        body = "\n".join(lines[body_start:]) + "\n"
        if checksum is not None:
            actual = hashlib.sha256(body.encode("ascii")).hexdigest()
            if actual != checksum:
                raise TableFormatError(f"{source}: checksum mismatch (stale or edited table)")

        configurations: Dict[str, ConflictConfiguration] = {}
        trees: Dict[Tuple[int, int], Tree] = {}
        section = None
        for raw in lines[body_start:]:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("["):
                section = line.strip("[]")
                continue
            if "=" not in line:
                raise TableFormatError(f"{source}: malformed line {line!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if section == "configurations":
                pairs = []
                for item in value.split():
                    a, _, b = item.partition(":")
                    pairs.append((int(a), int(b)))
                configurations[key] = ConflictConfiguration(code=key, pairs=tuple(pairs))
            elif section == "cells":
                ox, _, oy = key.partition(",")
                trees[(int(ox), int(oy))] = parse_tree_expression(value, set(configurations))
            else:
                raise TableFormatError(f"{source}: line outside a known section: {line!r}")

        table = cls(version=version, trees=trees, configurations=configurations)
        table._validate(source)
        return table

    def _validate(self, source: str) -> None:
        if set(self.configurations) != set(CODES):
            raise TableFormatError(f"{source}: configuration set mismatch")
        for code, cfg in self.configurations.items():
            family = code.rstrip("0123456789")
            if len(cfg.pairs) != _EXPECTED_PAIR_COUNTS[family]:
                raise TableFormatError(
                    f"{source}: {code} has {len(cfg.pairs)} pairs, "
                    f"expected {_EXPECTED_PAIR_COUNTS[family]}"
                )
            if list(cfg.pairs) != sorted(cfg.pairs):
                raise TableFormatError(f"{source}: {code} pair list not sorted")
        expected_offsets = {(ox, oy) for ox in range(-4, 5) for oy in range(-4, 5)}
        if set(self.trees) != expected_offsets:
            raise TableFormatError(f"{source}: cell grid incomplete")

    def pairs_for(self, code: str) -> Tuple[Tuple[int, int], ...]:
        return self.configurations[code].pairs


_TABLE_CACHE: Dict[str, NeighborhoodTestTable] = {}


def load_default_table() -> NeighborhoodTestTable:
    key = str(default_table_path())
    table = _TABLE_CACHE.get(key)
    if table is None:
        table = NeighborhoodTestTable.load()
        _TABLE_CACHE[key] = table
    return table


def atomic_predicates(
    pa: Tuple[float, float], pb: Tuple[float, float], dims: LabelDims
) -> Dict[str, bool]:
    """The six predicate values for a feature pair (A traversing, B neighbor)."""
    ax, ay = pa
    bx, by = pb
    w, h = dims.width_px, dims.height_px
    return {
        "dx>1": abs(bx - ax) > w,
        "dx>2": abs(bx - ax) > 2.0 * w,
        "dy>1": abs(by - ay) > h,
        "dy>2": abs(by - ay) > 2.0 * h,
        "xa>xb": ax > bx,
        "ya>yb": ay > by,
    }


def classify_pair(
    pa: Tuple[float, float],
    pb: Tuple[float, float],
    offset: Tuple[int, int],
    table: NeighborhoodTestTable,
    dims: LabelDims,
    counter: Optional[PredicateCounter] = None,
) -> str:
    """Walk the offset's decision tree and return the configuration code.

    Predicates are evaluated lazily, at most two per pair.
    """
    ox, oy = offset
    if not (-4 <= ox <= 4 and -4 <= oy <= 4):
        raise ValueError(f"offset {offset} outside the 9x9 neighborhood")
    ax, ay = pa
    bx, by = pb
    w, h = dims.width_px, dims.height_px
    node = table.trees[(ox, oy)]
    while node[0] == "test":
        token = node[1]
        if counter is not None:
            counter.count += 1
        if token == "dx>1":
            outcome = abs(bx - ax) > w
        elif token == "dx>2":
            outcome = abs(bx - ax) > 2.0 * w
        elif token == "dy>1":
            outcome = abs(by - ay) > h
        elif token == "dy>2":
            outcome = abs(by - ay) > 2.0 * h
        elif token == "xa>xb":
            outcome = ax > bx
        else:  # ya>yb
            outcome = ay > by
        node = node[2] if outcome else node[3]
    return node[1]


@dataclass
class Trellis:
    """Populated grid over one viewport.

    Position indices run over visible features in descending priority
    order (position 0 = best rank); all arrays are position-aligned.
    The sorted cell-key arrays drive the selection kernel's window
    queries; the cells dict serves the scalar traversal and tests.
    """

    cell_w: float
    cell_h: float
    n_cols: int
    n_rows: int
    eff_dims: LabelDims
    features: List[Feature]
    xs: np.ndarray
    ys: np.ndarray
    cols: np.ndarray
    rows: np.ndarray
    key_sorted: np.ndarray
    sorted_to_pos: np.ndarray
    _cells: Optional[Dict[Tuple[int, int], List[int]]] = field(default=None, repr=False)

    @property
    def n_cells(self) -> int:
        return self.n_cols * self.n_rows

    @property
    def cells(self) -> Dict[Tuple[int, int], List[int]]:
        """Per-cell occupant lists (positions), built on first use."""
        if self._cells is None:
            cells: Dict[Tuple[int, int], List[int]] = {}
            for pos in range(len(self.features)):
                key = (int(self.cols[pos]), int(self.rows[pos]))
                cells.setdefault(key, []).append(pos)
            self._cells = cells
        return self._cells

    def occupants(self, col: int, row: int) -> List[int]:
        return self.cells.get((col, row), [])


def grid_shape(viewport: Viewport, eff: LabelDims) -> Tuple[float, float, int, int]:
    cell_w = eff.width_px / 2.0
    cell_h = eff.height_px / 2.0
    n_cols = int(math.ceil(viewport.width_px / cell_w))
    n_rows = int(math.ceil(viewport.height_px / cell_h))
    return cell_w, cell_h, n_cols, n_rows


def trellis_coords(p: Tuple[float, float], t: Trellis) -> Tuple[int, int]:
    """Cell coordinates of an on-screen point, clamped into the grid."""
    col = int(math.floor(p[0] / t.cell_w))
    row = int(math.floor(p[1] / t.cell_h))
    return (min(max(col, 0), t.n_cols - 1), min(max(row, 0), t.n_rows - 1))


def populate_arrays(
    features: List[Feature],
    xs: np.ndarray,
    ys: np.ndarray,
    viewport: Viewport,
    dims: LabelDims,
    options: Optional[EngineOptions] = None,
) -> Trellis:
    """Build the grid from position-aligned visible screen coordinates."""
    opts = options or EngineOptions()
    eff = opts.effective_dims(dims)
    cell_w, cell_h, n_cols, n_rows = grid_shape(viewport, eff)
    cols = np.floor(xs / cell_w).astype(np.int64)
    rows = np.floor(ys / cell_h).astype(np.int64)
    # Half-open visibility puts every point in range already; the clip
    # only guards float division landing exactly on the far boundary.
    np.clip(cols, 0, n_cols - 1, out=cols)
    np.clip(rows, 0, n_rows - 1, out=rows)
    key = rows * np.int64(n_cols) + cols
    order = np.argsort(key, kind="stable")
    return Trellis(
        cell_w=cell_w,
        cell_h=cell_h,
        n_cols=n_cols,
        n_rows=n_rows,
        eff_dims=eff,
        features=features,
        xs=xs,
        ys=ys,
        cols=cols,
        rows=rows,
        key_sorted=key[order],
        sorted_to_pos=order,
    )


def project_visible(
    features: Sequence[Feature], viewport: Viewport
) -> Tuple[List[Feature], np.ndarray, np.ndarray, List[Feature]]:
    """Rank-sort, project to screen, and split off-screen features.

    Returns (visible features desc priority, xs, ys, off_screen).
    """
    ordered = sorted(features, key=lambda f: f.rank)
    wx = np.fromiter((f.world_x for f in ordered), dtype=np.float64, count=len(ordered))
    wy = np.fromiter((f.world_y for f in ordered), dtype=np.float64, count=len(ordered))
    sx = (wx - viewport.pan_x) * (viewport.zoom * viewport.width_px)
    sy = (wy - viewport.pan_y) * (viewport.zoom * viewport.height_px)
    vis = (sx >= 0) & (sx < viewport.width_px) & (sy >= 0) & (sy < viewport.height_px)
    visible = [f for f, keep in zip(ordered, vis) if keep]
    off_screen = [f for f, keep in zip(ordered, vis) if not keep]
    return visible, sx[vis], sy[vis], off_screen


def populate(
    features: Sequence[Feature],
    viewport: Viewport,
    dims: LabelDims,
    options: Optional[EngineOptions] = None,
) -> Trellis:
    """Grid over the visible subset of a feature set (one linear pass)."""
    visible, xs, ys, _ = project_visible(features, viewport)
    return populate_arrays(visible, xs, ys, viewport, dims, options)


ConflictSink = Callable[[int, int, int, int, int], None]


def test_neighborhood(
    a_pos: int,
    t: Trellis,
    table: NeighborhoodTestTable,
    sink: ConflictSink,
    skip_higher: bool = True,
    counter: Optional[PredicateCounter] = None,
) -> None:
    """Classify a feature against every occupant of its 9x9 window.

    Emits sink(a_pos, a_candidate, b_pos, b_candidate, radial_distance)
    for each conflict pair. With skip_higher, neighbors with better rank
    (lower position) are ignored: their conflicts were already resolved
    when they were processed.
    """
    c0 = int(t.cols[a_pos])
    r0 = int(t.rows[a_pos])
    pa = (float(t.xs[a_pos]), float(t.ys[a_pos]))
    cells = t.cells
    for drow in range(-4, 5):
        row = r0 + drow
        if row < 0 or row >= t.n_rows:
            continue
        for dcol in range(-4, 5):
            col = c0 + dcol
            if col < 0 or col >= t.n_cols:
                continue
            occupants = cells.get((col, row))
            if not occupants:
                continue
            rad = min(4, max(abs(dcol), abs(drow)))
            for b_pos in occupants:
                if b_pos == a_pos:
                    continue
                if skip_higher and b_pos < a_pos:
                    continue
                pb = (float(t.xs[b_pos]), float(t.ys[b_pos]))
                code = classify_pair(pa, pb, (dcol, drow), table, t.eff_dims, counter)
                for ca, cb in table.pairs_for(code):
                    sink(a_pos, ca, b_pos, cb, rad)


def emit_conflicts(
    t: Trellis,
    table: NeighborhoodTestTable,
    skip_higher: bool = True,
) -> set:
    """Every conflict pair found by a full scalar traversal.

    Returns {(a_pos, a_cand, b_pos, b_cand)}; with skip_higher the pairs
    are oriented higher-priority feature first, which matches the
    orientation of the brute-force graph's edge set.
    """
    out = set()

    def sink(a: int, ca: int, b: int, cb: int, rad: int) -> None:
        out.add((a, ca, b, cb))

    for pos in range(len(t.features)):
        test_neighborhood(pos, t, table, sink, skip_higher=skip_higher)
    return out
