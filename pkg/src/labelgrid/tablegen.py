"""Generator for the neighborhood test table data file.

The 9x9 grid of decision trees and the 20 conflict-configuration pair
lists are not hand-written: this module derives every leaf from the
brute-force rectangle oracle by sampling geometries inside each cell
offset / predicate-outcome region and asserting the resulting conflict
pairs are constant across the region. Generation fails loudly if the
oracle ever produces a pair set that does not match one of the twenty
known configurations, or if two samples inside one region disagree.

Run as a module to (re)write the packaged data file:

    python -m labelgrid.tablegen [out_path]
"""

from __future__ import annotations

import hashlib
import sys
from itertools import product
from pathlib import Path
from typing import Dict, FrozenSet, List, Optional, Tuple

import numpy as np

from .model import LabelDims, candidate_rects
from .oracle import rects_intersect_strict
from .trellis import CODES

FORMAT_VERSION = "v1"

_DIAG = ((0, 0), (1, 1), (2, 2), (3, 3))

# Known pair lists, frozen after oracle derivation; the generator verifies
# every one of them against fresh oracle runs and refuses to emit anything
# that is not in this set. Pairs are (A candidate, B candidate), sorted.
FROZEN_PAIRS: Dict[str, Tuple[Tuple[int, int], ...]] = {
    "alpha0": (), "alpha1": (), "alpha2": (), "alpha3": (),
    "beta0": ((0, 3),),
    "beta1": ((1, 2),),
    "beta2": ((2, 1),),
    "beta3": ((3, 0),),
    "gamma01": ((0, 2), (0, 3), (1, 3)),
    "gamma02": ((0, 1), (0, 3), (2, 3)),
    "gamma10": ((0, 2), (1, 2), (1, 3)),
    "gamma13": ((1, 0), (1, 2), (3, 2)),
    "gamma20": ((0, 1), (2, 1), (2, 3)),
    "gamma23": ((2, 0), (2, 1), (3, 1)),
    "gamma31": ((1, 0), (3, 0), (3, 2)),
    "gamma32": ((2, 0), (3, 0), (3, 1)),
    "delta0": tuple(sorted(_DIAG + ((0, 1), (0, 2), (0, 3), (1, 3), (2, 3)))),
    "delta1": tuple(sorted(_DIAG + ((0, 2), (1, 0), (1, 2), (1, 3), (3, 2)))),
    "delta2": tuple(sorted(_DIAG + ((0, 1), (2, 0), (2, 1), (2, 3), (3, 1)))),
    "delta3": tuple(sorted(_DIAG + ((1, 0), (2, 0), (3, 0), (3, 1), (3, 2)))),
}

_PAIRSET_TO_CODE: Dict[FrozenSet[Tuple[int, int]], str] = {
    frozenset(pairs): code for code, pairs in FROZEN_PAIRS.items() if pairs
}

Tree = Tuple  # ('leaf', code) | ('test', token, true_branch, false_branch)


def _axis_token(offset_1d: int, axis: str) -> Optional[str]:
    """The predicate needed for one axis of a cell offset, if any.

    Odd offsets pin the geometry class outright; even ones leave exactly
    one boundary ambiguous within the cell, so one test resolves it.
    """
    if offset_1d % 2 != 0:
        return None
    if offset_1d == 0:
        return "xa>xb" if axis == "x" else "ya>yb"
    if abs(offset_1d) == 2:
        return "dx>1" if axis == "x" else "dy>1"
    return "dx>2" if axis == "x" else "dy>2"


def _delta_interval(offset_1d: int, outcome: Optional[bool]) -> Tuple[float, float]:
    """Open interval of B-A separation (in cell units) for an offset and
    the outcome of its axis test (None when the offset needs no test)."""
    lo, hi = float(offset_1d - 1), float(offset_1d + 1)
    if outcome is None:
        return lo, hi
    if offset_1d == 0:
        # sign test: 'xa>xb' true means B is strictly left, i.e. delta < 0
        return (lo, 0.0) if outcome else (0.0, hi)
    mid = float(np.sign(offset_1d) * (2 if abs(offset_1d) == 2 else 4))
    if outcome:  # |delta| beyond the boundary
        return (lo, mid) if offset_1d < 0 else (mid, hi)
    return (mid, hi) if offset_1d < 0 else (lo, mid)


def _sample_pairset(
    ox: int,
    oy: int,
    x_outcome: Optional[bool],
    y_outcome: Optional[bool],
    dims: LabelDims,
    rng: np.random.Generator,
    samples: int,
) -> FrozenSet[Tuple[int, int]]:
    """Oracle pair set for one offset/outcome region, verified constant."""
    cw, ch = dims.width_px / 2.0, dims.height_px / 2.0
    dx_lo, dx_hi = _delta_interval(ox, x_outcome)
    dy_lo, dy_hi = _delta_interval(oy, y_outcome)
    mx = (dx_hi - dx_lo) * 0.02
    my = (dy_hi - dy_lo) * 0.02

    result: Optional[FrozenSet[Tuple[int, int]]] = None
    kept = 0
    attempts = 0
    while kept < samples:
        attempts += 1
        if attempts > samples * 400:
            raise RuntimeError(f"offset ({ox},{oy}): cannot satisfy cell constraint")
        ax = rng.uniform(37.0, 91.0) * cw
        ay = rng.uniform(37.0, 91.0) * ch
        dx = rng.uniform(dx_lo + mx, dx_hi - mx) * cw
        dy = rng.uniform(dy_lo + my, dy_hi - my) * ch
        bx, by = ax + dx, ay + dy
        if int(np.floor(bx / cw)) - int(np.floor(ax / cw)) != ox:
            continue
        if int(np.floor(by / ch)) - int(np.floor(ay / ch)) != oy:
            continue
        kept += 1
        ra = candidate_rects((ax, ay), dims)
        rb = candidate_rects((bx, by), dims)
        pairs = frozenset(
            (i, j) for i in range(4) for j in range(4) if rects_intersect_strict(ra[i], rb[j])
        )
        if result is None:
            result = pairs
        elif pairs != result:
            raise RuntimeError(
                f"offset ({ox},{oy}) outcome ({x_outcome},{y_outcome}): "
                f"pair set not constant across region: {sorted(result)} vs {sorted(pairs)}"
            )
    assert result is not None
    return result


def _leaf_code(
    ox: int, oy: int, x_outcome: Optional[bool], y_outcome: Optional[bool],
    pairs: FrozenSet[Tuple[int, int]],
) -> str:
    if pairs:
        code = _PAIRSET_TO_CODE.get(pairs)
        if code is None:
            raise RuntimeError(
                f"offset ({ox},{oy}): oracle produced an unknown pair set {sorted(pairs)}"
            )
        return code
    # Empty set: an escape configuration. The y escape is checked first,
    # mirroring the tree order, and the variant is picked by direction.
    if abs(oy) == 4 and y_outcome:
        return "alpha1" if oy < 0 else "alpha2"
    if abs(ox) == 4 and x_outcome:
        return "alpha0" if ox < 0 else "alpha3"
    raise RuntimeError(f"offset ({ox},{oy}): empty pair set outside any escape branch")


def _test_order(ox: int, oy: int) -> Tuple[Optional[str], ...]:
    """Axis order for the (at most two) tests of a cell.

    Escape tests come first on their axis; otherwise x leads except in
    the ox == 0 column. Order never changes the leaves, only the tree
    shape, and is chosen to match the published outline.
    """
    xt, yt = _axis_token(ox, "x"), _axis_token(oy, "y")
    if xt is None and yt is None:
        return ()
    if xt is None:
        return ("y",)
    if yt is None:
        return ("x",)
    if abs(oy) == 4:
        return ("y", "x")
    if abs(ox) == 4:
        return ("x", "y")
    if ox == 0 and oy != 0:
        return ("y", "x")
    return ("x", "y")


def build_cell_tree(
    ox: int, oy: int, dims: LabelDims, rng: np.random.Generator, samples: int
) -> Tree:
    """Derive one cell's decision tree from the oracle, collapsing
    branches whose subtrees agree (escape leaves terminate early)."""
    order = _test_order(ox, oy)
    xt, yt = _axis_token(ox, "x"), _axis_token(oy, "y")

    def resolve(x_outcome: Optional[bool], y_outcome: Optional[bool]) -> str:
        pairs = _sample_pairset(ox, oy, x_outcome, y_outcome, dims, rng, samples)
        return _leaf_code(ox, oy, x_outcome, y_outcome, pairs)

    def build(depth: int, x_outcome: Optional[bool], y_outcome: Optional[bool]) -> Tree:
        if depth == len(order):
            return ("leaf", resolve(x_outcome, y_outcome))
        axis = order[depth]
        if axis == "x":
            t = build(depth + 1, True, y_outcome)
            f = build(depth + 1, False, y_outcome)
            token = xt
        else:
            t = build(depth + 1, x_outcome, True)
            f = build(depth + 1, x_outcome, False)
            token = yt
        if t == f:
            return t
        return ("test", token, t, f)

    return build(0, None, None)


def generate_table(
    samples: int = 48, seed: int = 2026, dims: Optional[LabelDims] = None
) -> Dict[Tuple[int, int], Tree]:
    """All 81 cell trees, keyed by offset. Deterministic regardless of
    seed: sampling only verifies, the leaves are forced by geometry."""
    dims = dims or LabelDims(144.0, 36.0)
    rng = np.random.default_rng(seed)
    table: Dict[Tuple[int, int], Tree] = {}
    for oy in range(-4, 5):
        for ox in range(-4, 5):
            table[(ox, oy)] = build_cell_tree(ox, oy, dims, rng, samples)
    _check_global_properties(table)
    return table


def _tree_leaves(tree: Tree) -> List[str]:
    if tree[0] == "leaf":
        return [tree[1]]
    return _tree_leaves(tree[2]) + _tree_leaves(tree[3])


def _tree_depth(tree: Tree) -> int:
    if tree[0] == "leaf":
        return 0
    return 1 + max(_tree_depth(tree[2]), _tree_depth(tree[3]))


def _mirror(tree: Tree) -> Tree:
    # Structural skeleton with leaves erased, for the symmetry check.
    if tree[0] == "leaf":
        return ("leaf",)
    return ("test", tree[1], _mirror(tree[2]), _mirror(tree[3]))


def _check_global_properties(table: Dict[Tuple[int, int], Tree]) -> None:
    seen = set()
    total_tests = 0
    for (ox, oy), tree in table.items():
        depth = _tree_depth(tree)
        if depth > 2:
            raise RuntimeError(f"offset ({ox},{oy}): tree depth {depth} > 2")
        expected = (ox % 2 == 0) + (oy % 2 == 0)
        if depth != expected:
            raise RuntimeError(f"offset ({ox},{oy}): depth {depth}, expected {expected}")
        total_tests += expected
        seen.update(_tree_leaves(tree))
        # Opposing cells share tree structure (mirrored quadrants).
        if _mirror(tree) != _mirror(table[(-ox, -oy)]):
            raise RuntimeError(f"offset ({ox},{oy}): asymmetric against ({-ox},{-oy})")
    if total_tests != 90:
        raise RuntimeError(f"expected 90 predicate slots across the grid, got {total_tests}")
    missing = set(CODES) - seen
    if missing:
        raise RuntimeError(f"configurations never reached: {sorted(missing)}")


def _render_tree(tree: Tree) -> str:
    if tree[0] == "leaf":
        return tree[1]
    t, f = tree[2], tree[3]
    ts = _render_tree(t) if t[0] == "leaf" else f"({_render_tree(t)})"
    fs = _render_tree(f) if f[0] == "leaf" else f"({_render_tree(f)})"
    return f"{tree[1]} ? {ts} : {fs}"


_HEADER_DOC = """\
#
# Conflict test table for the quarter-cell placement grid.
#
# Semantics:
#   A is the feature whose neighborhood is being traversed, B a neighbor.
#   dx = B.x - A.x, dy = B.y - A.y in screen pixels (y grows down).
#   W, H are the effective label width/height; a cell is W/2 x H/2.
#   offset = (B.col - A.col, B.row - A.row) with col = floor(x / cell_w),
#   row = floor(y / cell_h).
#   Predicates (all strict): dx>1 means |dx| > W; dx>2 means |dx| > 2W;
#   dy>1, dy>2 likewise with H; xa>xb means A.x > B.x; ya>yb means A.y > B.y.
#   Trees read: TEST ? true-branch : false-branch.
#
# Configurations: a pair a:b records that candidate a of A strictly
# intersects candidate b of B, for every geometry classified to that code.
# Candidate indices: 0 lower-left, 1 upper-left, 2 lower-right,
# 3 upper-right. Pair lists are sorted by (a, b).
#
# Generated from the brute-force rectangle oracle; do not edit by hand.
# Regenerate with: python -m labelgrid.tablegen
#"""


def render_table_text(table: Dict[Tuple[int, int], Tree]) -> str:
    lines: List[str] = []
    lines.append("[configurations]")
    for code in CODES:
        pairs = " ".join(f"{a}:{b}" for a, b in FROZEN_PAIRS[code])
        lines.append(f"{code} = {pairs}".rstrip())
    lines.append("")
    lines.append("[cells]")
    for oy in range(-4, 5):
        for ox in range(-4, 5):
            lines.append(f"{ox},{oy} = {_render_tree(table[(ox, oy)])}")
    body = "\n".join(lines) + "\n"
    digest = hashlib.sha256(body.encode("ascii")).hexdigest()
    head = (
        f"# labelgrid neighborhood test table\n"
        f"# format: {FORMAT_VERSION}\n"
        f"# checksum: sha256:{digest}\n"
        f"{_HEADER_DOC}\n"
    )
    return head + body


def default_output_path() -> Path:
    return Path(__file__).resolve().parent / "data" / "neighborhood_table.txt"


def main(argv: Optional[List[str]] = None) -> int:
    args = sys.argv[1:] if argv is None else argv
    out = Path(args[0]) if args else default_output_path()
    text = render_table_text(generate_table())
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text, encoding="ascii")
    print(f"wrote {out} ({len(text)} bytes)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
