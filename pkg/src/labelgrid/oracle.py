"""Brute-force ground truth for conflict detection and selection.

Everything here is deliberately naive: the conflict graph is built by
testing all 16 candidate-rectangle pairs of every feature pair, and the
reference selector runs the greedy loop in plain Python directly on that
graph. The production grid traversal and selection kernel must reproduce
these results exactly; tests compare the two routes on random inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np

from .cost import boost_siblings, candidate_expense
from .model import (
    DESELECTED,
    LIVE,
    OCCLUDED,
    SELECTED,
    EngineOptions,
    Feature,
    LabelDims,
    Rect,
    Viewport,
    is_on_screen,
    world_to_screen,
)

Edge = Tuple[int, int, int, int]  # (i, ci, j, cj) with i < j in priority order


def rects_intersect_strict(ra: Rect, rb: Rect) -> bool:
    """Strict interior overlap; rects sharing only an edge do not conflict."""
    return (
        ra.left < rb.right
        and ra.right > rb.left
        and ra.top < rb.bottom
        and ra.bottom > rb.top
    )


@dataclass
class OracleGraph:
    """Exact conflict graph over candidate rectangles.

    Features are indexed by position in descending priority order
    (position 0 = rank 1). edges holds (i, ci, j, cj) with i < j;
    adj[i][ci] lists (j, cj, rad) for BOTH directions, sorted by (j, cj),
    where rad is the Chebyshev cell distance capped at 4.
    """

    n: int
    edges: Set[Edge]
    adj: List[List[List[Tuple[int, int, int]]]]

    def degree(self) -> int:
        return len(self.edges)


def _candidate_bounds(xs: np.ndarray, ys: np.ndarray, w: float, h: float):
    # Column order matches the candidate indexing: 0=LL, 1=UL, 2=LR, 3=UR.
    n = xs.shape[0]
    left = np.empty((n, 4), dtype=np.float64)
    top = np.empty((n, 4), dtype=np.float64)
    left[:, 0] = xs - w
    left[:, 1] = xs - w
    left[:, 2] = xs
    left[:, 3] = xs
    top[:, 0] = ys
    top[:, 1] = ys - h
    top[:, 2] = ys
    top[:, 3] = ys - h
    return left, top, left + w, top + h


def oracle_graph_arrays(
    xs: np.ndarray,
    ys: np.ndarray,
    dims: LabelDims,
    cell_w: float,
    cell_h: float,
    chunk: int = 512,
) -> OracleGraph:
    """All-pairs strict-intersection graph over screen points.

    O(n^2 * 16) rectangle tests, chunked to bound memory. Intended for
    validation runs (n up to a few thousand), not production labeling.
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    n = xs.shape[0]
    left, top, right, bottom = _candidate_bounds(xs, ys, dims.width_px, dims.height_px)
    cols = np.floor(xs / cell_w).astype(np.int64)
    rows = np.floor(ys / cell_h).astype(np.int64)

    edges: Set[Edge] = set()
    adj: List[List[List[Tuple[int, int, int]]]] = [[[] for _ in range(4)] for _ in range(n)]

    for a in range(0, n, chunk):
        b = min(a + chunk, n)
        # (b-a, n, 4, 4) booleans: candidate ci of row feature vs cj of column feature
        x_ovl = (left[a:b, None, :, None] < right[None, :, None, :]) & (
            right[a:b, None, :, None] > left[None, :, None, :]
        )
        y_ovl = (top[a:b, None, :, None] < bottom[None, :, None, :]) & (
            bottom[a:b, None, :, None] > top[None, :, None, :]
        )
        hit = x_ovl & y_ovl
        ii, jj, ci, cj = np.nonzero(hit)
        ii = ii + a
        keep = jj > ii  # each unordered pair once, oriented higher-priority first
        for i, j, a_cand, b_cand in zip(ii[keep], jj[keep], ci[keep], cj[keep]):
            i = int(i)
            j = int(j)
            a_cand = int(a_cand)
            b_cand = int(b_cand)
            rad = int(min(4, max(abs(cols[i] - cols[j]), abs(rows[i] - rows[j]))))
            edges.add((i, a_cand, j, b_cand))
            adj[i][a_cand].append((j, b_cand, rad))
            adj[j][b_cand].append((i, a_cand, rad))

    for lists in adj:
        for lst in lists:
            lst.sort()
    return OracleGraph(n=n, edges=edges, adj=adj)


def prepare_screen_points(
    features: Sequence[Feature], viewport: Viewport
) -> Tuple[List[Feature], np.ndarray, np.ndarray]:
    """Sort by rank, project, and drop off-screen points (scalar path).

    Kept independent of the production array pipeline so position/index
    agreement between the two is itself under test.
    """
    ordered = sorted(features, key=lambda f: f.rank)
    kept: List[Feature] = []
    pts: List[Tuple[float, float]] = []
    for f in ordered:
        p = world_to_screen(f, viewport)
        if is_on_screen(p, viewport):
            kept.append(f)
            pts.append(p)
    xs = np.array([p[0] for p in pts], dtype=np.float64)
    ys = np.array([p[1] for p in pts], dtype=np.float64)
    return kept, xs, ys


def oracle_graph(
    features: Sequence[Feature],
    viewport: Viewport,
    dims: LabelDims,
    options: Optional[EngineOptions] = None,
) -> OracleGraph:
    """Convenience wrapper: prep features the same way a labeling run does."""
    opts = options or EngineOptions()
    eff = opts.effective_dims(dims)
    _, xs, ys = prepare_screen_points(features, viewport)
    return oracle_graph_arrays(xs, ys, eff, eff.width_px / 2.0, eff.height_px / 2.0)


@dataclass
class ReferencePlacement:
    """Outcome of the reference greedy selector, aligned by position."""

    selected: np.ndarray  # int8: 0..3 candidate, -1 all-occluded, -2 below-threshold
    state: np.ndarray  # (n, 4) int8 candidate states
    value: np.ndarray  # (n, 4) float64 final (possibly boosted) values
    labels_placed: int


def reference_select(
    graph: OracleGraph,
    values: np.ndarray,
    options: Optional[EngineOptions] = None,
) -> ReferencePlacement:
    """Greedy least-expense selection run directly on the oracle graph.

    values[p] is the spread value of the feature at descending-priority
    position p. Float operations are ordered canonically (contributions
    and occlusions iterate partners sorted by position, then candidate) so
    the production kernel can match this bit for bit.
    """
    opts = options or EngineOptions()
    n = graph.n
    state = np.full((n, 4), LIVE, dtype=np.int8)
    value = np.repeat(np.asarray(values, dtype=np.float64)[:, None], 4, axis=1)
    selected = np.full(n, -2 if opts.priority_threshold is not None else -1, dtype=np.int8)
    limit = n if opts.priority_threshold is None else min(opts.priority_threshold, n)
    placed = 0

    for i in range(limit):
        live = [c for c in range(4) if state[i][c] == LIVE]
        if not live:
            selected[i] = -1
            continue

        expense = [0.0, 0.0, 0.0, 0.0]
        for c in live:
            expense[c] = candidate_expense(graph.adj[i][c], state, value, opts.prox_weight)

        best = -1
        for c in opts.preference_order:
            if state[i][c] != LIVE:
                continue
            if best < 0 or expense[c] < expense[best]:
                best = c

        state[i][best] = SELECTED
        for c in range(4):
            if c != best and state[i][c] == LIVE:
                state[i][c] = DESELECTED
        selected[i] = best
        placed += 1

        for j, cj, rad in graph.adj[i][best]:
            if state[j][cj] != LIVE:
                continue
            state[j][cj] = OCCLUDED
            boost_siblings(state, value, j, cj)

    return ReferencePlacement(selected=selected, state=state, value=value, labels_placed=placed)
