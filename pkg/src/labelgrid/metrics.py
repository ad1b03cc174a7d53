"""Labeling quality and performance metrics.

The decile histogram slices the ranked feature list into ten contiguous
bins (best priority first) and reports the labeled fraction of each; a
healthy run starts high on the left and descends.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Dict, List

if TYPE_CHECKING:
    from .selector import PlacementResult


def decile_histogram(result: "PlacementResult") -> List[float]:
    """Labeled fraction per priority decile, best first.

    The first nine bins take max(1, n // 10) features each; the last
    absorbs the remainder. Bins past the end of a small feature list
    are empty and report 0.0.
    """
    placements = result.placements
    n = len(placements)
    bins = [0.0] * 10
    if n == 0:
        return bins
    size = max(1, n // 10)
    for k in range(10):
        lo = k * size
        hi = lo + size if k < 9 else n
        if lo >= n:
            break
        chunk = placements[lo:min(hi, n)]
        labeled = sum(1 for p in chunk if p.candidate_index is not None)
        bins[k] = labeled / len(chunk)
    return bins


def phase_timings(result: "PlacementResult") -> Dict[str, float]:
    """Wall-clock milliseconds per phase.

    The measured span covers grid population through selection; parsing,
    serialization, rendering, and the anomaly measurement fall outside
    it, keeping timings comparable across runs and output formats.
    """
    t = result.phase_ms
    return {
        "populate_ms": t["populate_ms"],
        "traverse_select_ms": t["traverse_select_ms"],
        "total_ms": t["total_ms"],
    }
