"""Domain types and coordinate conventions shared by all other modules.

Screen coordinates: x grows right, y grows down, so "upper" always means
smaller y. A label candidate is one of four axis-aligned rectangles touching
its feature's screen point at exactly one corner:

    index 0 = lower-left   (rect's upper-right corner at the point)
    index 1 = upper-left   (rect's lower-right corner at the point)
    index 2 = lower-right  (rect's upper-left corner at the point)
    index 3 = upper-right  (rect's lower-left corner at the point)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

# Candidate state codes, shared by the selector and the reference selector.
LIVE = 0
SELECTED = 1
DESELECTED = 2
OCCLUDED = 3

# Outcome reasons for features that receive no label.
REASON_ALL_OCCLUDED = "all-occluded"
REASON_BELOW_THRESHOLD = "below-threshold"
REASON_OFF_SCREEN = "off-screen"


@dataclass(frozen=True)
class Feature:
    """A prioritized point to be labeled. rank 1 is the highest priority."""

    id: int
    rank: int
    world_x: float
    world_y: float
    primary_text: str = ""
    secondary_text: Optional[str] = None
    data_value: Optional[float] = None

    def __post_init__(self) -> None:
        if self.rank < 1:
            raise ValueError(f"feature {self.id}: rank must be >= 1, got {self.rank}")


@dataclass(frozen=True)
class Viewport:
    """An affine world-to-screen mapping over a pixel rectangle.

    screen = (world - pan) * zoom * base_dims, where base_dims stretches the
    unit square to fill the viewport at zoom 1 and pan 0.
    """

    width_px: int
    height_px: int
    pan_x: float = 0.0
    pan_y: float = 0.0
    zoom: float = 1.0

    def __post_init__(self) -> None:
        if self.width_px <= 0 or self.height_px <= 0:
            raise ValueError("viewport dimensions must be positive")
        if self.zoom <= 0:
            raise ValueError("zoom must be positive")


@dataclass(frozen=True)
class LabelDims:
    """Uniform label rectangle size in pixels. Fractional sizes are allowed."""

    width_px: float
    height_px: float

    def __post_init__(self) -> None:
        if self.width_px <= 0 or self.height_px <= 0:
            raise ValueError("label dimensions must be positive")

    def scaled(self, factor: float) -> "LabelDims":
        return LabelDims(self.width_px * factor, self.height_px * factor)


@dataclass(frozen=True)
class Rect:
    """Axis-aligned screen rectangle; top < bottom because y grows down."""

    left: float
    top: float
    width: float
    height: float

    @property
    def right(self) -> float:
        return self.left + self.width

    @property
    def bottom(self) -> float:
        return self.top + self.height


@dataclass
class LabelCandidate:
    """One corner-anchored rectangle of a feature, with selection state.

    conflict_partners holds (feature id, candidate index, radial distance)
    triples recorded by the grid traversal.
    """

    owner: int
    index: int
    rect: Rect
    state: int = LIVE
    value: float = 0.0
    conflict_partners: list = field(default_factory=list)


@dataclass(frozen=True)
class EngineOptions:
    """Tuning knobs for a labeling run.

    priority_threshold limits the run to the N highest-ranked visible
    features; everything below it still occupies the grid (and so still
    counts toward candidate expenses) but is never traversed or labeled.
    allowed_overlap_pct shrinks the conflict geometry, permitting that much
    overlap between rendered labels. skip_resolved_ranks is the traversal
    shortcut that ignores higher-ranked neighbors (their conflicts were
    already handled); disabling it must not change the output.
    """

    priority_threshold: Optional[int] = None
    allowed_overlap_pct: float = 0.0
    prox_weight: float = 0.5
    preference_order: Tuple[int, int, int, int] = (3, 2, 1, 0)
    spread_values: bool = True
    skip_resolved_ranks: bool = True

    def __post_init__(self) -> None:
        if self.priority_threshold is not None and self.priority_threshold < 1:
            raise ValueError("priority_threshold must be >= 1")
        if not (0 <= self.allowed_overlap_pct < 100):
            raise ValueError("allowed_overlap_pct must be in [0, 100)")
        if sorted(self.preference_order) != [0, 1, 2, 3]:
            raise ValueError("preference_order must be a permutation of 0..3")

    def effective_dims(self, dims: LabelDims) -> LabelDims:
        """Label size used for conflict detection (full size minus the
        allowed overlap); rendered rects keep the full size."""
        return dims.scaled(1.0 - self.allowed_overlap_pct / 100.0)


def world_to_screen(f: Feature, v: Viewport) -> Tuple[float, float]:
    """Map a feature's unit-square position to pixel coordinates."""
    x = (f.world_x - v.pan_x) * v.zoom * v.width_px
    y = (f.world_y - v.pan_y) * v.zoom * v.height_px
    return (x, y)


def is_on_screen(p: Tuple[float, float], v: Viewport) -> bool:
    """Half-open containment test; points on the right/bottom edge are out."""
    x, y = p
    return 0 <= x < v.width_px and 0 <= y < v.height_px


def candidate_rects(p: Tuple[float, float], dims: LabelDims) -> Tuple[Rect, Rect, Rect, Rect]:
    """The four corner-anchored rectangles for a feature point.

    Index 3 (upper-right) has its lower-left corner at p, index 2
    (lower-right) its upper-left corner, index 1 (upper-left) its
    lower-right corner, index 0 (lower-left) its upper-right corner.
    """
    x, y = p
    w, h = dims.width_px, dims.height_px
    return (
        Rect(x - w, y, w, h),      # 0: lower-left
        Rect(x - w, y - h, w, h),  # 1: upper-left
        Rect(x, y, w, h),          # 2: lower-right
        Rect(x, y - h, w, h),      # 3: upper-right
    )


def rerank(features: Sequence[Feature]) -> Tuple[list, bool]:
    """Assign unique contiguous ranks 1..n, preserving input order among
    equal ranks. Returns (reranked features, whether any rank changed)."""
    ordered = sorted(range(len(features)), key=lambda i: (features[i].rank, i))
    out: list = [None] * len(features)
    changed = False
    for new_rank0, i in enumerate(ordered):
        f = features[i]
        new_rank = new_rank0 + 1
        if f.rank != new_rank:
            changed = True
            f = Feature(
                id=f.id,
                rank=new_rank,
                world_x=f.world_x,
                world_y=f.world_y,
                primary_text=f.primary_text,
                secondary_text=f.secondary_text,
                data_value=f.data_value,
            )
        out[i] = f
    return out, changed
