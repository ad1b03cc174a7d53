"""Real-time point-feature label placement.

Labels are axis-aligned boxes anchored at one of four corners of their
feature point. A screen-space grid of quarter-label cells bounds every
conflict search to a 9x9 window, decision trees classify each neighbor
pair in at most two comparisons, and a greedy pass in priority order
places each feature's least-expensive surviving candidate.
"""

from .model import (
    EngineOptions,
    Feature,
    LabelDims,
    Rect,
    Viewport,
    candidate_rects,
    rerank,
    world_to_screen,
)
from .selector import (
    Placement,
    PlacementResult,
    ensure_warm,
    measure_anomaly,
    run_pipeline,
    select_labels,
)
from .trellis import NeighborhoodTestTable, Trellis, load_default_table, populate

__version__ = "0.1.0"

__all__ = [
    "EngineOptions",
    "Feature",
    "LabelDims",
    "NeighborhoodTestTable",
    "Placement",
    "PlacementResult",
    "Rect",
    "Trellis",
    "Viewport",
    "candidate_rects",
    "ensure_warm",
    "load_default_table",
    "measure_anomaly",
    "populate",
    "rerank",
    "run_pipeline",
    "select_labels",
    "world_to_screen",
    "__version__",
]
