"""Point-file ingestion and placement serialization.

The XML input grammar is ViewData/Data/Feature_Points with one point
element per feature carrying rank, key1, key2, data, lat, lon, x, y
attributes. Output goes to a documented JSON schema or to SVG; both are
deterministic for identical runs (timing aside) so goldens diff cleanly.
"""

from __future__ import annotations

import json
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from .metrics import decile_histogram
from .model import Feature, LabelDims, Viewport, rerank
from .selector import Placement, PlacementResult

_CORE_ATTRS = {"rank", "key1", "key2", "data", "lat", "lon", "x", "y"}


@dataclass
class FeatureFile:
    """A parsed point file plus everything needed to reproduce it."""

    features: List[Feature]
    nodes_declared: Optional[int] = None
    width_hint: Optional[float] = None
    height_hint: Optional[float] = None
    warnings: List[str] = field(default_factory=list)
    # per-feature attributes outside the core set, keyed by feature id;
    # lat/lon also land here (the engine itself never reads them)
    extra_attrs: Dict[int, Dict[str, str]] = field(default_factory=dict)


class FeatureParseError(ValueError):
    pass


def parse_feature_xml(data: bytes) -> FeatureFile:
    """Parse a point file; re-ranks to unique contiguous 1..n, stably."""
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        line, col = exc.position
        raise FeatureParseError(f"malformed XML at line {line}, column {col}: {exc.msg}") from exc

    fp = root.find(".//Feature_Points")
    if fp is None:
        raise FeatureParseError("no Feature_Points element found")

    out = FeatureFile(features=[])
    if "nodes" in fp.attrib:
        try:
            out.nodes_declared = int(fp.attrib["nodes"])
        except ValueError:
            out.warnings.append(f"unreadable nodes attribute {fp.attrib['nodes']!r}")
    if "width" in fp.attrib:
        out.width_hint = float(fp.attrib["width"])
    if "height" in fp.attrib:
        out.height_hint = float(fp.attrib["height"])

    raw_ranks: List[int] = []
    for idx, pt in enumerate(fp.iter("point")):
        attrs = pt.attrib
        missing = [k for k in ("rank", "x", "y") if k not in attrs]
        if missing:
            raise FeatureParseError(
                f"point #{idx} (rank={attrs.get('rank', '?')}) missing {', '.join(missing)}"
            )
        try:
            rank = int(attrs["rank"])
            x = float(attrs["x"])
            y = float(attrs["y"])
        except ValueError as exc:
            raise FeatureParseError(f"point #{idx}: {exc}") from exc
        if rank < 1:
            raise FeatureParseError(f"point #{idx}: rank must be positive, got {rank}")
        data_value = None
        if "data" in attrs:
            try:
                data_value = float(attrs["data"])
            except ValueError:
                out.warnings.append(f"point #{idx}: unreadable data attribute")
        feature = Feature(
            id=idx,
            rank=rank,
            world_x=x,
            world_y=y,
            primary_text=attrs.get("key1", ""),
            secondary_text=attrs.get("key2", ""),
            data_value=data_value,
        )
        raw_ranks.append(rank)
        extras = {k: v for k, v in attrs.items() if k not in _CORE_ATTRS or k in ("lat", "lon")}
        if extras:
            out.extra_attrs[idx] = extras
        out.features.append(feature)

    if out.nodes_declared is not None and out.nodes_declared != len(out.features):
        out.warnings.append(
            f"declared nodes={out.nodes_declared} but parsed {len(out.features)} points"
        )
    reranked, changed = rerank(out.features)
    if changed:
        out.warnings.append("ranks were not unique and contiguous; re-ranked stably")
    out.features = reranked
    return out


def write_feature_xml(
    features: Sequence[Feature],
    width_hint: Optional[float] = None,
    height_hint: Optional[float] = None,
) -> bytes:
    """Serialize features back to the point-file grammar."""
    fp_attrs = f'nodes="{len(features)}"'
    if width_hint is not None:
        fp_attrs += f' width="{_fmt(width_hint)}"'
    if height_hint is not None:
        fp_attrs += f' height="{_fmt(height_hint)}"'
    lines = [
        '<?xml version="1.0"?>',
        "<ViewData>",
        "  <Data>",
        f"    <Feature_Points {fp_attrs}>",
    ]
    for f in features:
        bits = [
            f'rank="{f.rank}"',
            f'key1="{_xml_escape(f.primary_text)}"',
            f'key2="{_xml_escape(f.secondary_text)}"',
        ]
        if f.data_value is not None:
            bits.append(f'data="{_fmt(f.data_value)}"')
        bits.append(f'x="{f.world_x!r}"')
        bits.append(f'y="{f.world_y!r}"')
        lines.append(f"      <point {' '.join(bits)}/>")
    lines += ["    </Feature_Points>", "  </Data>", "</ViewData>", ""]
    return "\n".join(lines).encode("utf-8")


def _xml_escape(s: str) -> str:
    return (
        s.replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def _fmt(x: float) -> str:
    return f"{x:g}"


def _r6(x: float) -> float:
    return round(float(x), 6)


def emit_placements_json(result: PlacementResult, timing: bool = True) -> bytes:
    """Serialize a run to the documented JSON schema.

    Keys appear in a fixed order and floats are rounded to 6 decimals,
    so identical runs produce identical bytes; elapsed_ms is the one
    nondeterministic field and can be zeroed with timing=False.
    """
    opts = result.options
    doc = {
        "viewport": {
            "width": _r6(result.viewport.width_px),
            "height": _r6(result.viewport.height_px),
            "pan_x": _r6(result.viewport.pan_x),
            "pan_y": _r6(result.viewport.pan_y),
            "zoom": _r6(result.viewport.zoom),
        },
        "label_dims": {
            "width": _r6(result.label_dims.width_px),
            "height": _r6(result.label_dims.height_px),
        },
        "options": {
            "priority_threshold": opts.priority_threshold,
            "allowed_overlap_pct": _r6(opts.allowed_overlap_pct),
            "prox_weight": _r6(opts.prox_weight),
            "preference_order": list(opts.preference_order),
            "spread_values": opts.spread_values,
            "skip_resolved_ranks": opts.skip_resolved_ranks,
        },
        "placements": [_placement_doc(p) for p in result.placements],
        "metrics": {
            "n_input": result.n_input,
            "n_visible": result.n_visible,
            "features_processed": result.features_processed,
            "labels_placed": result.labels_placed,
            "anomaly_count": result.anomaly_count,
            "anomaly_rate": _r6(result.anomaly_rate),
            "elapsed_ms": _r6(result.elapsed_ms) if timing else 0.0,
            "histogram": [_r6(b) for b in decile_histogram(result)],
        },
    }
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


def _placement_doc(p: Placement) -> dict:
    doc: dict = {
        "id": p.feature.id,
        "rank": p.feature.rank,
        "text": p.feature.primary_text,
    }
    if p.screen_x is not None:
        # Dot position for renderers; off-screen features have none.
        doc["point"] = {"x": _r6(p.screen_x), "y": _r6(p.screen_y)}
    if p.candidate_index is not None:
        doc["candidate_index"] = p.candidate_index
        doc["rect"] = {
            "left": _r6(p.rect.left),
            "top": _r6(p.rect.top),
            "width": _r6(p.rect.width),
            "height": _r6(p.rect.height),
        }
    else:
        doc["candidate_index"] = None
        doc["reason"] = p.reason
    return doc


def parse_placements_json(data: bytes) -> dict:
    """Load and minimally validate the JSON schema; returns the document."""
    doc = json.loads(data.decode("utf-8"))
    for key in ("viewport", "label_dims", "options", "placements", "metrics"):
        if key not in doc:
            raise ValueError(f"placements document missing {key!r}")
    for i, p in enumerate(doc["placements"]):
        if "candidate_index" not in p:
            raise ValueError(f"placement #{i} missing candidate_index")
        if p["candidate_index"] is None and "reason" not in p:
            raise ValueError(f"placement #{i} unlabeled but has no reason")
    return doc


def truncate_or_flow_labels(
    texts: Sequence[str],
    dims: LabelDims,
    policy: str = "truncate",
    char_width_px: float = 7.0,
) -> List[str]:
    """Fit label texts to the box width.

    truncate clips with an ellipsis using a fixed per-character width
    model; overlap keeps text intact and leaves crowding to the
    allowed-overlap option.
    """
    if policy == "overlap":
        return list(texts)
    if policy != "truncate":
        raise ValueError(f"unknown label text policy {policy!r}")
    max_chars = max(1, int(dims.width_px / char_width_px))
    out = []
    for t in texts:
        if len(t) <= max_chars:
            out.append(t)
        else:
            out.append(t[: max(1, max_chars - 1)] + "…")
    return out


def emit_svg(
    result: PlacementResult,
    show_grid: bool = False,
    char_width_px: float = 7.0,
    text_policy: str = "truncate",
) -> bytes:
    """Render a run: feature dots, label boxes with text, dimmed
    unlabeled points, and an optional grid overlay."""
    vp = result.viewport
    w = vp.width_px
    h = vp.height_px
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(w)}" height="{_fmt(h)}" '
        f'viewBox="0 0 {_fmt(w)} {_fmt(h)}">',
        f'<rect x="0" y="0" width="{_fmt(w)}" height="{_fmt(h)}" fill="white"/>',
    ]

    if show_grid and result.trellis is not None:
        t = result.trellis
        grid = ['<g id="grid" stroke="#d0e0f0" stroke-width="0.5">']
        col = 1
        x = t.cell_w
        while x < w and col <= t.n_cols:
            grid.append(f'<line x1="{_fmt(x)}" y1="0" x2="{_fmt(x)}" y2="{_fmt(h)}"/>')
            x += t.cell_w
            col += 1
        row = 1
        y = t.cell_h
        while y < h and row <= t.n_rows:
            grid.append(f'<line x1="0" y1="{_fmt(y)}" x2="{_fmt(w)}" y2="{_fmt(y)}"/>')
            y += t.cell_h
            row += 1
        grid.append("</g>")
        parts.extend(grid)

    dots = ['<g id="points">']
    labeled: List[Placement] = []
    for p in result.placements:
        if p.screen_x is None:
            continue  # off-screen
        if p.labeled:
            labeled.append(p)
            dots.append(
                f'<circle cx="{_fmt(p.screen_x)}" cy="{_fmt(p.screen_y)}" r="1.5" fill="#222"/>'
            )
        else:
            dots.append(
                f'<circle cx="{_fmt(p.screen_x)}" cy="{_fmt(p.screen_y)}" r="1.5" '
                f'fill="#222" opacity="0.25"/>'
            )
    dots.append("</g>")
    parts.extend(dots)

    texts = truncate_or_flow_labels(
        [p.feature.primary_text for p in labeled], result.label_dims, text_policy, char_width_px
    )
    boxes = ['<g id="labels" font-family="monospace" font-size="9">']
    for p, text in zip(labeled, texts):
        r = p.rect
        boxes.append(
            f'<rect x="{_fmt(r.left)}" y="{_fmt(r.top)}" width="{_fmt(r.width)}" '
            f'height="{_fmt(r.height)}" fill="none" stroke="#99a" stroke-width="0.5"/>'
        )
        tx = r.left + 2
        ty = r.top + r.height * 0.75
        boxes.append(f'<text x="{_fmt(tx)}" y="{_fmt(ty)}">{_xml_escape(text)}</text>')
    boxes.append("</g>")
    parts.extend(boxes)

    parts.append("</svg>")
    return ("\n".join(parts) + "\n").encode("utf-8")
