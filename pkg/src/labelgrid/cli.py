"""Command-line front end: label a file, benchmark, or precompute zoom levels."""

from __future__ import annotations

import statistics
import sys
from pathlib import Path
from typing import List, Optional, Tuple

import click

from .datasets import by_name
from .io import FeatureParseError, emit_placements_json, emit_svg, parse_feature_xml
from .metrics import phase_timings
from .model import EngineOptions, LabelDims, Viewport
from .selector import ensure_warm, run_pipeline

_FETCH_HINT = "generate or download benchmark files with scripts/fetch_benchmarks.py"


def _load_features(input_path: str):
    path = Path(input_path)
    if not path.exists():
        raise click.ClickException(f"{input_path}: no such file ({_FETCH_HINT})")
    try:
        return parse_feature_xml(path.read_bytes())
    except FeatureParseError as exc:
        raise click.ClickException(f"{input_path}: {exc}") from exc


def _options(threshold, overlap_pct, prox_weight, spread) -> EngineOptions:
    try:
        return EngineOptions(
            priority_threshold=threshold,
            allowed_overlap_pct=overlap_pct,
            prox_weight=prox_weight,
            spread_values=spread,
        )
    except ValueError as exc:
        raise click.ClickException(str(exc)) from exc


def _parse_dims_list(spec: str) -> List[LabelDims]:
    out = []
    for item in spec.split(","):
        w, _, h = item.strip().partition("x")
        try:
            out.append(LabelDims(float(w), float(h)))
        except ValueError as exc:
            raise click.ClickException(f"bad label dims {item!r} (expected WxH)") from exc
    return out


@click.group()
@click.version_option(package_name="labelgrid")
def main() -> None:
    """Real-time point-feature label placement."""


@main.command("label")
@click.argument("input_path", type=str)
@click.option("--width", default=770.0, show_default=True, help="Viewport width in pixels.")
@click.option("--height", default=840.0, show_default=True, help="Viewport height in pixels.")
@click.option("--label-w", default=150.0, show_default=True, help="Label width in pixels.")
@click.option("--label-h", default=12.0, show_default=True, help="Label height in pixels.")
@click.option("--threshold", type=int, default=None, help="Label only the top N features.")
@click.option("--overlap-pct", default=0.0, show_default=True,
              help="Allowed label overlap percentage (0-99).")
@click.option("--prox-weight", default=0.5, show_default=True,
              help="Proximity weighting of conflict expenses.")
@click.option("--spread/--no-spread", default=True, show_default=True,
              help="Spread feature values by priority.")
@click.option("--format", "fmt", type=click.Choice(["json", "svg"]), default="json",
              show_default=True)
@click.option("--grid", is_flag=True, help="Draw the cell grid in SVG output.")
@click.option("--metrics", "show_metrics", is_flag=True, help="Print a metrics table to stderr.")
@click.option("--out", type=str, default=None, help="Output path (default: stdout).")
def cmd_label(input_path, width, height, label_w, label_h, threshold, overlap_pct,
              prox_weight, spread, fmt, grid, show_metrics, out) -> None:
    """Label one point file and write JSON or SVG."""
    ff = _load_features(input_path)
    for w in ff.warnings:
        click.echo(f"warning: {w}", err=True)
    opts = _options(threshold, overlap_pct, prox_weight, spread)
    result = run_pipeline(
        ff.features,
        Viewport(width_px=width, height_px=height),
        LabelDims(label_w, label_h),
        opts,
    )
    payload = (
        emit_svg(result, show_grid=grid) if fmt == "svg" else emit_placements_json(result)
    )
    if out:
        Path(out).write_bytes(payload)
    else:
        sys.stdout.buffer.write(payload)
    if show_metrics:
        t = phase_timings(result)
        click.echo(
            f"visible {result.n_visible}/{result.n_input}  labeled {result.labels_placed}  "
            f"anomalies {result.anomaly_count} ({result.anomaly_rate:.4%})",
            err=True,
        )
        click.echo(
            f"populate {t['populate_ms']:.2f}ms  traverse+select "
            f"{t['traverse_select_ms']:.2f}ms  total {t['total_ms']:.2f}ms",
            err=True,
        )


@main.command("bench")
@click.argument("dataset", type=str)
@click.option("--sizes", default="1000,5000,11000", show_default=True,
              help="Comma-separated feature counts (generator datasets only).")
@click.option("--dims", "dims_spec", default="50x8,100x10,150x12,200x14", show_default=True,
              help="Comma-separated label dims, WxH each.")
@click.option("--repeat", default=3, show_default=True, help="Runs per cell; mean reported.")
@click.option("--width", default=1500.0, show_default=True)
@click.option("--height", default=1000.0, show_default=True)
@click.option("--seed", default=2026, show_default=True)
def cmd_bench(dataset, sizes, dims_spec, repeat, width, height, seed) -> None:
    """Time labeling runs over a size x label-dims grid.

    DATASET is uniform, clustered, munich, or a path to a point XML file.
    """
    dims_list = _parse_dims_list(dims_spec)
    vp = Viewport(width_px=width, height_px=height)

    if dataset in ("uniform", "clustered", "munich"):
        try:
            size_list = [int(s) for s in sizes.split(",")]
        except ValueError as exc:
            raise click.ClickException(f"bad sizes list {sizes!r}") from exc
        if dataset == "munich":
            munich = by_name("munich", 0)
            feature_sets = [(len(munich), munich)]
        else:
            feature_sets = [(n, by_name(dataset, n, seed)) for n in size_list]
    else:
        ff = _load_features(dataset)
        feature_sets = [(len(ff.features), ff.features)]

    ensure_warm()
    col_w = 14
    header = "n".rjust(8) + "".join(
        f"{d.width_px:g}x{d.height_px:g}".rjust(col_w) for d in dims_list
    )
    click.echo(header)
    for n, features in feature_sets:
        cells = []
        for dims in dims_list:
            times = []
            placed = 0
            for _ in range(repeat):
                r = run_pipeline(features, vp, dims, compute_anomaly=False)
                times.append(r.elapsed_ms / 1000.0)
                placed = r.labels_placed
            mean = statistics.mean(times)
            cell = f"{mean:.4f}s/{placed}"
            if repeat > 1:
                cell += f" sd={statistics.pstdev(times):.4f}"
            cells.append(cell.rjust(col_w))
        click.echo(f"{n:>8}" + "".join(cells))
    click.echo("(each cell: mean seconds / labels placed)")


@main.command("zoom-ladder")
@click.argument("input_path", type=str)
@click.option("--levels", default=8, show_default=True, help="Number of zoom levels (k >= 1).")
@click.option("--zoom-factor", default=1.5, show_default=True, help="Per-level scale (z > 1).")
@click.option("--width", default=770.0, show_default=True)
@click.option("--height", default=840.0, show_default=True)
@click.option("--label-w", default=150.0, show_default=True)
@click.option("--label-h", default=12.0, show_default=True)
@click.option("--out-dir", default=".", show_default=True)
def cmd_zoom_ladder(input_path, levels, zoom_factor, width, height, label_w, label_h,
                    out_dir) -> None:
    """Precompute placements for a ladder of zoom levels.

    Zooming in by z is equivalent to shrinking labels by z at a fixed
    view, so level j runs with label dims scaled by z^-j and stores one
    placement file per level.
    """
    if levels < 1:
        raise click.ClickException("--levels must be >= 1")
    if zoom_factor <= 1.0:
        raise click.ClickException("--zoom-factor must be > 1")
    ff = _load_features(input_path)
    vp = Viewport(width_px=width, height_px=height)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ensure_warm()
    total_ms = 0.0
    for level in range(levels):
        dims = LabelDims(label_w, label_h).scaled(zoom_factor ** -level)
        result = run_pipeline(ff.features, vp, dims)
        total_ms += result.elapsed_ms
        path = out / f"level_{level}.json"
        path.write_bytes(emit_placements_json(result))
        click.echo(
            f"level {level}: dims {dims.width_px:.3f}x{dims.height_px:.3f} "
            f"labeled {result.labels_placed} -> {path}"
        )
    click.echo(f"ladder total {total_ms:.1f}ms")


@main.command("serve")
@click.option("--port", default=8123, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
def cmd_serve(port, host) -> None:
    """Run the labeling HTTP service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port, log_level="info")


if __name__ == "__main__":
    main()
