#!/usr/bin/env python3
"""Stage benchmark point files for the bench command.

Real benchmark sets (US city lists, borehole surveys) are not vendored
with the package. This script fills a data directory with files in the
supported XML grammar, either by downloading files you point it at or,
by default, by generating the synthetic substitutes that the test suite
uses. Point LABELGRID_DATA_DIR or the bench command at the results.

Usage:
  python3 scripts/fetch_benchmarks.py [--out-dir DIR] [--url URL ...]

Each --url is fetched and saved verbatim (it must already be a valid
point XML file). Without --url, writes uniform_11k.xml, clustered_11k.xml,
and munich_substitute.xml.
"""

import argparse
import sys
import urllib.request
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from labelgrid.datasets import clustered, munich_substitute, uniform_random
from labelgrid.io import write_feature_xml


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="benchmark_data")
    ap.add_argument("--url", action="append", default=[],
                    help="download a point XML file (repeatable)")
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    if args.url:
        for url in args.url:
            name = url.rstrip("/").rsplit("/", 1)[-1] or "download.xml"
            dest = out / name
            print(f"fetching {url} -> {dest}")
            with urllib.request.urlopen(url) as resp:
                dest.write_bytes(resp.read())
        return 0

    for name, features in [
        ("uniform_11k.xml", uniform_random(11_000, seed=2026)),
        ("clustered_11k.xml", clustered(11_000, seed=2026)),
        ("munich_substitute.xml", munich_substitute()),
    ]:
        dest = out / name
        dest.write_bytes(write_feature_xml(features))
        print(f"wrote {dest} ({len(features)} features)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
