"""Synthetic benchmark datasets.

Real benchmark point sets are not vendored; these generators produce
statistically similar stand-ins (see scripts/fetch_benchmarks.py for
wiring in real files). World coordinates live in [0, 1) on both axes so
an identity viewport shows every point, and ranks are shuffled so that
priority is independent of location.

Generators avoid placing mass on exact coordinate values (clipping to a
boundary, snapping to a grid): coincident coordinates sit on the
classifier's open-region boundaries where conflict classification is
deliberately conservative, and statistical equivalence harnesses assume
continuous positions.
"""

from __future__ import annotations

from typing import List, Optional

import numpy as np

from .model import Feature

MUNICH_SUBSTITUTE_SIZE = 19_446  # site count of the drill-holes benchmark


def _assemble(
    xs: np.ndarray, ys: np.ndarray, rng: np.random.Generator, prefix: str
) -> List[Feature]:
    n = xs.shape[0]
    ranks = rng.permutation(n) + 1
    return [
        Feature(
            id=i,
            rank=int(ranks[i]),
            world_x=float(xs[i]),
            world_y=float(ys[i]),
            primary_text=f"{prefix}-{int(ranks[i]):05d}",
            secondary_text="",
            data_value=float(n - ranks[i] + 1),
        )
        for i in range(n)
    ]


def uniform_random(n: int, seed: int = 0) -> List[Feature]:
    """n features uniform over the unit square."""
    rng = np.random.default_rng(seed)
    xs = rng.uniform(0.0, 1.0, n)
    ys = rng.uniform(0.0, 1.0, n)
    return _assemble(xs, ys, rng, "PT")


def clustered(
    n: int,
    seed: int = 0,
    clusters: Optional[int] = None,
    spread: float = 0.04,
) -> List[Feature]:
    """Gaussian blobs wrapped into the unit square (no boundary pile-up)."""
    rng = np.random.default_rng(seed)
    k = clusters if clusters is not None else max(2, n // 150)
    cx = rng.uniform(0.0, 1.0, k)
    cy = rng.uniform(0.0, 1.0, k)
    which = rng.integers(0, k, n)
    xs = (cx[which] + rng.normal(0.0, spread, n)) % 1.0
    ys = (cy[which] + rng.normal(0.0, spread, n)) % 1.0
    return _assemble(xs, ys, rng, "CL")


def munich_substitute(seed: int = 1906) -> List[Feature]:
    """A 19,446-site stand-in for the drill-holes benchmark.

    Borehole surveys concentrate in work areas of very different size
    and density, with a thin scatter of isolated holes: modeled as
    lognormally sized gaussian clusters over a mild uniform background.
    The seed is part of the benchmark definition; do not change it.
    """
    n = MUNICH_SUBSTITUTE_SIZE
    rng = np.random.default_rng(seed)
    n_background = int(n * 0.08)
    n_clustered = n - n_background

    k = 140
    weights = rng.lognormal(mean=0.0, sigma=1.1, size=k)
    weights /= weights.sum()
    counts = rng.multinomial(n_clustered, weights)
    cx = rng.uniform(0.0, 1.0, k)
    cy = rng.uniform(0.0, 1.0, k)
    sigma = rng.uniform(0.004, 0.05, k)

    xs = np.empty(n_clustered)
    ys = np.empty(n_clustered)
    at = 0
    for j in range(k):
        c = counts[j]
        xs[at : at + c] = cx[j] + rng.normal(0.0, sigma[j], c)
        ys[at : at + c] = cy[j] + rng.normal(0.0, sigma[j], c)
        at += c
    xs = np.concatenate([xs, rng.uniform(0.0, 1.0, n_background)]) % 1.0
    ys = np.concatenate([ys, rng.uniform(0.0, 1.0, n_background)]) % 1.0
    order = rng.permutation(n)
    return _assemble(xs[order], ys[order], rng, "BH")


def by_name(name: str, n: int, seed: int = 0) -> List[Feature]:
    """Generator lookup for the CLI bench command."""
    if name == "uniform":
        return uniform_random(n, seed)
    if name == "clustered":
        return clustered(n, seed)
    if name == "munich":
        return munich_substitute()
    raise KeyError(name)
