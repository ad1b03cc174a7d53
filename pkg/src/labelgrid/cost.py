"""Feature values and the expense rules that drive candidate selection.

Values are spread so that higher-priority features weigh strictly more,
with top-of-list increments about twice the mid-list ones; a candidate's
expense is the proximity-weighted sum of its live conflict partners'
current values, and occluding a candidate passes its current value on to
its surviving siblings.
"""

from __future__ import annotations

from typing import Iterable, Tuple

import numpy as np

from .model import LIVE


def spread_values(n: int, spread: bool = True) -> np.ndarray:
    """Per-feature values indexed by ASCENDING priority (0 = lowest).

    The i-th feature carries base value i+1 and each value adds base/n
    to the previous one, so the increment grows from ~1/n at the bottom
    to ~1 at the top: outweighing one top-priority label takes roughly
    twice as many mid-priority labels. With spread off, every feature
    weighs 1.0 and only proximity and boosts differentiate expenses.
    """
    if n <= 0:
        return np.zeros(0, dtype=np.float64)
    if not spread:
        return np.ones(n, dtype=np.float64)
    # accumulate runs strictly left to right, so each value carries the
    # recurrence's exact float rounding (value[i] = value[i-1] + (i+1)/n)
    terms = np.empty(n, dtype=np.float64)
    terms[0] = 1.0
    if n > 1:
        terms[1:] = np.arange(2, n + 1, dtype=np.float64) / n
    return np.add.accumulate(terms)


def values_by_position(n: int, spread: bool = True) -> np.ndarray:
    """Spread values reindexed by descending-priority position (0 = best)."""
    return spread_values(n, spread)[::-1].copy()


def proximity_modifier(rad_dist: int, prox_weight: float = 0.5) -> float:
    """Weight for a conflict partner rad_dist cells away (0..4).

    Linear falloff: with the default weight the multiplier runs
    2.5, 2.0, 1.5, 1.0, 0.5 from same-cell to window-edge partners.
    """
    return prox_weight * (5.0 - rad_dist)


def candidate_expense(
    partners: Iterable[Tuple[int, int, int]],
    state: np.ndarray,
    value: np.ndarray,
    prox_weight: float = 0.5,
) -> float:
    """Sum of live partners' current values, proximity-weighted.

    partners yields (position, candidate, rad_dist) sorted by
    (position, candidate); the accumulation order is part of the
    contract (the selection kernel reproduces these sums bit for bit).
    """
    total = 0.0
    for j, cj, rad in partners:
        if state[j][cj] == LIVE:
            mult = prox_weight * (5.0 - rad)
            total += float(value[j][cj]) * mult
    return total


def boost_siblings(state: np.ndarray, value: np.ndarray, pos: int, occluded: int) -> None:
    """Add a just-occluded candidate's current value to its live siblings.

    Boosts compound: occluding all but one of four equal-value candidates
    leaves the survivor at 8x through a doubling cascade, no less than
    the sum of the four original values.
    """
    v = float(value[pos][occluded])
    for sib in range(4):
        if state[pos][sib] == LIVE:
            value[pos][sib] += v
