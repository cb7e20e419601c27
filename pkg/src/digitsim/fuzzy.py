"""Reward weights for exemplars and discounted reward accounting.

An exemplar's font similarity is mapped affinely from its digit's
``[sim_min, sim_max]`` onto ``[0.25, 0.75]``. The bounds are taken over the
selected exemplars only; fonts sit outside the map and keep a flat weight.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

from .errors import EmptyPoolError, RangeError
from .selection import Exemplar, ExemplarPool

LOW_WEIGHT = 0.25
HIGH_WEIGHT = 0.75
MID_WEIGHT = 0.5


def fuzzy_weight(sim: float, sim_min: float, sim_max: float) -> float:
    if not sim_min <= sim <= sim_max:
        raise RangeError(f"similarity {sim} outside [{sim_min}, {sim_max}]")
    if sim_max == sim_min:
        return MID_WEIGHT
    return LOW_WEIGHT + (HIGH_WEIGHT - LOW_WEIGHT) * (sim - sim_min) / (sim_max - sim_min)


@dataclass(frozen=True)
class FuzzyWeightTable:
    """Per-digit exemplar weights keyed by the exemplar's ``source_index``.

    ``build_weight_table`` guarantees weights in [0.25, 0.75]; tables built by
    hand (or via :meth:`scaled`) are taken as given.
    """

    digit: int
    sim_min: float
    sim_max: float
    weights: dict[int, float] = field(default_factory=dict)
    font_weight: float = 1.0

    def weight_of(self, exemplar: Exemplar) -> float:
        return self.weights[exemplar.source_index]

    def scaled(self, k: float) -> "FuzzyWeightTable":
        """Every weight, the font weight included, multiplied by ``k``."""
        return replace(
            self,
            weights={i: w * k for i, w in self.weights.items()},
            font_weight=self.font_weight * k,
        )


def build_weight_table(pool: ExemplarPool) -> FuzzyWeightTable:
    if not pool.selected:
        raise EmptyPoolError(f"digit {pool.digit} has no selected exemplars", pool.digit)
    sims = [e.font_similarity for e in pool.selected]
    lo, hi = min(sims), max(sims)
    weights: dict[int, float] = {}
    for e in pool.selected:
        if e.source_index in weights:
            raise ValueError(f"duplicate exemplar source_index {e.source_index} in digit {pool.digit}")
        weights[e.source_index] = fuzzy_weight(e.font_similarity, lo, hi)
    return FuzzyWeightTable(pool.digit, lo, hi, weights)


def build_weight_tables(pools: Sequence[ExemplarPool]) -> list[FuzzyWeightTable | None]:
    """One table per pool; ``None`` where a pool selected nothing."""
    return [build_weight_table(p) if p.selected else None for p in pools]


def discounted_total(rewards: Sequence[float], gamma: float) -> float:
    """Finite-horizon ``sum(gamma**t * rewards[t])`` with t starting at 0."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
    total = 0.0
    for t, r in enumerate(rewards):
        total += gamma**t * r
    return total


@dataclass(frozen=True)
class RewardTrace:
    gamma: float
    rewards: tuple[float, ...]
    total: float

    @classmethod
    def from_rewards(cls, rewards: Sequence[float], gamma: float) -> "RewardTrace":
        return cls(gamma, tuple(float(r) for r in rewards), discounted_total(rewards, gamma))


def reward_trace(pool: ExemplarPool, table: FuzzyWeightTable | None, gamma: float, rounds: int) -> RewardTrace:
    """Per-round reward = summed fuzzy weight of that round's picks."""
    rewards = [0.0] * rounds
    if table is not None:
        for e in pool.selected:
            if 1 <= e.round <= rounds:
                rewards[e.round - 1] += table.weight_of(e)
    return RewardTrace.from_rewards(rewards, gamma)


def effective_weight(exemplar: Exemplar, table: FuzzyWeightTable, gamma: float = 1.0) -> float:
    """Fuzzy weight discounted by ``gamma ** (round - 1)``."""
    if exemplar.round < 1:
        raise ValueError("font templates carry no fuzzy weight")
    return gamma ** (exemplar.round - 1) * table.weight_of(exemplar)
