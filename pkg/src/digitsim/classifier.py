"""Weighted nearest-pool classification and the four ablation modes."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EmptyPoolError
from .fuzzy import FuzzyWeightTable, effective_weight
from .imagery import DIGITS, GrayImage
from .selection import ExemplarPool
from .ssim import ComparandStack, ImageLike, SsimParams

AGGREGATES = ("mean", "max")


class AblationMode(str, enum.Enum):
    SSIM_ONLY = "ssim"
    FUZZY_ONLY = "fuzzy"
    RL_ONLY = "rl"
    FULL = "full"

    @property
    def uses_all_training(self) -> bool:
        return self in (AblationMode.SSIM_ONLY, AblationMode.FUZZY_ONLY)

    @property
    def weighted(self) -> bool:
        return self in (AblationMode.FUZZY_ONLY, AblationMode.FULL)

    @classmethod
    def parse(cls, value: "str | AblationMode") -> "AblationMode":
        if isinstance(value, cls):
            return value
        aliases = {"ssimonly": "ssim", "fuzzyonly": "fuzzy", "rlonly": "rl"}
        key = str(value).strip().lower().replace("_", "").replace("-", "")
        return cls(aliases.get(key, key))


ALL_MODES = (AblationMode.SSIM_ONLY, AblationMode.FUZZY_ONLY, AblationMode.RL_ONLY, AblationMode.FULL)


@dataclass(frozen=True)
class ClassificationResult:
    scores: tuple[float, ...]
    predicted: int
    runner_up: int
    margin: float
    uncertain: bool

    def to_dict(self) -> dict:
        return {
            "scores": list(self.scores),
            "predicted": self.predicted,
            "runner_up": self.runner_up,
            "margin": self.margin,
            "uncertain": self.uncertain,
        }


class DigitScorer:
    """Comparands of one digit with their weights, ready for repeated scoring."""

    def __init__(
        self,
        pool: ExemplarPool,
        table: FuzzyWeightTable | None,
        mode: AblationMode,
        gamma: float = 1.0,
        params: SsimParams = SsimParams(),
        aggregate: str = "mean",
    ):
        if aggregate not in AGGREGATES:
            raise ValueError(f"aggregate must be one of {AGGREGATES}")
        mode = AblationMode.parse(mode)
        self.digit = pool.digit
        self.aggregate = aggregate
        images = pool.members()
        if not images:
            raise EmptyPoolError(f"digit {pool.digit} has nothing to compare against", pool.digit)
        if mode.weighted and pool.selected:
            if table is None:
                raise ValueError(f"mode {mode.value} needs a weight table for digit {pool.digit}")
            font_w = table.font_weight
            ex_w = [effective_weight(e, table, gamma) for e in pool.selected]
        else:
            font_w = table.font_weight if (mode.weighted and table is not None) else 1.0
            ex_w = [1.0] * len(pool.selected)
        self.weights = np.array([font_w] * len(pool.fonts) + ex_w, dtype=np.float64)
        self.stack = ComparandStack(images, params)

    def score(self, test: ImageLike) -> float:
        vals = self.stack.similarity(test) * self.weights
        if self.aggregate == "max":
            return float(vals.max())
        return float(vals.sum() / vals.shape[0])


def score_digit(
    test: ImageLike,
    pool: ExemplarPool,
    table: FuzzyWeightTable | None,
    mode: AblationMode,
    gamma: float = 1.0,
    params: SsimParams = SsimParams(),
    aggregate: str = "mean",
) -> float:
    return DigitScorer(pool, table, mode, gamma, params, aggregate).score(test)


def rank(scores: Sequence[float], margin_threshold: float) -> ClassificationResult:
    order = sorted(range(len(scores)), key=lambda d: (-scores[d], d))
    top, second = order[0], order[1]
    margin = float(scores[top] - scores[second])
    return ClassificationResult(tuple(float(s) for s in scores), top, second, margin, margin < margin_threshold)


class Classifier:
    """Scores a test image against all ten digit pools."""

    def __init__(
        self,
        pools: Sequence[ExemplarPool],
        tables: Sequence[FuzzyWeightTable | None],
        mode: AblationMode = AblationMode.FULL,
        gamma: float = 1.0,
        params: SsimParams = SsimParams(),
        margin_threshold: float = 0.05,
        aggregate: str = "mean",
    ):
        if len(pools) != len(DIGITS) or len(tables) != len(DIGITS):
            raise ValueError("need exactly one pool and one table slot per digit")
        self.mode = AblationMode.parse(mode)
        self.margin_threshold = margin_threshold
        self.scorers = [
            DigitScorer(pool, table, self.mode, gamma, params, aggregate)
            for pool, table in zip(pools, tables)
        ]

    def classify(self, test: ImageLike) -> ClassificationResult:
        return rank([s.score(test) for s in self.scorers], self.margin_threshold)

    __call__ = classify


def classify(
    test: GrayImage,
    pools: Sequence[ExemplarPool],
    tables: Sequence[FuzzyWeightTable | None],
    mode: AblationMode = AblationMode.FULL,
    gamma: float = 1.0,
    params: SsimParams = SsimParams(),
    margin_threshold: float = 0.05,
    aggregate: str = "mean",
) -> ClassificationResult:
    return Classifier(pools, tables, mode, gamma, params, margin_threshold, aggregate).classify(test)
