"""Round-based exemplar selection seeded by font templates.

Each digit starts with a pool holding only its font templates. In every
round, each remaining training sample is scored by its mean SSIM against
the pool as it stood at the start of the round; samples scoring strictly
above the threshold become exemplars and join the pool for later rounds.
An exemplar's stored ``font_similarity`` is always measured against the
fonts alone.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import ConfigError, EmptyPoolError
from .imagery import DIGITS, DatasetSplit, GrayImage, LabeledImage
from .ssim import ComparandStack, SsimParams


@dataclass(frozen=True)
class Exemplar:
    image: GrayImage
    digit: int
    font_similarity: float
    round: int
    source_index: int = -1

    def __post_init__(self):
        if self.round < 0:
            raise ValueError("round must be non-negative")


@dataclass
class ExemplarPool:
    digit: int
    fonts: list[GrayImage]
    selected: list[Exemplar] = field(default_factory=list)
    font_names: list[str] = field(default_factory=list)

    def members(self) -> list[GrayImage]:
        return list(self.fonts) + [e.image for e in self.selected]

    def __len__(self) -> int:
        return len(self.fonts) + len(self.selected)

    def round_counts(self, rounds: int) -> list[int]:
        counts = [0] * rounds
        for e in self.selected:
            if 1 <= e.round <= rounds:
                counts[e.round - 1] += 1
        return counts


@dataclass(frozen=True)
class SelectionConfig:
    threshold: float = 0.40
    rounds: int = 5
    ssim: SsimParams = field(default_factory=SsimParams)
    template_count: int | None = 10

    def __post_init__(self):
        if not 0.0 < self.threshold < 1.0:
            raise ValueError(f"threshold must lie in (0, 1), got {self.threshold}")
        if self.rounds < 1:
            raise ValueError("rounds must be at least 1")


def mean_pool_similarity(candidate: GrayImage, pool: ExemplarPool, params: SsimParams) -> float:
    if len(pool) == 0:
        raise EmptyPoolError(f"pool for digit {pool.digit} is empty", pool.digit)
    return float(ComparandStack(pool.members(), params).similarity(candidate).mean())


def pool_scores(candidates: Sequence[GrayImage], stack: ComparandStack) -> np.ndarray:
    """Mean similarity of each candidate to every member of ``stack``."""
    return np.array([stack.similarity(c).mean() for c in candidates], dtype=np.float64)


def run_round(
    candidates: Sequence[LabeledImage],
    pool: ExemplarPool,
    cfg: SelectionConfig,
    round: int,
    font_stack: ComparandStack | None = None,
) -> tuple[list[Exemplar], list[LabeledImage]]:
    """Score candidates against the frozen pool; the pool itself is left untouched."""
    if not 1 <= round <= cfg.rounds:
        raise ValueError(f"round {round} outside 1..{cfg.rounds}")
    if len(pool) == 0:
        raise EmptyPoolError(f"pool for digit {pool.digit} is empty", pool.digit)
    if not candidates:
        return [], []
    for c in candidates:
        if c.label != pool.digit:
            raise ValueError(f"candidate {c.index} is labelled {c.label}, pool is digit {pool.digit}")

    scores = pool_scores([c.image for c in candidates], ComparandStack(pool.members(), cfg.ssim))
    if font_stack is None:
        font_stack = ComparandStack(pool.fonts, cfg.ssim)
    selected, rejected = [], []
    for cand, score in zip(candidates, scores):
        if score > cfg.threshold:
            sim = float(font_stack.similarity(cand.image).mean()) if len(font_stack) else float("nan")
            selected.append(Exemplar(cand.image, pool.digit, sim, round, cand.index))
        else:
            rejected.append(cand)
    return selected, rejected


def train_digit(
    train_samples: Sequence[LabeledImage],
    fonts: Sequence[GrayImage],
    cfg: SelectionConfig,
    digit: int | None = None,
    font_names: Sequence[str] | None = None,
) -> ExemplarPool:
    if not fonts:
        raise EmptyPoolError("no font templates supplied", digit)
    if cfg.template_count is not None and len(fonts) != cfg.template_count:
        raise ConfigError(f"expected {cfg.template_count} templates for digit {digit}, got {len(fonts)}")
    if digit is None:
        if not train_samples:
            raise ValueError("digit must be given when there are no training samples")
        digit = train_samples[0].label
    pool = ExemplarPool(digit, list(fonts), [], list(font_names or []))
    font_stack = ComparandStack(pool.fonts, cfg.ssim)
    remaining = list(train_samples)
    for r in range(1, cfg.rounds + 1):
        picked, remaining = run_round(remaining, pool, cfg, r, font_stack)
        pool.selected.extend(picked)
    return pool


def train_all(
    split: DatasetSplit,
    templates: Mapping[int, tuple[Sequence[str], Sequence[GrayImage]]] | Sequence[Sequence[GrayImage]],
    cfg: SelectionConfig,
    threads: int = 1,
) -> list[ExemplarPool]:
    """Train one pool per digit. ``templates`` maps digit to ``(names, images)``
    or is a plain per-digit list of images."""

    def fonts_for(d):
        if isinstance(templates, Mapping):
            entry = templates.get(d, ())
        else:
            entry = templates[d] if d < len(templates) else ()
        if isinstance(entry, tuple) and len(entry) == 2 and isinstance(entry[1], (list, tuple)):
            return list(entry[0]), list(entry[1])
        return [], list(entry)

    jobs = []
    for d in DIGITS:
        names, fonts = fonts_for(d)
        if not fonts:
            raise ConfigError(f"no templates for digit {d} (expected templates/{d})")
        jobs.append((split.train[d], fonts, cfg, d, names))

    if threads <= 1:
        return [train_digit(*job) for job in jobs]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(lambda job: train_digit(*job), jobs))


def reference_pool(
    samples: Sequence[LabeledImage],
    fonts: Sequence[GrayImage],
    params: SsimParams,
    digit: int,
    font_names: Sequence[str] = (),
) -> ExemplarPool:
    """A pool holding every given sample, unselected, each with its font similarity.

    Used by the baselines that compare against the whole training set. Every
    sample is tagged round 1 so no discount applies to it.
    """
    font_stack = ComparandStack(list(fonts), params)
    selected = [
        Exemplar(s.image, digit, float(font_stack.similarity(s.image).mean()), 1, s.index)
        for s in samples
    ]
    return ExemplarPool(digit, list(fonts), selected, list(font_names))
