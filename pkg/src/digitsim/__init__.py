"""Handwritten digit recognition by SSIM against self-grown exemplar pools."""

__version__ = "0.1.0"

from .classifier import AblationMode, ClassificationResult, Classifier, classify, score_digit
from .config import RunConfig
from .errors import (
    ConfigError,
    DigitSimError,
    DimensionError,
    EmptyClassError,
    EmptyPoolError,
    FormatError,
    LabelRangeError,
    RangeError,
    StaleModelError,
    TruncationError,
    WindowError,
)
from .fuzzy import FuzzyWeightTable, RewardTrace, build_weight_table, discounted_total, effective_weight, fuzzy_weight
from .imagery import GrayImage, LabeledImage, DatasetSplit, load_idx_images, load_idx_labels, load_pgm, split_dataset, write_pgm
from .selection import Exemplar, ExemplarPool, SelectionConfig, mean_pool_similarity, run_round, train_all, train_digit
from .ssim import ImageStats, SsimParams, compute_stats, ssim, ssim_global, ssim_windowed
