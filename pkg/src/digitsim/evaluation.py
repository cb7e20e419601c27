"""Ablation harness: accuracy, confusion matrices and report files."""

from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .classifier import ALL_MODES, AblationMode, Classifier, ClassificationResult
from .config import RunConfig, fingerprint, training_fingerprint
from .errors import StaleModelError
from .fuzzy import FuzzyWeightTable, build_weight_tables
from .imagery import DIGITS, DatasetSplit
from .model import Model
from .selection import ExemplarPool, reference_pool


@dataclass
class EvalReport:
    mode: AblationMode
    n_samples: int
    accuracy: float | None
    confusion: list[list[int]]
    uncertain_count: int
    per_digit_accuracy: list[float | None]
    config_fingerprint: str
    wall_time: float = field(default=0.0, compare=False)

    def to_dict(self, timing: bool = False) -> dict:
        d = {
            "mode": self.mode.value,
            "n_samples": self.n_samples,
            "accuracy": self.accuracy,
            "confusion": self.confusion,
            "uncertain_count": self.uncertain_count,
            "per_digit_accuracy": self.per_digit_accuracy,
            "config_fingerprint": self.config_fingerprint,
        }
        if timing:
            d["wall_time"] = self.wall_time
        return d


def baseline_pools(split: DatasetSplit, model: Model, cfg: RunConfig) -> list[ExemplarPool]:
    """Pools holding every training sample (up to ``cfg.baseline_cap`` per digit)."""
    cap = cfg.baseline_cap
    return [
        reference_pool(split.train[d][:cap] if cap else split.train[d], pool.fonts, cfg.ssim, d, pool.font_names)
        for d, pool in zip(DIGITS, model.pools)
    ]


def _report(mode, results: Sequence[ClassificationResult], truths: Sequence[int], fp: str, wall: float) -> EvalReport:
    confusion = np.zeros((10, 10), dtype=np.int64)
    for res, t in zip(results, truths):
        confusion[t, res.predicted] += 1
    n = int(confusion.sum())
    rows = confusion.sum(axis=1)
    per_digit = [float(confusion[d, d] / rows[d]) if rows[d] else None for d in DIGITS]
    return EvalReport(
        mode=mode,
        n_samples=n,
        accuracy=float(np.trace(confusion) / n) if n else None,
        confusion=confusion.tolist(),
        uncertain_count=sum(r.uncertain for r in results),
        per_digit_accuracy=per_digit,
        config_fingerprint=fp,
        wall_time=wall,
    )


def evaluate(
    mode: AblationMode | str,
    split: DatasetSplit,
    model: Model,
    cfg: RunConfig,
    threads: int = 1,
    pools: Sequence[ExemplarPool] | None = None,
    tables: Sequence[FuzzyWeightTable | None] | None = None,
) -> EvalReport:
    """Classify every test sample of ``split`` under ``mode``.

    ``pools``/``tables`` override what the mode would otherwise use (the
    model's pools, or all-training baseline pools).
    """
    mode = AblationMode.parse(mode)
    if model.fingerprint != training_fingerprint(cfg):
        raise StaleModelError("model was trained under a different configuration; retrain it")
    start = time.perf_counter()
    if pools is None:
        if mode.uses_all_training:
            pools = baseline_pools(split, model, cfg)
            tables = build_weight_tables(pools)
        else:
            pools, tables = model.pools, model.tables
    elif tables is None:
        tables = build_weight_tables(pools)
    clf = Classifier(pools, tables, mode, cfg.gamma, cfg.ssim, cfg.margin_threshold, cfg.aggregate)

    samples = [item for d in DIGITS for item in split.test[d]]
    images = [s.image for s in samples]
    if threads <= 1:
        results = [clf.classify(img) for img in images]
    else:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(clf.classify, images))
    return _report(mode, results, [s.label for s in samples], fingerprint(cfg), time.perf_counter() - start)


def compare_modes(
    split: DatasetSplit,
    model: Model,
    cfg: RunConfig,
    modes: Iterable[AblationMode | str] = ALL_MODES,
    threads: int = 1,
) -> list[EvalReport]:
    return [evaluate(m, split, model, cfg, threads) for m in modes]


def format_table(reports: Sequence[EvalReport], timing: bool = True) -> str:
    head = f"{'mode':<6} {'n':>6} {'accuracy':>9} {'uncertain':>9}" + (f" {'seconds':>8}" if timing else "")
    lines = [head]
    for r in reports:
        acc = "-" if r.accuracy is None else f"{r.accuracy:.4f}"
        line = f"{r.mode.value:<6} {r.n_samples:>6} {acc:>9} {r.uncertain_count:>9}"
        if timing:
            line += f" {r.wall_time:>8.2f}"
        lines.append(line)
    return "\n".join(lines)


def write_reports(reports: Sequence[EvalReport], out_dir) -> list[Path]:
    """Write report.json, report.csv and one confusion_<mode>.csv per report.

    Wall times are left out so reruns produce identical files.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = [out / "report.json", out / "report.csv"]
    written[0].write_text(json.dumps({"reports": [r.to_dict() for r in reports]}, indent=1) + "\n")
    with open(written[1], "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["mode", "accuracy", *[f"acc_{d}" for d in DIGITS]])
        for r in reports:
            w.writerow([r.mode.value, _cell(r.accuracy), *[_cell(a) for a in r.per_digit_accuracy]])
    for r in reports:
        path = out / f"confusion_{r.mode.value}.csv"
        with open(path, "w", newline="") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(["true\\pred", *DIGITS])
            for d, row in zip(DIGITS, r.confusion):
                w.writerow([d, *row])
        written.append(path)
    return written


def _cell(v: float | None) -> str:
    return "" if v is None else repr(v)


def load_reports(path) -> list[EvalReport]:
    data = json.loads(Path(path).read_text())
    return [
        EvalReport(
            mode=AblationMode(r["mode"]),
            n_samples=r["n_samples"],
            accuracy=r["accuracy"],
            confusion=r["confusion"],
            uncertain_count=r["uncertain_count"],
            per_digit_accuracy=r["per_digit_accuracy"],
            config_fingerprint=r["config_fingerprint"],
            wall_time=r.get("wall_time", 0.0),
        )
        for r in data["reports"]
    ]
