"""Run configuration: JSON round-trip and fingerprints."""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .classifier import AGGREGATES
from .errors import ConfigError
from .selection import SelectionConfig
from .ssim import SsimParams

# fields that change what training produces; the rest only affect evaluation
TRAINING_KEYS = ("images", "labels", "template_dir", "split_ratio", "per_digit_cap", "seed", "selection", "ssim")


@dataclass(frozen=True)
class RunConfig:
    images: str | None = None
    labels: str | None = None
    template_dir: str | None = None
    split_ratio: float = 0.8
    per_digit_cap: int = 1000
    seed: int = 0
    selection: SelectionConfig = field(default_factory=SelectionConfig)
    gamma: float = 1.0
    margin_threshold: float = 0.05
    aggregate: str = "mean"
    baseline_cap: int | None = None  # per-digit train subsample for the all-samples baselines
    output_dir: str = "out"
    base_dir: str | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not 0.0 < self.split_ratio < 1.0:
            raise ConfigError(f"split_ratio must lie in (0, 1), got {self.split_ratio}")
        if self.per_digit_cap < 1:
            raise ConfigError("per_digit_cap must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if not 0.0 <= self.gamma <= 1.0:
            raise ConfigError(f"gamma must lie in [0, 1], got {self.gamma}")
        if self.aggregate not in AGGREGATES:
            raise ConfigError(f"aggregate must be one of {AGGREGATES}, got {self.aggregate!r}")
        if self.baseline_cap is not None and self.baseline_cap < 1:
            raise ConfigError("baseline_cap must be positive when set")

    @property
    def ssim(self) -> SsimParams:
        return self.selection.ssim

    def resolve(self, path: str | None) -> Path | None:
        """Resolve a config path relative to the directory the config came from."""
        if path is None:
            return None
        p = Path(path)
        if not p.is_absolute() and self.base_dir is not None:
            p = Path(self.base_dir) / p
        return p

    def to_dict(self) -> dict:
        sel = self.selection
        return {
            "images": self.images,
            "labels": self.labels,
            "template_dir": self.template_dir,
            "split_ratio": self.split_ratio,
            "per_digit_cap": self.per_digit_cap,
            "seed": self.seed,
            "selection": {"threshold": sel.threshold, "rounds": sel.rounds, "template_count": sel.template_count},
            "ssim": dataclasses.asdict(sel.ssim),
            "gamma": self.gamma,
            "margin_threshold": self.margin_threshold,
            "aggregate": self.aggregate,
            "baseline_cap": self.baseline_cap,
            "output_dir": self.output_dir,
        }

    @classmethod
    def from_dict(cls, data: dict, base_dir: str | None = None) -> "RunConfig":
        data = dict(data)
        known = ({f.name for f in dataclasses.fields(cls)} - {"base_dir"}) | {"ssim"}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            ssim = SsimParams(**data.pop("ssim", {}))
            selection = SelectionConfig(ssim=ssim, **data.pop("selection", {}))
            return cls(selection=selection, base_dir=base_dir, **data)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid config: {exc}") from exc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def load(cls, path) -> "RunConfig":
        path = Path(path)
        try:
            data = json.loads(path.read_text())
        except FileNotFoundError:
            raise ConfigError(f"config file {path} not found") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
        return cls.from_dict(data, base_dir=str(path.parent))

    def save(self, path) -> None:
        Path(path).write_text(self.to_json())

    def with_overrides(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **{k: v for k, v in changes.items() if v is not None})


def _digest(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()).hexdigest()


def fingerprint(cfg: RunConfig) -> str:
    """Hash of the whole configuration (seed included), minus the output location."""
    d = cfg.to_dict()
    d.pop("output_dir")
    return _digest(d)


def training_fingerprint(cfg: RunConfig) -> str:
    """Hash of the fields that determine a trained model."""
    d = cfg.to_dict()
    return _digest({k: d[k] for k in TRAINING_KEYS})
