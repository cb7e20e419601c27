"""End-to-end steps shared by the CLI and the acceptance suite."""

from __future__ import annotations

from .config import RunConfig
from .errors import ConfigError
from .imagery import DIGITS, DatasetSplit, load_labeled, load_templates, split_dataset
from .model import Model
from .selection import train_all


def load_split(cfg: RunConfig) -> DatasetSplit:
    images, labels = cfg.resolve(cfg.images), cfg.resolve(cfg.labels)
    for name, p in (("images", images), ("labels", labels)):
        if p is None:
            raise ConfigError(f"config has no '{name}' path")
        if not p.is_file():
            raise ConfigError(f"{name} file {p} not found")
    data = load_labeled(images, labels)
    return split_dataset(data, cfg.split_ratio, cfg.per_digit_cap, cfg.seed, digits=DIGITS)


def load_fonts(cfg: RunConfig):
    root = cfg.resolve(cfg.template_dir)
    if root is None:
        raise ConfigError("config has no 'template_dir'")
    if not root.is_dir():
        raise ConfigError(f"template directory {root} not found")
    return load_templates(root)


def train_model(cfg: RunConfig, split: DatasetSplit | None = None, threads: int = 1) -> Model:
    split = split if split is not None else load_split(cfg)
    pools = train_all(split, load_fonts(cfg), cfg.selection, threads=threads)
    return Model.build(cfg, pools)
