from pathlib import Path

import numpy as np
import pytest

from digitsim.config import RunConfig
from digitsim.imagery import GrayImage, LabeledImage, load_templates
from digitsim.pipeline import load_split, train_model

DATA = Path(__file__).parent / "data"
IMAGES = DATA / "mnist5k-images-idx3-ubyte.gz"
LABELS = DATA / "mnist5k-labels-idx1-ubyte.gz"
TEMPLATES = DATA / "templates"

# 100 train / 50 test per digit
DESK = dict(split_ratio=2 / 3, per_digit_cap=150, seed=1)

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_image(rng, lo=0, hi=256, shape=(28, 28)) -> GrayImage:
    return GrayImage(rng.integers(lo, hi, size=shape, dtype=np.int64).astype(np.uint8))


def labeled(img, label, index) -> LabeledImage:
    return LabeledImage(img if isinstance(img, GrayImage) else GrayImage(img), label, index)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def templates():
    return load_templates(TEMPLATES)


def desk_config(tmp_path=None, **overrides) -> RunConfig:
    params = dict(
        images=str(IMAGES),
        labels=str(LABELS),
        template_dir=str(TEMPLATES),
        output_dir=str(tmp_path) if tmp_path else "out",
        **DESK,
    )
    params.update(overrides)
    return RunConfig(**params)


@pytest.fixture(scope="session")
def desk_cfg():
    return desk_config()


@pytest.fixture(scope="session")
def desk_split(desk_cfg):
    return load_split(desk_cfg)


@pytest.fixture(scope="session")
def desk_model(desk_cfg, desk_split):
    return train_model(desk_cfg, desk_split)
