"""Image containers, file ingestion (IDX, binary PGM) and the seeded split."""

from __future__ import annotations

import gzip
import math
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    ConfigError,
    DimensionError,
    EmptyClassError,
    FormatError,
    LabelRangeError,
    TruncationError,
)

SIDE = 28
DIGITS = tuple(range(10))

IDX_IMAGE_MAGIC = 2051
IDX_LABEL_MAGIC = 2049


class GrayImage:
    """An 8-bit grayscale raster, stored row-major as a ``uint8`` array."""

    __slots__ = ("_pixels",)

    def __init__(self, pixels):
        arr = np.asarray(pixels)
        if arr.ndim == 1 and arr.size == SIDE * SIDE:
            arr = arr.reshape(SIDE, SIDE)
        if arr.ndim != 2:
            raise DimensionError(f"expected a 2-D raster, got shape {arr.shape}")
        if arr.dtype != np.uint8:
            if arr.size and (arr.min() < 0 or arr.max() > 255):
                raise ValueError("pixel intensities must lie in [0, 255]")
            if not np.all(arr == np.round(arr)):
                raise ValueError("pixel intensities must be integral")
            arr = arr.astype(np.uint8)
        arr = np.ascontiguousarray(arr)
        arr.flags.writeable = False
        self._pixels = arr

    @property
    def pixels(self) -> np.ndarray:
        return self._pixels

    @property
    def height(self) -> int:
        return self._pixels.shape[0]

    @property
    def width(self) -> int:
        return self._pixels.shape[1]

    def as_float(self) -> np.ndarray:
        return self._pixels.astype(np.float64)

    def tobytes(self) -> bytes:
        return self._pixels.tobytes()

    @classmethod
    def frombytes(cls, raw: bytes, height: int = SIDE, width: int = SIDE) -> "GrayImage":
        if len(raw) != height * width:
            raise DimensionError(f"expected {height * width} bytes, got {len(raw)}")
        return cls(np.frombuffer(raw, dtype=np.uint8).reshape(height, width))

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return np.array_equal(self._pixels, other._pixels)

    def __hash__(self):
        return hash((self._pixels.shape, self._pixels.tobytes()))

    def __repr__(self):
        return f"GrayImage({self.height}x{self.width}, mean={self._pixels.mean():.1f})"


@dataclass(frozen=True)
class LabeledImage:
    image: GrayImage
    label: int
    index: int = -1  # position in the source dataset

    def __post_init__(self):
        if self.label not in DIGITS:
            raise LabelRangeError(f"label {self.label} is not a digit")


@dataclass
class DatasetSplit:
    train: list[list[LabeledImage]] = field(default_factory=lambda: [[] for _ in DIGITS])
    test: list[list[LabeledImage]] = field(default_factory=lambda: [[] for _ in DIGITS])
    seed: int = 0

    def train_count(self) -> int:
        return sum(len(v) for v in self.train)

    def test_count(self) -> int:
        return sum(len(v) for v in self.test)


def _read_bytes(path) -> bytes:
    path = Path(path)
    if path.suffix == ".gz":
        with gzip.open(path, "rb") as f:
            return f.read()
    return path.read_bytes()


def load_idx_images(path) -> list[GrayImage]:
    """Read an IDX3 image file (optionally gzip-compressed)."""
    raw = _read_bytes(path)
    if len(raw) < 4 or struct.unpack(">I", raw[:4])[0] != IDX_IMAGE_MAGIC:
        raise FormatError(f"{path}: not an IDX image file (bad magic)")
    if len(raw) < 16:
        raise TruncationError(f"{path}: header truncated")
    count, rows, cols = struct.unpack(">III", raw[4:16])
    if (rows, cols) != (SIDE, SIDE):
        raise DimensionError(f"{path}: images are {rows}x{cols}, expected {SIDE}x{SIDE}")
    need = 16 + count * rows * cols
    if len(raw) < need:
        raise TruncationError(f"{path}: payload holds {len(raw) - 16} bytes, header promises {need - 16}")
    if len(raw) > need:
        raise FormatError(f"{path}: {len(raw) - need} trailing bytes after payload")
    data = np.frombuffer(raw, dtype=np.uint8, offset=16).reshape(count, rows, cols)
    return [GrayImage(img) for img in data]


def load_idx_labels(path) -> list[int]:
    raw = _read_bytes(path)
    if len(raw) < 4 or struct.unpack(">I", raw[:4])[0] != IDX_LABEL_MAGIC:
        raise FormatError(f"{path}: not an IDX label file (bad magic)")
    if len(raw) < 8:
        raise TruncationError(f"{path}: header truncated")
    (count,) = struct.unpack(">I", raw[4:8])
    if len(raw) < 8 + count:
        raise TruncationError(f"{path}: {len(raw) - 8} labels present, header promises {count}")
    if len(raw) > 8 + count:
        raise FormatError(f"{path}: {len(raw) - 8 - count} trailing bytes after payload")
    labels = raw[8:]
    bad = [b for b in labels if b > 9]
    if bad:
        raise LabelRangeError(f"{path}: label byte {bad[0]} is not a digit")
    return list(labels)


def load_labeled(images_path, labels_path) -> list[LabeledImage]:
    images = load_idx_images(images_path)
    labels = load_idx_labels(labels_path)
    if len(images) != len(labels):
        raise FormatError(f"{len(images)} images but {len(labels)} labels")
    return [LabeledImage(img, lab, i) for i, (img, lab) in enumerate(zip(images, labels))]


def _pgm_tokens(raw: bytes, n: int, path) -> tuple[list[bytes], int]:
    """Pull ``n`` whitespace-separated header tokens, skipping ``#`` comments."""
    tokens: list[bytes] = []
    pos = 0
    while len(tokens) < n:
        while pos < len(raw) and raw[pos:pos + 1].isspace():
            pos += 1
        if pos < len(raw) and raw[pos:pos + 1] == b"#":
            while pos < len(raw) and raw[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(raw) and not raw[pos:pos + 1].isspace() and raw[pos:pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise FormatError(f"{path}: PGM header truncated")
        tokens.append(raw[start:pos])
    return tokens, pos


def load_pgm(path) -> GrayImage:
    """Read a binary (P5) 28x28 PGM with maxval 255."""
    raw = Path(path).read_bytes()
    if raw[:2] != b"P5":
        raise FormatError(f"{path}: not a binary PGM (magic {raw[:2]!r})")
    tokens, pos = _pgm_tokens(raw, 4, path)
    try:
        width, height, maxval = (int(t) for t in tokens[1:4])
    except ValueError:
        raise FormatError(f"{path}: malformed PGM header") from None
    if maxval != 255:
        raise FormatError(f"{path}: maxval {maxval}, expected 255")
    if (width, height) != (SIDE, SIDE):
        raise FormatError(f"{path}: {width}x{height} image, expected {SIDE}x{SIDE}")
    if pos >= len(raw) or not raw[pos:pos + 1].isspace():
        raise FormatError(f"{path}: missing whitespace after PGM header")
    body = raw[pos + 1:]
    if len(body) < width * height:
        raise TruncationError(f"{path}: {len(body)} pixel bytes, expected {width * height}")
    return GrayImage.frombytes(body[:width * height], height, width)


def write_pgm(path, image: GrayImage) -> None:
    header = f"P5\n{image.width} {image.height}\n255\n".encode("ascii")
    Path(path).write_bytes(header + image.tobytes())


def load_templates(template_dir, digits: Iterable[int] = DIGITS) -> dict[int, tuple[list[str], list[GrayImage]]]:
    """Load ``<template_dir>/<digit>/*.pgm``; returns ``{digit: (names, images)}``.

    Files are taken in sorted name order so pools are reproducible.
    """
    root = Path(template_dir)
    out = {}
    for d in digits:
        sub = root / str(d)
        if not sub.is_dir():
            raise ConfigError(f"missing template directory {sub}")
        files = sorted(sub.glob("*.pgm"))
        if not files:
            raise ConfigError(f"template directory {sub} holds no .pgm files")
        out[d] = ([f.stem for f in files], [load_pgm(f) for f in files])
    return out


def _digit_rng(seed: int, digit: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(digit,))))


def split_dataset(
    images: Sequence[LabeledImage],
    ratio: float = 0.8,
    per_digit_cap: int = 1000,
    seed: int = 0,
    digits: Iterable[int] | None = None,
) -> DatasetSplit:
    """Shuffle each digit's samples, cap them, and cut train/test at ``floor(ratio * n)``.

    ``digits`` lists the classes that must be present; by default, whichever
    labels occur in ``images``.
    """
    if not 0.0 < ratio < 1.0:
        raise ValueError(f"ratio must lie in (0, 1), got {ratio}")
    if per_digit_cap < 1:
        raise ValueError("per_digit_cap must be at least 1")
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    by_digit: list[list[LabeledImage]] = [[] for _ in DIGITS]
    for item in images:
        by_digit[item.label].append(item)
    wanted = sorted(set(digits)) if digits is not None else [d for d in DIGITS if by_digit[d]]
    if not wanted:
        raise EmptyClassError("no samples to split")

    split = DatasetSplit(seed=seed)
    for d in wanted:
        pool = by_digit[d]
        if not pool:
            raise EmptyClassError(f"digit {d} has no samples")
        order = _digit_rng(seed, d).permutation(len(pool))[:per_digit_cap]
        n_train = math.floor(ratio * len(order) + 1e-9)
        split.train[d] = [pool[i] for i in order[:n_train]]
        split.test[d] = [pool[i] for i in order[n_train:]]
    return split
