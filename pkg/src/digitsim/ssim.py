"""Structural similarity between grayscale images.

Two forms are provided. ``ssim_global`` evaluates the SSIM formula once on
whole-image statistics. ``ssim_windowed`` averages the same formula over
every fully interior window, with moments weighted by a normalised
(Gaussian or uniform) kernel. Intensities stay on their native [0, L] scale
and all statistics are population (1/N) statistics.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from . import kernels
from .errors import DimensionError, WindowError
from .imagery import GrayImage

ImageLike = Union[GrayImage, np.ndarray]

MODES = ("windowed", "global")
KERNELS = ("gaussian", "uniform")


@dataclass(frozen=True)
class SsimParams:
    dynamic_range: float = 255.0
    k1: float = 0.01
    k2: float = 0.03
    mode: str = "windowed"
    window_radius: int = 5
    window_sigma: float = 1.5
    kernel: str = "gaussian"
    window_size: int | None = None  # overrides 2 * radius + 1 (allows even sizes)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.kernel not in KERNELS:
            raise ValueError(f"kernel must be one of {KERNELS}, got {self.kernel!r}")
        if not (self.k1 > 0 and self.k2 > 0 and self.dynamic_range > 0):
            raise ValueError("k1, k2 and dynamic_range must be positive")
        if self.window_radius < 0 or self.window_sigma <= 0:
            raise ValueError("window_radius must be >= 0 and window_sigma > 0")
        if self.window_size is not None and self.window_size < 1:
            raise ValueError("window_size must be positive")

    @property
    def c1(self) -> float:
        return (self.k1 * self.dynamic_range) ** 2

    @property
    def c2(self) -> float:
        return (self.k2 * self.dynamic_range) ** 2

    @property
    def size(self) -> int:
        return self.window_size if self.window_size is not None else 2 * self.window_radius + 1

    def taps(self) -> np.ndarray:
        """1-D window taps; the 2-D window is their outer product and sums to 1."""
        n = self.size
        if self.kernel == "uniform":
            return np.full(n, 1.0 / n)
        offsets = np.arange(n) - (n - 1) / 2.0
        g = np.exp(-(offsets**2) / (2.0 * self.window_sigma**2))
        return g / g.sum()

    def window(self) -> np.ndarray:
        t = self.taps()
        return np.outer(t, t)


@dataclass(frozen=True)
class ImageStats:
    mu_x: float
    mu_y: float
    var_x: float
    var_y: float
    cov_xy: float


def _as_float(img: ImageLike) -> np.ndarray:
    if isinstance(img, GrayImage):
        return img.as_float()
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 2:
        raise DimensionError(f"expected a 2-D image, got shape {arr.shape}")
    return arr


def _pair(x: ImageLike, y: ImageLike) -> tuple[np.ndarray, np.ndarray]:
    a, b = _as_float(x), _as_float(y)
    if a.shape != b.shape:
        raise DimensionError(f"image shapes differ: {a.shape} vs {b.shape}")
    return a, b


def compute_stats(x: ImageLike, y: ImageLike) -> ImageStats:
    a, b = _pair(x, y)
    mu_x, mu_y = a.mean(), b.mean()
    dx, dy = a - mu_x, b - mu_y
    return ImageStats(
        mu_x=float(mu_x),
        mu_y=float(mu_y),
        var_x=float((dx * dx).mean()),
        var_y=float((dy * dy).mean()),
        cov_xy=float((dx * dy).mean()),
    )


def ssim_from_stats(s: ImageStats, params: SsimParams) -> float:
    c1, c2 = params.c1, params.c2
    num = (2.0 * s.mu_x * s.mu_y + c1) * (2.0 * s.cov_xy + c2)
    den = (s.mu_x**2 + s.mu_y**2 + c1) * (s.var_x + s.var_y + c2)
    return num / den


def ssim_global(x: ImageLike, y: ImageLike, params: SsimParams = SsimParams()) -> float:
    return ssim_from_stats(compute_stats(x, y), params)


def _check_window(shape: tuple[int, ...], params: SsimParams) -> None:
    if params.size > shape[-2] or params.size > shape[-1]:
        raise WindowError(f"{params.size}x{params.size} window does not fit a {shape[-2]}x{shape[-1]} image")


def ssim_windowed(x: ImageLike, y: ImageLike, params: SsimParams = SsimParams()) -> float:
    a, b = _pair(x, y)
    return float(ComparandStack([b], params, mode="windowed").similarity(a)[0])


def ssim(x: ImageLike, y: ImageLike, params: SsimParams = SsimParams()) -> float:
    """SSIM in whichever form ``params.mode`` selects."""
    if params.mode == "global":
        return ssim_global(x, y, params)
    return ssim_windowed(x, y, params)


class ComparandStack:
    """A fixed set of comparand images with their window moments precomputed.

    ``similarity(probe)`` returns SSIM of the probe against every comparand,
    in stack order.
    """

    def __init__(self, images: Sequence[ImageLike] | np.ndarray, params: SsimParams, mode: str | None = None):
        self.params = params
        self.mode = mode or params.mode
        if isinstance(images, np.ndarray) and images.ndim == 3:
            stack = np.ascontiguousarray(images, dtype=np.float64)
        elif len(images) == 0:
            stack = np.zeros((0, 0, 0))
        else:
            stack = np.ascontiguousarray(np.stack([_as_float(im) for im in images]))
        self.stack = stack
        self.taps = params.taps()
        self.mu = self.sq = None
        if self.mode == "windowed" and len(stack):
            _check_window(stack.shape, params)
            self.mu, self.sq = kernels.windowed_moments(stack, self.taps)

    def __len__(self) -> int:
        return self.stack.shape[0]

    def similarity(self, probe: ImageLike) -> np.ndarray:
        x = np.ascontiguousarray(_as_float(probe))
        n = len(self)
        if n == 0:
            return np.zeros(0)
        if x.shape != self.stack.shape[1:]:
            raise DimensionError(f"probe shape {x.shape} vs comparand shape {self.stack.shape[1:]}")
        p = self.params
        if self.mode == "global":
            return kernels.global_ssim_batch(x, self.stack, p.c1, p.c2)
        mu_x, sq_x = kernels.windowed_moments(x[None], self.taps)
        return kernels.windowed_ssim_batch(x, mu_x[0], sq_x[0], self.stack, self.mu, self.sq, self.taps, p.c1, p.c2)

