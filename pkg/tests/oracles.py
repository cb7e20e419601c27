"""Straight-line reference computations the tests check the library against.

Nothing here imports the library's SSIM code; windows are built and walked
by hand.
"""

import math

import numpy as np

C1 = (0.01 * 255) ** 2
C2 = (0.03 * 255) ** 2


def stats_loop(x, y):
    """Population mean/variance/covariance by scalar loops."""
    xs = [float(v) for v in np.asarray(x).ravel()]
    ys = [float(v) for v in np.asarray(y).ravel()]
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    vx = sum((a - mx) ** 2 for a in xs) / n
    vy = sum((b - my) ** 2 for b in ys) / n
    cxy = sum((a - mx) * (b - my) for a, b in zip(xs, ys)) / n
    return mx, my, vx, vy, cxy


def ssim_formula(mx, my, vx, vy, cxy, c1=C1, c2=C2):
    return ((2 * mx * my + c1) * (2 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2))


def global_ssim_loop(x, y, c1=C1, c2=C2):
    return ssim_formula(*stats_loop(x, y), c1, c2)


def gaussian_window(size=11, sigma=1.5):
    half = (size - 1) / 2
    w = np.array(
        [[math.exp(-((i - half) ** 2 + (j - half) ** 2) / (2 * sigma * sigma)) for j in range(size)] for i in range(size)]
    )
    return w / w.sum()


def uniform_window(size):
    return np.full((size, size), 1.0 / (size * size))


def windowed_ssim_bruteforce(x, y, window, c1=C1, c2=C2):
    """Visit every interior window position and evaluate SSIM on it directly."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    k = window.shape[0]
    h, w = x.shape
    values = []
    for r in range(h - k + 1):
        for c in range(w - k + 1):
            px = x[r:r + k, c:c + k]
            py = y[r:r + k, c:c + k]
            mx = (window * px).sum()
            my = (window * py).sum()
            vx = (window * (px - mx) ** 2).sum()
            vy = (window * (py - my) ** 2).sum()
            cxy = (window * (px - mx) * (py - my)).sum()
            values.append(ssim_formula(mx, my, vx, vy, cxy, c1, c2))
    return sum(values) / len(values)


class PairCache:
    """Memoised pairwise SSIM oracle keyed by image bytes (windowed by default)."""

    def __init__(self, fn=None):
        self.fn = fn or (lambda a, b: windowed_ssim_bruteforce(a, b, gaussian_window()))
        self._memo = {}

    def __call__(self, a, b):
        ka, kb = a.tobytes(), b.tobytes()
        key = (ka, kb) if ka <= kb else (kb, ka)
        if key not in self._memo:
            self._memo[key] = self.fn(a.pixels, b.pixels)
        return self._memo[key]


def replay_selection(samples, fonts, threshold, rounds, sim):
    """Round-by-round selection written out longhand.

    Returns a list of (source_index, round, font_similarity) in pick order.
    """
    pool = list(fonts)
    remaining = list(samples)
    picks = []
    for rnd in range(1, rounds + 1):
        frozen = list(pool)
        keep = []
        chosen = []
        for cand in remaining:
            total = 0.0
            for member in frozen:
                total += sim(cand.image, member)
            if total / len(frozen) > threshold:
                chosen.append(cand)
            else:
                keep.append(cand)
        for cand in chosen:
            fs = sum(sim(cand.image, f) for f in fonts) / len(fonts)
            picks.append((cand.index, rnd, fs))
            pool.append(cand.image)
        remaining = keep
    return picks
