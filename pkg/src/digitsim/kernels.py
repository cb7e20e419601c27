"""Hot SSIM kernels: one probe image against a stack of comparands.

Every kernel exists twice, a vectorised numpy version (``*_np``) and a
loop version compiled with numba (``*_nb``). The public names at the bottom
are bound to one or the other by :mod:`digitsim._accel`. Both versions
accumulate in the same fixed raster order so they agree to rounding.

Windowed kernels work on "valid" windows only; a separable window is given
as a 1-D array of taps summing to one.
"""

import numpy as np

from ._accel import USE_NUMBA, njit


# -- numpy -------------------------------------------------------------------


def filter_valid_np(a, taps):
    """Separable correlation of ``a[..., H, W]`` with ``outer(taps, taps)``."""
    k = taps.shape[0]
    oh = a.shape[-2] - k + 1
    ow = a.shape[-1] - k + 1
    rows = taps[0] * a[..., :, 0:ow]
    for j in range(1, k):
        rows = rows + taps[j] * a[..., :, j:j + ow]
    out = taps[0] * rows[..., 0:oh, :]
    for i in range(1, k):
        out = out + taps[i] * rows[..., i:i + oh, :]
    return out


def windowed_moments_np(stack, taps):
    mu = filter_valid_np(stack, taps)
    sq = filter_valid_np(stack * stack, taps)
    return mu, sq


def windowed_ssim_batch_np(x, mu_x, sq_x, stack, mu_s, sq_s, taps, c1, c2):
    cross = filter_valid_np(stack * x, taps)
    var_x = sq_x - mu_x * mu_x
    var_s = sq_s - mu_s * mu_s
    cov = cross - mu_s * mu_x
    num = (2.0 * mu_x * mu_s + c1) * (2.0 * cov + c2)
    den = (mu_x * mu_x + mu_s * mu_s + c1) * (var_x + var_s + c2)
    smap = num / den
    n = smap.shape[0]
    return smap.reshape(n, -1).sum(axis=1) / (smap.shape[1] * smap.shape[2])


def global_ssim_batch_np(x, stack, c1, c2):
    n = stack.shape[0]
    flat = stack.reshape(n, -1)
    xf = x.reshape(-1)
    npix = xf.shape[0]
    mu_x = xf.sum() / npix
    mu_s = flat.sum(axis=1) / npix
    dx = xf - mu_x
    ds = flat - mu_s[:, None]
    var_x = (dx * dx).sum() / npix
    var_s = (ds * ds).sum(axis=1) / npix
    cov = (ds * dx).sum(axis=1) / npix
    num = (2.0 * mu_x * mu_s + c1) * (2.0 * cov + c2)
    den = (mu_x * mu_x + mu_s * mu_s + c1) * (var_x + var_s + c2)
    return num / den


# -- numba -------------------------------------------------------------------


@njit(nogil=True, cache=True)
def _filter2d_nb(a, taps, out):
    k = taps.shape[0]
    h, w = a.shape
    oh, ow = out.shape
    rows = np.empty((h, ow))
    for r in range(h):
        for c in range(ow):
            acc = taps[0] * a[r, c]
            for j in range(1, k):
                acc = acc + taps[j] * a[r, c + j]
            rows[r, c] = acc
    for r in range(oh):
        for c in range(ow):
            acc = taps[0] * rows[r, c]
            for i in range(1, k):
                acc = acc + taps[i] * rows[r + i, c]
            out[r, c] = acc


@njit(nogil=True, cache=True)
def windowed_moments_nb(stack, taps):
    n, h, w = stack.shape
    k = taps.shape[0]
    mu = np.empty((n, h - k + 1, w - k + 1))
    sq = np.empty_like(mu)
    prod = np.empty((h, w))
    for m in range(n):
        _filter2d_nb(stack[m], taps, mu[m])
        for r in range(h):
            for c in range(w):
                prod[r, c] = stack[m, r, c] * stack[m, r, c]
        _filter2d_nb(prod, taps, sq[m])
    return mu, sq


@njit(nogil=True, cache=True)
def windowed_ssim_batch_nb(x, mu_x, sq_x, stack, mu_s, sq_s, taps, c1, c2):
    n, h, w = stack.shape
    oh, ow = mu_x.shape
    out = np.empty(n)
    prod = np.empty((h, w))
    cross = np.empty((oh, ow))
    for m in range(n):
        for r in range(h):
            for c in range(w):
                prod[r, c] = stack[m, r, c] * x[r, c]
        _filter2d_nb(prod, taps, cross)
        total = 0.0
        for r in range(oh):
            for c in range(ow):
                mx = mu_x[r, c]
                ms = mu_s[m, r, c]
                var_x = sq_x[r, c] - mx * mx
                var_s = sq_s[m, r, c] - ms * ms
                cov = cross[r, c] - ms * mx
                num = (2.0 * mx * ms + c1) * (2.0 * cov + c2)
                den = (mx * mx + ms * ms + c1) * (var_x + var_s + c2)
                total += num / den
        out[m] = total / (oh * ow)
    return out


@njit(nogil=True, cache=True)
def global_ssim_batch_nb(x, stack, c1, c2):
    n, h, w = stack.shape
    npix = h * w
    mu_x = 0.0
    for r in range(h):
        for c in range(w):
            mu_x += x[r, c]
    mu_x /= npix
    var_x = 0.0
    for r in range(h):
        for c in range(w):
            d = x[r, c] - mu_x
            var_x += d * d
    var_x /= npix
    out = np.empty(n)
    for m in range(n):
        mu_s = 0.0
        for r in range(h):
            for c in range(w):
                mu_s += stack[m, r, c]
        mu_s /= npix
        var_s = 0.0
        cov = 0.0
        for r in range(h):
            for c in range(w):
                ds = stack[m, r, c] - mu_s
                var_s += ds * ds
                cov += ds * (x[r, c] - mu_x)
        var_s /= npix
        cov /= npix
        num = (2.0 * mu_x * mu_s + c1) * (2.0 * cov + c2)
        den = (mu_x * mu_x + mu_s * mu_s + c1) * (var_x + var_s + c2)
        out[m] = num / den
    return out


if USE_NUMBA:
    windowed_moments = windowed_moments_nb
    windowed_ssim_batch = windowed_ssim_batch_nb
    global_ssim_batch = global_ssim_batch_nb
else:
    windowed_moments = windowed_moments_np
    windowed_ssim_batch = windowed_ssim_batch_np
    global_ssim_batch = global_ssim_batch_np
