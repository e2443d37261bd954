"""Shared numeric kernels: resizing, blurring, softmax and vector distances.

Everything here is a pure function on float64 numpy arrays.  The bilinear
resize uses half-pixel-center coordinates and the Gaussian blur renormalizes
the in-bounds kernel mass at borders, so unit-mass blobs near an edge keep
their mass.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.ndimage import convolve1d

from .errors import InvalidArgumentError

__all__ = [
    "bilinear_resize",
    "gaussian_blur",
    "softmax",
    "l2_distance",
    "l1_distance",
    "vector_distance",
    "minmax_normalize",
]


def bilinear_resize(src: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Resize a 2-D array with bilinear interpolation (half-pixel centers).

    Output values are convex combinations of the four neighboring source
    pixels, so they stay within [src.min(), src.max()].  Resizing to the
    source resolution returns the source values exactly.
    """
    src = np.asarray(src, dtype=np.float64)
    if src.ndim != 2:
        raise InvalidArgumentError(f"expected a rank-2 array, got rank {src.ndim}")
    in_h, in_w = src.shape
    if in_h < 1 or in_w < 1:
        raise InvalidArgumentError("source must be at least 1x1")
    if out_h < 1 or out_w < 1:
        raise InvalidArgumentError(f"target size {out_h}x{out_w} must be at least 1x1")

    ys = np.clip((np.arange(out_h) + 0.5) * (in_h / out_h) - 0.5, 0.0, in_h - 1.0)
    xs = np.clip((np.arange(out_w) + 0.5) * (in_w / out_w) - 0.5, 0.0, in_w - 1.0)
    y0 = np.floor(ys).astype(np.intp)
    x0 = np.floor(xs).astype(np.intp)
    y1 = np.minimum(y0 + 1, in_h - 1)
    x1 = np.minimum(x0 + 1, in_w - 1)
    wy = (ys - y0)[:, None]
    wx = (xs - x0)[None, :]

    top = src[y0][:, x0] * (1.0 - wx) + src[y0][:, x1] * wx
    bot = src[y1][:, x0] * (1.0 - wx) + src[y1][:, x1] * wx
    return top * (1.0 - wy) + bot * wy


def gaussian_blur(src: np.ndarray, sigma_px: float) -> np.ndarray:
    """Blur a 2-D array with a truncated, normalized Gaussian kernel.

    The kernel is truncated at radius ceil(3*sigma_px).  At borders the
    in-bounds kernel mass is renormalized instead of zero-padding, which
    keeps constant images constant and preserves blob mass near edges.
    """
    src = np.asarray(src, dtype=np.float64)
    if src.ndim != 2:
        raise InvalidArgumentError(f"expected a rank-2 array, got rank {src.ndim}")
    if not sigma_px > 0:
        raise InvalidArgumentError(f"sigma_px must be positive, got {sigma_px}")

    radius = math.ceil(3.0 * sigma_px)
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    kernel = np.exp(-(offsets**2) / (2.0 * sigma_px**2))
    kernel /= kernel.sum()

    ones = np.ones_like(src)
    out = src
    for axis in (0, 1):
        num = convolve1d(out, kernel, axis=axis, mode="constant", cval=0.0)
        den = convolve1d(ones, kernel, axis=axis, mode="constant", cval=0.0)
        out = num / den
    return out


def softmax(logits: np.ndarray) -> np.ndarray:
    """Stable softmax over the last axis (max-subtraction)."""
    logits = np.asarray(logits, dtype=np.float64)
    if logits.size == 0:
        raise InvalidArgumentError("softmax of an empty vector is undefined")
    shifted = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def l2_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Euclidean distance between two equal-length vectors."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise InvalidArgumentError(f"length mismatch: {a.shape} vs {b.shape}")
    return float(np.sqrt(np.sum((a - b) ** 2)))


def l1_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Manhattan distance between two equal-length vectors."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise InvalidArgumentError(f"length mismatch: {a.shape} vs {b.shape}")
    return float(np.sum(np.abs(a - b)))


def vector_distance(a: np.ndarray, b: np.ndarray, norm: str = "l2") -> float:
    """Dispatch on the configured norm ("l2" or "l1")."""
    if norm == "l2":
        return l2_distance(a, b)
    if norm == "l1":
        return l1_distance(a, b)
    raise InvalidArgumentError(f"unknown norm {norm!r}")


def minmax_normalize(arr: np.ndarray) -> np.ndarray:
    """Scale an array to [0, 1]; a constant array maps to all zeros."""
    arr = np.asarray(arr, dtype=np.float64)
    lo = arr.min()
    hi = arr.max()
    if hi == lo:
        return np.zeros_like(arr)
    return (arr - lo) / (hi - lo)
