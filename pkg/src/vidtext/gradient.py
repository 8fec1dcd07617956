"""Absolute-gradient edge maps, exact 1-D 2-means binarization and per-word Otsu.

Gradient maps keep the source dimensions: the forward difference has no
partner for the last column (row), which is padded with zeros.
"""

from __future__ import annotations

import numpy as np

from vidtext.errors import Degenerate, DimensionMismatch, TooSmall
from vidtext.imaging import Rect, crop


def horizontal_gradient(img: np.ndarray) -> np.ndarray:
    """``|img(x+1, y) - img(x, y)|`` with a zero rightmost column."""
    img = np.asarray(img)
    if img.ndim != 2 or img.shape[1] < 2:
        raise TooSmall("horizontal gradient needs width >= 2")
    a = img.astype(np.int32)
    out = np.zeros_like(a)
    out[:, :-1] = np.abs(a[:, 1:] - a[:, :-1])
    return out


def vertical_gradient(img: np.ndarray) -> np.ndarray:
    """``|img(x, y+1) - img(x, y)|`` with a zero bottom row."""
    img = np.asarray(img)
    if img.ndim != 2 or img.shape[0] < 2:
        raise TooSmall("vertical gradient needs height >= 2")
    a = img.astype(np.int32)
    out = np.zeros_like(a)
    out[:-1, :] = np.abs(a[1:, :] - a[:-1, :])
    return out


def combine_and_normalize(gx: np.ndarray, gy: np.ndarray) -> np.ndarray:
    """L1 sum of the two maps, min-max stretched to [0, 255] (half-up rounding).

    A constant sum maps to all zeros.
    """
    gx = np.asarray(gx)
    gy = np.asarray(gy)
    if gx.shape != gy.shape:
        raise DimensionMismatch(f"{gx.shape} vs {gy.shape}")
    raw = gx.astype(np.int64) + gy.astype(np.int64)
    lo, hi = int(raw.min()), int(raw.max())
    if hi == lo:
        return np.zeros(raw.shape, dtype=np.int32)
    span = hi - lo
    # exact round(255 * (raw - lo) / span), ties upward
    out = (2 * 255 * (raw - lo) + span) // (2 * span)
    return out.astype(np.int32)


def absolute_gradient(img: np.ndarray) -> np.ndarray:
    """Normalized absolute-gradient image of a grayscale line."""
    return combine_and_normalize(horizontal_gradient(img), vertical_gradient(img))


def kmeans_threshold(values) -> float | None:
    """Exact optimum of 1-D 2-means: largest value of the low cluster.

    Scans every split between consecutive distinct values and keeps the one
    with minimum within-cluster SSE (smallest threshold on ties).  Returns
    None when all values are equal.
    """
    vals, counts = np.unique(np.asarray(values).ravel(), return_counts=True)
    if vals.size < 2:
        return None
    exact = np.issubdtype(vals.dtype, np.integer)
    if exact:
        vals_l = [int(v) for v in vals]
    else:
        vals_l = [float(v) for v in vals]
    counts_l = [int(c) for c in counts]
    n = sum(counts_l)
    s = sum(v * c for v, c in zip(vals_l, counts_l))

    # SSE = sum(x^2) - S0^2/n0 - S1^2/n1, so maximize S0^2/n0 + S1^2/n1
    best_num, best_den, best_k = None, None, 0
    n0 = 0
    s0 = 0
    for k in range(len(vals_l) - 1):
        n0 += counts_l[k]
        s0 += vals_l[k] * counts_l[k]
        n1 = n - n0
        s1 = s - s0
        num = s0 * s0 * n1 + s1 * s1 * n0
        den = n0 * n1
        if best_num is None or num * best_den > best_num * den:
            best_num, best_den, best_k = num, den, k
    return vals_l[best_k]


def kmeans_binarize(gmap: np.ndarray) -> np.ndarray:
    """Foreground = the higher-mean cluster of the optimal 1-D 2-means split."""
    gmap = np.asarray(gmap)
    t = kmeans_threshold(gmap)
    if t is None:
        return np.zeros(gmap.shape, dtype=bool)
    return gmap > t


def otsu_threshold(img: np.ndarray, region: Rect | None = None) -> int:
    """Threshold maximizing between-class variance; class 0 is ``<= t``.

    Computed with integer arithmetic, so ties are exact and resolved toward
    the smallest threshold.
    """
    patch = crop(img, region) if region is not None else np.asarray(img)
    hist = np.bincount(patch.astype(np.int64).ravel(), minlength=256)
    if np.count_nonzero(hist) < 2:
        raise Degenerate("region has a single intensity")
    hist_l = [int(h) for h in hist]
    n = sum(hist_l)
    s = sum(i * h for i, h in enumerate(hist_l))

    # sigma_b^2 is proportional to (n*S0 - n0*S)^2 / (n0*n1)
    best = None
    n0 = 0
    s0 = 0
    for t in range(255):
        n0 += hist_l[t]
        s0 += t * hist_l[t]
        n1 = n - n0
        if n0 == 0:
            continue
        if n1 == 0:
            break
        num = (n * s0 - n0 * s) ** 2
        den = n0 * n1
        if best is None or num * best[1] > best[0] * den:
            best = (num, den, t)
    return best[2]


def _gradient_magnitude(patch: np.ndarray) -> np.ndarray:
    a = patch.astype(np.int32)
    mag = np.zeros_like(a)
    if a.shape[1] >= 2:
        mag[:, :-1] += np.abs(a[:, 1:] - a[:, :-1])
    if a.shape[0] >= 2:
        mag[:-1, :] += np.abs(a[1:, :] - a[:-1, :])
    return mag


def binarize_word(img: np.ndarray, word: Rect) -> np.ndarray:
    """Otsu-binarize one word region; the minority class is taken as text.

    An exact 50/50 split goes to the class with the higher mean gradient
    magnitude (the darker class if that ties too).  Constant regions are
    all background.
    """
    patch = crop(img, word)
    try:
        t = otsu_threshold(patch)
    except Degenerate:
        return np.zeros(patch.shape, dtype=bool)
    bright = patch > t
    n1 = int(bright.sum())
    n0 = bright.size - n1
    if n1 < n0:
        return bright
    if n0 < n1:
        return ~bright
    mag = _gradient_magnitude(patch)
    if mag[bright].mean() > mag[~bright].mean():
        return bright
    return ~bright
