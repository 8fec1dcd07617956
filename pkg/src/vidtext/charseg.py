"""Character segmentation of a word in the middle zone.

The headline is erased so characters come apart, then columns whose middle
zone is empty from baseline to headline are boundaries.  Kerned pairs, which
no straight column separates, get a bounded-deviation seam search.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from vidtext.components import label_components
from vidtext.imaging import Rect
from vidtext.line_structure import Span

MAX_DEV = 3


@dataclass(frozen=True)
class ScanPath:
    rows: tuple[int, ...]  # baseline first, then upward to matra bottom + 1
    cols: tuple[int, ...]
    start_col: int

    @property
    def deviation(self) -> int:
        return sum(abs(c - self.start_col) for c in self.cols)

    @property
    def max_deviation(self) -> int:
        return max(abs(c - self.start_col) for c in self.cols)


@dataclass(frozen=True)
class CharBox:
    rect: Rect
    order: int


def remove_matra(bin_img: np.ndarray, matra: Span) -> np.ndarray:
    out = np.array(bin_img, dtype=bool, copy=True)
    out[matra[0] : matra[1] + 1, :] = False
    return out


def _middle(bin_img: np.ndarray, matra: Span, baseline: int) -> np.ndarray:
    return np.asarray(bin_img, dtype=bool)[matra[1] + 1 : baseline + 1, :]


def _runs(mask) -> list[Span]:
    runs = []
    start = None
    for i, v in enumerate(mask):
        if v and start is None:
            start = i
        elif not v and start is not None:
            runs.append((start, i - 1))
            start = None
    if start is not None:
        runs.append((start, len(mask) - 1))
    return runs


def straight_scan_boundaries(bin_img: np.ndarray, matra: Span, baseline: int) -> list[Span]:
    """Maximal runs of columns with no foreground between matra and baseline."""
    clear = ~_middle(bin_img, matra, baseline).any(axis=0)
    return _runs(clear)


def piecewise_scan(
    bin_img: np.ndarray, start_col: int, matra: Span, baseline: int, max_dev: int = MAX_DEV
) -> ScanPath | None:
    """Minimum-deviation background seam from the baseline up to the headline.

    The seam moves at most one column per row and stays within ``max_dev``
    columns of ``start_col``.  Total deviation is minimized; ties go to the
    leftmost final column and then to leftmost predecessors.
    """
    bin_img = np.asarray(bin_img, dtype=bool)
    width = bin_img.shape[1]
    rows = list(range(baseline, matra[1], -1))
    if not rows:
        return None
    lo = max(0, start_col - max_dev)
    hi = min(width - 1, start_col + max_dev)
    cols = np.arange(lo, hi + 1)
    dev = np.abs(cols - start_col).astype(np.float64)
    inf = np.inf

    cost = np.where(bin_img[rows[0], lo : hi + 1], inf, dev)
    back = []
    for r in rows[1:]:
        # candidate predecessors at offsets -1, 0, +1 (leftmost first)
        left = np.concatenate(([inf], cost[:-1]))
        right = np.concatenate((cost[1:], [inf]))
        stacked = np.stack([left, cost, right])
        choice = np.argmin(stacked, axis=0)
        best = stacked[choice, np.arange(cols.size)]
        cost = np.where(bin_img[r, lo : hi + 1], inf, best + dev)
        back.append(choice - 1)
    if not np.isfinite(cost).any():
        return None
    j = int(np.argmin(cost))
    path = [j]
    for step in reversed(back):
        j = j + int(step[j])
        path.append(j)
    path.reverse()
    return ScanPath(tuple(rows), tuple(int(lo + p) for p in path), start_col)


def _split_ok(middle: np.ndarray, path: ScanPath, row0: int) -> bool:
    """The seam must leave ink on both sides and cut no connected component."""
    side = np.zeros(middle.shape, dtype=np.int8)
    col_idx = np.arange(middle.shape[1])
    for r, c in zip(path.rows, path.cols):
        side[r - row0] = np.where(col_idx < c, -1, np.where(col_idx > c, 1, 0))
    if not (middle & (side < 0)).any() or not (middle & (side > 0)).any():
        return False
    labels = label_components(middle).labels
    for lab in np.unique(labels[labels > 0]):
        sides = np.unique(side[labels == lab])
        if -1 in sides and 1 in sides:
            return False
    return True


def _trim(middle: np.ndarray, a: int, b: int) -> Span | None:
    cols = np.nonzero(middle[:, a : b + 1].any(axis=0))[0]
    if cols.size == 0:
        return None
    return a + int(cols[0]), a + int(cols[-1])


def _split_segment(
    nomatra: np.ndarray, seg: Span, matra: Span, baseline: int, max_dev: int
) -> list[Span]:
    a, b = seg
    if max_dev <= 0 or b - a < 2:
        return [seg]
    sub = nomatra[:, a : b + 1]
    middle = _middle(sub, matra, baseline)
    proj = middle.sum(axis=0)
    cands = [
        c for c in range(1, b - a) if proj[c] <= proj[c - 1] and proj[c] <= proj[c + 1]
    ]
    cands.sort(key=lambda c: (int(proj[c]), c))
    for c in cands:
        path = piecewise_scan(sub, c, matra, baseline, max_dev)
        if path is None or not _split_ok(middle, path, matra[1] + 1):
            continue
        cut = path.cols[0]
        parts = []
        for lo, hi in ((0, cut - 1), (cut, b - a)):
            t = _trim(middle, lo, hi) if hi >= lo else None
            if t is not None:
                parts.append((a + t[0], a + t[1]))
        if len(parts) < 2:
            continue
        out = []
        for p in parts:
            out.extend(_split_segment(nomatra, p, matra, baseline, max_dev))
        return out
    return [seg]


def extract_characters(
    word_bin: np.ndarray,
    matra: Span,
    baseline: int,
    min_gap_width: int = 1,
    max_dev: int = MAX_DEV,
) -> list[CharBox]:
    """Character boxes of one word, left to right.

    Each box covers the character's columns and rows from the headline top
    down to the baseline.  Boundary runs narrower than ``min_gap_width`` do not
    separate characters.
    """
    nomatra = remove_matra(word_bin, matra)
    middle = _middle(nomatra, matra, baseline)
    width = middle.shape[1]
    has_ink = middle.any(axis=0)
    # boundary runs too narrow to count are treated as part of a character
    clear = ~has_ink
    for a, b in _runs(clear):
        if b - a + 1 < min_gap_width and a > 0 and b < width - 1:
            clear[a : b + 1] = False
    segments = []
    for a, b in _runs(~clear):
        t = _trim(middle, a, b)
        if t is not None:
            segments.extend(_split_segment(nomatra, t, matra, baseline, max_dev))
    top = matra[0]
    h = baseline - top + 1
    return [
        CharBox(Rect(a, top, b - a + 1, h), i) for i, (a, b) in enumerate(segments)
    ]
