"""Projection profiles, word gaps, headline (matra) and baseline detection, zones."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from vidtext.components import label_components
from vidtext.errors import EmptyLine, InvalidStructure, OverlapError
from vidtext.imaging import Rect

MIN_GAP_WIDTH = 2
MATRA_BAND = 0.85

Span = tuple[int, int]  # inclusive [first, last]


@dataclass(frozen=True)
class ProjectionProfile:
    axis: str  # "vertical" -> per column, "horizontal" -> per row
    counts: np.ndarray


@dataclass(frozen=True)
class Zones:
    """Row ranges as half-open ``(start, stop)`` pairs; empty when start == stop."""

    upper: tuple[int, int]
    middle: tuple[int, int]
    lower: tuple[int, int]


@dataclass(frozen=True)
class LineStructure:
    word_boxes: tuple[Rect, ...]
    gaps: tuple[Span, ...]
    matra: Span
    baseline: int
    zones: Zones


def vertical_projection(bin_img: np.ndarray) -> ProjectionProfile:
    return ProjectionProfile("vertical", np.asarray(bin_img, dtype=bool).sum(axis=0))


def horizontal_projection(bin_img: np.ndarray) -> ProjectionProfile:
    return ProjectionProfile("horizontal", np.asarray(bin_img, dtype=bool).sum(axis=1))


def zero_runs(counts) -> list[Span]:
    """Maximal runs of zero entries."""
    runs = []
    start = None
    for i, c in enumerate(counts):
        if c == 0:
            if start is None:
                start = i
        elif start is not None:
            runs.append((start, i - 1))
            start = None
    if start is not None:
        runs.append((start, len(counts) - 1))
    return runs


def detect_word_gaps(profile: ProjectionProfile, min_gap_width: int = MIN_GAP_WIDTH) -> list[Span]:
    """Interior zero-count column runs at least ``min_gap_width`` wide.

    Runs touching either image edge are margins, not gaps.
    """
    if profile.axis != "vertical":
        raise ValueError("word gaps need a vertical projection")
    last = len(profile.counts) - 1
    return [
        (a, b)
        for a, b in zero_runs(profile.counts)
        if a > 0 and b < last and b - a + 1 >= min_gap_width
    ]


def edge_gaps_to_pixel_gaps(gaps: list[Span]) -> list[Span]:
    """Map zero runs of a forward-difference edge map back to image columns.

    Edge column x reflects the pixel pair (x, x+1), so an edge-map zero run
    [a, b] means image columns a..b+1 are uniform.
    """
    return [(a, b + 1) for a, b in gaps]


def split_words(line: np.ndarray, gaps: list[Span]) -> list[Rect]:
    """Full-height word boxes over the columns not covered by gaps."""
    height, width = np.asarray(line).shape[:2]
    words = []
    start = 0
    for a, b in gaps:
        if a > start:
            words.append(Rect(start, 0, a - start, height))
        start = b + 1
    if start < width:
        words.append(Rect(start, 0, width - start, height))
    return words


def reassemble_line(words, width: int | None = None, height: int | None = None) -> np.ndarray:
    """Paste binarized word images back at their boxes; everything else background."""
    words = list(words)
    if width is None:
        width = max((r.x0 + r.w for r, _ in words), default=0)
    if height is None:
        height = max((r.y0 + r.h for r, _ in words), default=0)
    out = np.zeros((height, width), dtype=bool)
    owner = np.zeros(width, dtype=bool)
    for rect, img in words:
        cols = slice(rect.x0, rect.x0 + rect.w)
        if owner[cols].any():
            raise OverlapError(f"word box {rect} overlaps another")
        owner[cols] = True
        out[rect.slices()] = np.asarray(img, dtype=bool)
    return out


def detect_matra(profile: ProjectionProfile, band: float = MATRA_BAND) -> Span:
    """Row span of the horizontal-projection peak.

    The span is the run of consecutive rows with count >= band * max that
    contains the topmost row reaching the max.
    """
    counts = np.asarray(profile.counts)
    peak = int(counts.max()) if counts.size else 0
    if peak == 0:
        raise EmptyLine("no foreground rows")
    floor = band * peak
    top = bottom = int(np.argmax(counts))
    while top > 0 and counts[top - 1] >= floor:
        top -= 1
    while bottom < counts.size - 1 and counts[bottom + 1] >= floor:
        bottom += 1
    return top, bottom


def detect_baseline(bin_img: np.ndarray, matra: Span) -> int:
    """Row through the most lowermost pixels of components reaching the lower half.

    Components are taken with the headline rows cleared so characters are
    separate.  A component counts when its bbox meets the half-height row or
    lies below it; the baseline is the mode of their lowest rows, ties going to
    the lower row.
    """
    bin_img = np.asarray(bin_img, dtype=bool)
    if not bin_img.any():
        raise EmptyLine("no foreground pixels")
    cut = bin_img.copy()
    cut[matra[0] : matra[1] + 1, :] = False
    half = bin_img.shape[0] // 2
    votes = Counter(
        c.lowest_row for c in label_components(cut).components if c.bbox.y1 >= half
    )
    if not votes:
        return int(np.nonzero(bin_img.any(axis=1))[0].max())
    best = max(votes.values())
    return max(row for row, n in votes.items() if n == best)


def split_zones(bin_img: np.ndarray, matra: Span, baseline: int) -> Zones:
    height = np.asarray(bin_img).shape[0]
    if matra[1] >= baseline:
        raise InvalidStructure(f"matra {matra} is not above baseline {baseline}")
    return Zones(
        upper=(0, matra[0]),
        middle=(matra[1] + 1, baseline + 1),
        lower=(baseline + 1, height),
    )
