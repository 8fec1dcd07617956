"""Per-character shape features.

A character arrives as a full-height column strip of the binarized line, in
the line's row coordinates, so the headline span and baseline apply as-is.
The "core" of a character is its headline plus middle zone.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from vidtext.errors import BlankCharacter
from vidtext.imaging import Rect
from vidtext.line_structure import Span

GRID = 5
DIRECTIONS = ("horizontal", "vertical", "diag45", "diag135")

# neighbour offsets (dr, dc) per direction bin
_DIR_OFFSETS = (
    ((0, -1), (0, 1)),
    ((-1, 0), (1, 0)),
    ((-1, 1), (1, -1)),
    ((-1, -1), (1, 1)),
)


@dataclass(frozen=True)
class FeatureVector:
    f1: float  # middle-zone width / height
    f2: float  # row of leftmost pixel / bbox height
    f3: float  # column of lowermost pixel / bbox width
    f4: float  # row of rightmost pixel / bbox height
    f5: float  # longest headline run / bbox width
    f6: int  # strokes touching the headline from below
    f7a: float  # longest vertical run / bbox height
    f7b: float  # column of that run / bbox width
    f8: np.ndarray = field(repr=False)  # 5x5 cells x 4 directions
    width: int = 0
    height: int = 0
    has_upper: bool = False

    def scalars(self) -> np.ndarray:
        return np.array(
            [self.f1, self.f2, self.f3, self.f4, self.f5, self.f6, self.f7a, self.f7b],
            dtype=np.float64,
        )


def bbox_of(mask: np.ndarray) -> Rect | None:
    rows = np.nonzero(mask.any(axis=1))[0]
    cols = np.nonzero(mask.any(axis=0))[0]
    if rows.size == 0:
        return None
    return Rect(int(cols[0]), int(rows[0]), int(cols[-1] - cols[0] + 1), int(rows[-1] - rows[0] + 1))


def char_core(char: np.ndarray, matra: Span, baseline: int) -> np.ndarray:
    """Tight crop of the headline + middle-zone ink of a character strip."""
    core = np.asarray(char, dtype=bool)[matra[0] : baseline + 1]
    box = bbox_of(core)
    if box is None:
        raise BlankCharacter("no ink between headline and baseline")
    return core[box.slices()]


def _contour(glyph: np.ndarray) -> np.ndarray:
    padded = np.pad(glyph, 1, constant_values=False)
    h, w = glyph.shape
    interior = np.ones_like(glyph)
    for dr in (-1, 0, 1):
        for dc in (-1, 0, 1):
            if dr or dc:
                interior &= padded[1 + dr : 1 + dr + h, 1 + dc : 1 + dc + w]
    return glyph & ~interior


def contour_directional(char: np.ndarray) -> np.ndarray:
    """100-bin histogram: 5x5 grid over the bbox, 4 stroke directions per cell.

    Each contour pixel votes for the direction along which it has the most
    contour neighbours (first direction wins ties); isolated contour pixels
    do not vote.  Output is ordered cell-major (row, col), then direction.
    """
    char = np.asarray(char, dtype=bool)
    box = bbox_of(char)
    if box is None:
        raise BlankCharacter("blank character")
    glyph = char[box.slices()]
    h, w = glyph.shape
    contour = _contour(glyph)
    padded = np.pad(contour, 1, constant_values=False)
    counts = np.zeros((4, h, w), dtype=np.int32)
    for d, offsets in enumerate(_DIR_OFFSETS):
        for dr, dc in offsets:
            counts[d] += padded[1 + dr : 1 + dr + h, 1 + dc : 1 + dc + w]
    best = np.argmax(counts, axis=0)
    votes = contour & (counts.max(axis=0) > 0)

    hist = np.zeros((GRID, GRID, 4), dtype=np.float64)
    rr, cc = np.nonzero(votes)
    cell_r = rr * GRID // h
    cell_c = cc * GRID // w
    np.add.at(hist, (cell_r, cell_c, best[rr, cc]), 1.0)
    return hist.ravel()


def _longest_run(line: np.ndarray) -> int:
    best = run = 0
    for v in line:
        run = run + 1 if v else 0
        best = max(best, run)
    return best


def extract_features(char: np.ndarray, matra: Span, baseline: int) -> FeatureVector:
    char = np.asarray(char, dtype=bool)
    core_rows = char[matra[0] : baseline + 1]
    box = bbox_of(core_rows)
    if box is None:
        raise BlankCharacter("no ink between headline and baseline")
    glyph = core_rows[box.slices()]
    h, w = glyph.shape
    top = matra[0] + box.y0  # glyph row 0 in line coordinates

    mid_lo = max(top, matra[1] + 1)
    mid_hi = min(top + h - 1, baseline)
    f1 = w / max(mid_hi - mid_lo + 1, 1)

    cols_with_ink = np.nonzero(glyph.any(axis=0))[0]
    left_col = cols_with_ink[0]
    f2 = int(np.nonzero(glyph[:, left_col])[0][0]) / h
    right_col = cols_with_ink[-1]
    f4 = int(np.nonzero(glyph[:, right_col])[0][0]) / h
    bottom_row = np.nonzero(glyph.any(axis=1))[0][-1]
    f3 = int(np.nonzero(glyph[bottom_row])[0][0]) / w

    mrows = range(max(matra[0], top), min(matra[1], top + h - 1) + 1)
    f5 = max((_longest_run(glyph[r - top]) for r in mrows), default=0) / w

    below = matra[1] + 1 - top
    if 0 <= below < h:
        row = glyph[below]
        f6 = int(row[0]) + int(np.count_nonzero(row[1:] & ~row[:-1]))
    else:
        f6 = 0

    vruns = [_longest_run(glyph[:, c]) for c in range(w)]
    vcol = int(np.argmax(vruns))
    f7a = vruns[vcol] / h
    f7b = vcol / w

    upper = char[: matra[0], box.x0 : box.x0 + box.w]
    return FeatureVector(
        f1=float(f1),
        f2=float(f2),
        f3=float(f3),
        f4=float(f4),
        f5=float(f5),
        f6=f6,
        f7a=float(f7a),
        f7b=float(f7b),
        f8=contour_directional(glyph),
        width=w,
        height=h,
        has_upper=bool(upper.any()),
    )
