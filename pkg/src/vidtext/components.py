"""8-connected component labeling and area-based noise rejection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from vidtext.imaging import Rect

_EIGHT = np.ones((3, 3), dtype=bool)

NOISE_FRACTION = 0.02


@dataclass(frozen=True)
class Component:
    id: int
    area: int
    bbox: Rect
    lowest_row: int


@dataclass(frozen=True)
class ComponentSet:
    labels: np.ndarray  # 0 = background
    components: tuple[Component, ...]

    def __len__(self) -> int:
        return len(self.components)

    def mean_area(self) -> float:
        if not self.components:
            return 0.0
        return sum(c.area for c in self.components) / len(self.components)


def label_components(bin_img: np.ndarray) -> ComponentSet:
    """Label 8-connected foreground regions, ids in raster-scan discovery order."""
    bin_img = np.asarray(bin_img, dtype=bool)
    labels, count = ndimage.label(bin_img, structure=_EIGHT)
    if count == 0:
        return ComponentSet(labels.astype(np.int32), ())
    areas = np.bincount(labels.ravel(), minlength=count + 1)
    comps = []
    for idx, sl in enumerate(ndimage.find_objects(labels), start=1):
        rows, cols = sl
        bbox = Rect(cols.start, rows.start, cols.stop - cols.start, rows.stop - rows.start)
        comps.append(Component(idx, int(areas[idx]), bbox, rows.stop - 1))
    return ComponentSet(labels.astype(np.int32), tuple(comps))


def remove_noise(
    bin_img: np.ndarray, cs: ComponentSet | None = None, until_stable: bool = False
) -> np.ndarray:
    """Erase components whose area is below 2% of the mean component area.

    One pass by default.  With ``until_stable`` the rule is re-applied on the
    survivors until nothing changes, which makes the operation idempotent.
    """
    bin_img = np.asarray(bin_img, dtype=bool)
    if cs is None:
        cs = label_components(bin_img)
    out = bin_img.copy()
    while cs.components:
        cutoff = NOISE_FRACTION * cs.mean_area()
        noise = [c.id for c in cs.components if c.area < cutoff]
        if not noise:
            break
        out[np.isin(cs.labels, noise)] = False
        if not until_stable:
            break
        cs = label_components(out)
    return out
