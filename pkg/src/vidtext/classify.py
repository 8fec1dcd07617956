"""Character classification: discriminant-plane grouping, tree routing and
run-length template matching."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from vidtext.errors import BlankCharacter, InsufficientData
from vidtext.features import GRID, FeatureVector, bbox_of

GROUPS = ("modifier", "basic", "compound")
MAX_ITER = 10_000
WIDTH_TOL = 0.25
HEADLINE_THRESHOLD = 0.6
VERTICAL_THRESHOLD = 0.7
REJECT = "REJECT"


# -- discriminant planes -----------------------------------------------------


@dataclass(frozen=True)
class DiscriminantPlanes:
    """Two planes ``coef . f = offset`` over the scalars [f1..f6, f7a, f7b]."""

    a: np.ndarray
    a0: float
    b: np.ndarray
    b0: float

    def scaled(self, k: float) -> "DiscriminantPlanes":
        return DiscriminantPlanes(self.a * k, self.a0 * k, self.b * k, self.b0 * k)

    def to_json(self) -> dict:
        return {
            "a": [float(self.a0)] + [float(v) for v in self.a],
            "b": [float(self.b0)] + [float(v) for v in self.b],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "DiscriminantPlanes":
        a = [float(v) for v in obj["a"]]
        b = [float(v) for v in obj["b"]]
        return cls(np.array(a[1:]), a[0], np.array(b[1:]), b[0])


def plane_scores(f: np.ndarray, planes: DiscriminantPlanes) -> tuple[float, float]:
    f = np.asarray(f, dtype=np.float64)
    return float(f @ planes.a - planes.a0), float(f @ planes.b - planes.b0)


def group_character(fv, planes: DiscriminantPlanes) -> str:
    """modifier if plane a is negative, else basic/compound by the sign of plane b."""
    f = fv.scalars() if isinstance(fv, FeatureVector) else fv
    s_a, s_b = plane_scores(f, planes)
    if s_a < 0:
        return "modifier"
    if s_b < 0:
        return "basic"
    return "compound"


def _errors(z: np.ndarray, y: np.ndarray, w: np.ndarray) -> int:
    s = z @ w
    return int(np.count_nonzero(np.where(y > 0, s < 0, s >= 0)))


def _pocket_perceptron(x: np.ndarray, y: np.ndarray, max_iter: int, margin: float = 1.0):
    """Sequential margin perceptron with a pocket; returns (coef, offset) in x space.

    Features are standardized first for conditioning; the update order is the
    row order of ``x``.  ``max_iter`` caps the number of weight updates.
    """
    mu = x.mean(axis=0)
    sd = x.std(axis=0)
    sd[sd == 0] = 1.0
    z = np.hstack([(x - mu) / sd, np.ones((len(x), 1))])
    n = len(z)
    w = np.zeros(z.shape[1])
    best_w, best_err = w.copy(), _errors(z, y, w)
    pos = 0
    clean = 0
    updates = 0
    while updates < max_iter:
        m = y[pos:] * (z[pos:] @ w)
        bad = np.nonzero(m < margin)[0]
        if bad.size == 0:
            clean += n - pos
            pos = 0
            if clean >= n:
                break
            continue
        clean += int(bad[0])
        if clean >= n:
            break
        i = pos + int(bad[0])
        w = w + y[i] * z[i]
        updates += 1
        clean = 0
        err = _errors(z, y, w)
        if err <= best_err:
            best_w, best_err = w.copy(), err
        pos = (i + 1) % n
    if _errors(z, y, w) > best_err:
        w = best_w
    coef = w[:-1] / sd
    bias = w[-1] - float(coef @ mu)
    # s = coef . f + bias = coef . f - offset
    return coef, -bias


def train_planes(samples, max_iter: int = MAX_ITER) -> DiscriminantPlanes:
    """Fit plane a (modifier vs rest) and plane b (basic vs compound).

    ``samples`` holds (features, group) pairs; features are FeatureVectors or
    8-element arrays.  Samples are put in a canonical order first, so the
    result does not depend on the order they were given in.
    """
    rows = []
    for fv, group in samples:
        f = fv.scalars() if isinstance(fv, FeatureVector) else np.asarray(fv, dtype=np.float64)
        rows.append((GROUPS.index(group), tuple(float(v) for v in f)))
    present = {g for g, _ in rows}
    if present != {0, 1, 2}:
        missing = [GROUPS[g] for g in range(3) if g not in present]
        raise InsufficientData(f"no samples for group(s): {', '.join(missing)}")
    rows.sort()
    g = np.array([r[0] for r in rows])
    x = np.array([r[1] for r in rows], dtype=np.float64)

    a, a0 = _pocket_perceptron(x, np.where(g == 0, -1.0, 1.0), max_iter)
    rest = g > 0
    b, b0 = _pocket_perceptron(x[rest], np.where(g[rest] == 1, -1.0, 1.0), max_iter)
    return DiscriminantPlanes(a, float(a0), b, float(b0))


# -- run-length templates ----------------------------------------------------

Runs = tuple[tuple[int, int], ...]


def rle_encode(bitmap: np.ndarray) -> tuple[Runs, ...]:
    """Per-row sorted, disjoint, inclusive [start, end] foreground runs."""
    bitmap = np.asarray(bitmap, dtype=bool)
    out = []
    for row in bitmap:
        padded = np.concatenate(([False], row, [False])).astype(np.int8)
        edges = np.diff(padded)
        starts = np.nonzero(edges == 1)[0]
        ends = np.nonzero(edges == -1)[0] - 1
        out.append(tuple((int(s), int(e)) for s, e in zip(starts, ends)))
    return tuple(out)


def rle_decode(rows, width: int) -> np.ndarray:
    out = np.zeros((len(rows), width), dtype=bool)
    for r, runs in enumerate(rows):
        for s, e in runs:
            out[r, s : e + 1] = True
    return out


def run_area(rows) -> int:
    return sum(e - s + 1 for runs in rows for s, e in runs)


def run_intersection(rows_a, rows_b) -> int:
    """Pixels shared by two run-length bitmaps of equal height."""
    total = 0
    for ra, rb in zip(rows_a, rows_b):
        i = j = 0
        while i < len(ra) and j < len(rb):
            lo = max(ra[i][0], rb[j][0])
            hi = min(ra[i][1], rb[j][1])
            if hi >= lo:
                total += hi - lo + 1
            if ra[i][1] < rb[j][1]:
                i += 1
            else:
                j += 1
    return total


def run_dice(rows_a, rows_b) -> float:
    denom = run_area(rows_a) + run_area(rows_b)
    if denom == 0:
        return 0.0
    return 2.0 * run_intersection(rows_a, rows_b) / denom


@dataclass(frozen=True)
class GlyphTemplate:
    label: str
    rows: tuple[Runs, ...]
    w: int
    h: int

    @classmethod
    def from_bitmap(cls, label: str, bitmap: np.ndarray) -> "GlyphTemplate":
        bitmap = np.asarray(bitmap, dtype=bool)
        return cls(label, rle_encode(bitmap), bitmap.shape[1], bitmap.shape[0])

    def bitmap(self) -> np.ndarray:
        return rle_decode(self.rows, self.w)

    @property
    def area(self) -> int:
        return run_area(self.rows)

    def sort_key(self):
        return (self.w, self.label, self.h, self.rows)

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "w": self.w,
            "h": self.h,
            "rows": [[list(run) for run in runs] for runs in self.rows],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "GlyphTemplate":
        rows = tuple(tuple((int(s), int(e)) for s, e in runs) for runs in obj["rows"])
        return cls(str(obj["label"]), rows, int(obj["w"]), int(obj["h"]))


def build_templates(samples) -> list[GlyphTemplate]:
    """One template per (label, bitmap) sample, tight-cropped, sorted by width.

    Bit-identical samples of the same label collapse into one template.
    """
    samples = list(samples)
    if not samples:
        raise InsufficientData("no template samples")
    seen = set()
    out = []
    for label, bitmap in samples:
        bitmap = np.asarray(bitmap, dtype=bool)
        box = bbox_of(bitmap)
        if box is None:
            raise BlankCharacter(f"blank template sample for {label!r}")
        t = GlyphTemplate.from_bitmap(label, bitmap[box.slices()])
        if t.sort_key() not in seen:
            seen.add(t.sort_key())
            out.append(t)
    out.sort(key=GlyphTemplate.sort_key)
    return out


def resample_nearest(bitmap: np.ndarray, h: int, w: int) -> np.ndarray:
    """Nearest-neighbour scaling of a bitmap onto an h x w grid (pixel centres)."""
    src_h, src_w = bitmap.shape
    rows = np.minimum((np.arange(h) * 2 + 1) * src_h // (2 * h), src_h - 1)
    cols = np.minimum((np.arange(w) * 2 + 1) * src_w // (2 * w), src_w - 1)
    return bitmap[np.ix_(rows, cols)]


def template_match(char: np.ndarray, templates, width_tol: float = WIDTH_TOL):
    """Best (label, Dice score) among templates of comparable width, or None.

    Templates are tried from the nearest width outward; a template is in
    range when ``|w - candidate_w| <= width_tol * candidate_w``.  The
    candidate's bbox is scaled onto each template's bbox before scoring.
    """
    char = np.asarray(char, dtype=bool)
    box = bbox_of(char)
    if box is None:
        return None
    glyph = char[box.slices()]
    cw = glyph.shape[1]
    order = sorted(
        (t for t in templates if abs(t.w - cw) <= width_tol * cw),
        key=lambda t: (abs(t.w - cw), t.w),
    )
    best = None
    cache = {}
    for t in order:
        key = (t.h, t.w)
        if key not in cache:
            cache[key] = rle_encode(resample_nearest(glyph, t.h, t.w))
        score = run_dice(t.rows, cache[key])
        if best is None or score > best[1]:
            best = (t.label, score)
    return best


# -- decision tree -----------------------------------------------------------

TESTS = ("headline", "vertical_line", "left_slant", "width", "upper_signature")


@dataclass
class TreeNode:
    id: int
    kind: str  # one of TESTS, or "leaf"
    threshold: float | None = None
    true: int | None = None
    false: int | None = None
    templates: list = field(default_factory=list)

    def to_json(self) -> dict:
        if self.kind == "leaf":
            return {"id": self.id, "kind": "leaf", "templates": [t.to_json() for t in self.templates]}
        return {
            "id": self.id,
            "kind": self.kind,
            "threshold": self.threshold,
            "true": self.true,
            "false": self.false,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "TreeNode":
        if obj["kind"] == "leaf":
            return cls(int(obj["id"]), "leaf", templates=[GlyphTemplate.from_json(t) for t in obj["templates"]])
        thr = obj.get("threshold")
        return cls(
            int(obj["id"]),
            obj["kind"],
            None if thr is None else float(thr),
            int(obj["true"]),
            int(obj["false"]),
        )


@dataclass
class DecisionTree:
    nodes: list[TreeNode]
    root: int = 0

    def node(self, node_id: int) -> TreeNode:
        return self._index()[node_id]

    def _index(self) -> dict:
        return {n.id: n for n in self.nodes}

    def leaves(self) -> list[TreeNode]:
        return [n for n in self.nodes if n.kind == "leaf"]

    def to_json(self) -> dict:
        return {"root": self.root, "nodes": [n.to_json() for n in self.nodes]}

    @classmethod
    def from_json(cls, obj: dict) -> "DecisionTree":
        return cls([TreeNode.from_json(n) for n in obj["nodes"]], int(obj["root"]))


def left_slant_present(f8: np.ndarray) -> bool:
    """Diagonal-135 votes dominate the leftmost column of grid cells."""
    col0 = np.asarray(f8).reshape(GRID, GRID, 4)[:, 0, :].sum(axis=0)
    return bool(col0[3] > col0[:3].max())


def evaluate_test(node: TreeNode, fv: FeatureVector) -> bool:
    if node.kind == "headline":
        return fv.f5 >= (HEADLINE_THRESHOLD if node.threshold is None else node.threshold)
    if node.kind == "vertical_line":
        return fv.f7a >= (VERTICAL_THRESHOLD if node.threshold is None else node.threshold)
    if node.kind == "left_slant":
        return left_slant_present(fv.f8)
    if node.kind == "width":
        return fv.width >= node.threshold
    if node.kind == "upper_signature":
        return fv.has_upper
    raise ValueError(f"unknown tree test {node.kind!r}")


def tree_classify(fv: FeatureVector, tree: DecisionTree) -> int:
    """Route a character to a leaf and return the leaf's node id."""
    index = tree._index()
    node = index[tree.root]
    while node.kind != "leaf":
        node = index[node.true if evaluate_test(node, fv) else node.false]
    return node.id


def _split_width(widths: list[int]) -> float | None:
    """Threshold at the widest gap between distinct widths (None if < 2 widths)."""
    distinct = sorted(set(widths))
    if len(distinct) < 2:
        return None
    gaps = [(distinct[i + 1] - distinct[i], -i) for i in range(len(distinct) - 1)]
    _, neg_i = max(gaps)
    return float(distinct[-neg_i + 1])


def grow_default_tree(items, headline_threshold: float = HEADLINE_THRESHOLD) -> DecisionTree:
    """Two-level tree: bbox width at the root, headline presence below it.

    ``items`` holds (FeatureVector, GlyphTemplate) pairs.  A test whose one
    side would get no templates collapses into a leaf.
    """
    items = list(items)
    if not items:
        raise InsufficientData("no samples to grow a tree from")
    nodes: list[TreeNode] = []

    def leaf(group) -> int:
        templates = []
        seen = set()
        for _, t in group:
            if t.sort_key() not in seen:
                seen.add(t.sort_key())
                templates.append(t)
        templates.sort(key=GlyphTemplate.sort_key)
        nodes.append(TreeNode(len(nodes), "leaf", templates=templates))
        return nodes[-1].id

    def split(group, kind, threshold, test, then) -> int:
        yes = [it for it in group if test(it[0])]
        no = [it for it in group if not test(it[0])]
        if not yes or not no:
            return then(group)
        node = TreeNode(len(nodes), kind, threshold)
        nodes.append(node)
        node.true = then(yes)
        node.false = then(no)
        return node.id

    def headline(group) -> int:
        return split(group, "headline", headline_threshold, lambda fv: fv.f5 >= headline_threshold, leaf)

    thr = _split_width([fv.width for fv, _ in items])
    if thr is None:
        headline(items)
    else:
        split(items, "width", thr, lambda fv: fv.width >= thr, headline)
    return DecisionTree(nodes, root=0)
