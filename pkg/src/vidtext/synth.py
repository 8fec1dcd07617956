"""Deterministic synthetic text lines with full ground truth.

Glyphs are stroke programs (bars, slants, arcs) hanging from a headline.
Each glyph in an alphabet is checked so that, in a noiseless render, its
middle-zone ink is one 8-connected piece covering every column and reaching
the baseline, and the row right under the headline is at most half inked.

Corpus layout: ``NNNN.pgm`` plus ``NNNN.truth.json`` per line, and
``corpus.json`` holding the generating SynthSpec.  Truth JSON::

    {"version": 1, "width", "height",
     "word_boxes": [[x0, y0, w, h], ...],
     "char_boxes": [[[x0, y0, w, h], ...], ...],   # per word
     "labels": [["g03", ...], ...], "groups": [["basic", ...], ...],
     "matra_span": [top, bottom], "baseline": row}
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from vidtext.components import label_components
from vidtext.imaging import Rect, encode_pgm

TRUTH_VERSION = 1
NOMINAL_HEIGHT = 24
STROKE = 2

TOP_MARGIN = 3
UPPER_ZONE = 7
LOWER_ZONE = 7
BOTTOM_MARGIN = 3


@dataclass(frozen=True)
class SynthSpec:
    seed: int = 0
    words: tuple[int, int] = (2, 4)
    glyphs_per_word: tuple[int, int] = (2, 5)
    glyph_w: tuple[int, int] = (12, 18)  # basic-glyph width at nominal height
    glyph_h: tuple[int, int] = (24, 24)  # middle-zone height per line
    matra_thickness: int = 3
    gap_width: tuple[int, int] = (6, 12)
    char_spacing: tuple[int, int] = (2, 3)
    margin: tuple[int, int] = (4, 8)
    ascender_prob: float = 0.1
    descender_prob: float = 0.1
    noise_sigma: float = 0.0
    background_ramp: float = 0.0
    polarity: str = "dark-on-light"
    alphabet_size: int = 10
    alphabet_seed: int = 0

    def __post_init__(self):
        for name in ("words", "glyphs_per_word", "glyph_w", "glyph_h", "gap_width", "char_spacing", "margin"):
            lo, hi = getattr(self, name)
            if lo > hi or lo < 0:
                raise ValueError(f"{name}: empty range ({lo}, {hi})")
        for name in ("ascender_prob", "descender_prob"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")
        if self.polarity not in ("dark-on-light", "light-on-dark"):
            raise ValueError(f"unknown polarity {self.polarity!r}")
        if self.words[0] < 1 or self.glyphs_per_word[0] < 1:
            raise ValueError("need at least one word and one glyph per word")

    def to_json(self) -> dict:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self).items()}

    @classmethod
    def from_json(cls, obj: dict) -> "SynthSpec":
        known = {f.name for f in fields(cls)}
        unknown = set(obj) - known
        if unknown:
            raise ValueError(f"unknown SynthSpec fields: {sorted(unknown)}")
        return cls(**{k: tuple(v) if isinstance(v, list) else v for k, v in obj.items()})


@dataclass(frozen=True)
class Glyph:
    label: str
    image: np.ndarray = field(repr=False)  # headline rows on top of the middle zone
    group: str
    program: tuple = field(repr=False)
    width: int  # at nominal height


@dataclass(frozen=True)
class GroundTruth:
    width: int
    height: int
    word_boxes: tuple[Rect, ...]
    char_boxes: tuple[tuple[Rect, ...], ...]
    labels: tuple[tuple[str, ...], ...]
    groups: tuple[tuple[str, ...], ...]
    matra_span: tuple[int, int]
    baseline: int

    @property
    def gaps(self) -> list[tuple[int, int]]:
        """Column intervals between consecutive words."""
        return [(a.x1 + 1, b.x0 - 1) for a, b in zip(self.word_boxes, self.word_boxes[1:])]

    def to_json(self) -> dict:
        return {
            "version": TRUTH_VERSION,
            "width": self.width,
            "height": self.height,
            "word_boxes": [r.to_list() for r in self.word_boxes],
            "char_boxes": [[r.to_list() for r in word] for word in self.char_boxes],
            "labels": [list(w) for w in self.labels],
            "groups": [list(w) for w in self.groups],
            "matra_span": list(self.matra_span),
            "baseline": self.baseline,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "GroundTruth":
        if obj.get("version") != TRUTH_VERSION:
            raise ValueError(f"unsupported truth version {obj.get('version')!r}")
        return cls(
            width=int(obj["width"]),
            height=int(obj["height"]),
            word_boxes=tuple(Rect.from_list(r) for r in obj["word_boxes"]),
            char_boxes=tuple(tuple(Rect.from_list(r) for r in w) for w in obj["char_boxes"]),
            labels=tuple(tuple(w) for w in obj["labels"]),
            groups=tuple(tuple(w) for w in obj["groups"]),
            matra_span=tuple(obj["matra_span"]),
            baseline=int(obj["baseline"]),
        )


# -- stroke rendering --------------------------------------------------------


def _stamp(canvas: np.ndarray, x: float, y: float, t: int) -> None:
    h, w = canvas.shape
    c = int(round(x * (w - t)))
    r = int(round(y * (h - t)))
    canvas[max(r, 0) : r + t, max(c, 0) : c + t] = True


def render_program(program, width: int, height: int, stroke: int = STROKE) -> np.ndarray:
    """Rasterize a stroke program onto a width x height middle-zone canvas.

    Coordinates are normalized: x in [0, 1] left to right, y in [0, 1] from
    just under the headline down to the baseline.
    """
    canvas = np.zeros((height, width), dtype=bool)
    scale = max(width, height) * 2
    for prim in program:
        kind = prim[0]
        if kind == "seg":
            _, x0, y0, x1, y1 = prim
            n = int(math.ceil(max(abs(x1 - x0) * width, abs(y1 - y0) * height) * 2)) + 1
            for s in np.linspace(0.0, 1.0, n):
                _stamp(canvas, x0 + (x1 - x0) * s, y0 + (y1 - y0) * s, stroke)
        elif kind == "arc":
            _, cx, cy, rx, ry, th0, th1 = prim
            n = int(math.ceil(abs(th1 - th0) * scale)) + 1
            for th in np.linspace(th0, th1, n):
                _stamp(canvas, cx + rx * math.cos(th), cy + ry * math.sin(th), stroke)
        else:
            raise ValueError(f"unknown primitive {kind!r}")
    return canvas


def _rand(rng, lo, hi) -> float:
    return round(float(rng.uniform(lo, hi)), 3)


def _extra_primitive(rng, x0: float, x1: float):
    """One random stroke spanning [x0, x1] horizontally."""
    mid = (x0 + x1) / 2
    half = (x1 - x0) / 2
    choice = int(rng.integers(6))
    if choice == 0:  # closed loop
        ry = _rand(rng, 0.18, 0.35)
        return ("arc", mid, round(1 - ry, 3), half, ry, 0.0, round(2 * math.pi, 6))
    if choice == 1:  # slant
        return ("seg", x0, _rand(rng, 0.05, 0.5), x1, _rand(rng, 0.6, 1.0))
    if choice == 2:  # flat bar
        y = _rand(rng, 0.45, 1.0)
        return ("seg", x0, y, x1, y)
    if choice == 3:  # bowl
        ry = _rand(rng, 0.25, 0.6)
        return ("arc", mid, round(1 - ry, 3), half, ry, 0.0, round(math.pi, 6))
    if choice == 4:  # reverse slant
        return ("seg", x0, _rand(rng, 0.6, 1.0), x1, _rand(rng, 0.1, 0.5))
    # left stem with a foot
    y = _rand(rng, 0.3, 0.7)
    return ("seg", x0, y, x0, 1.0)


def _random_program(rng, group: str):
    if group == "modifier":
        bar = ("seg", 1.0, 0.0, 1.0, 1.0)
        choice = int(rng.integers(3))
        if choice == 0:  # stem joined at the foot
            return (bar, ("seg", 0.0, _rand(rng, 0.3, 0.6), 0.0, 1.0), ("seg", 0.0, 1.0, 1.0, 1.0))
        if choice == 1:  # small loop at the foot
            ry = _rand(rng, 0.12, 0.22)
            return (bar, ("arc", 0.5, round(1 - ry, 3), 0.5, ry, 0.0, round(2 * math.pi, 6)))
        return (bar, ("seg", 0.0, _rand(rng, 0.15, 0.4), 1.0, _rand(rng, 0.6, 0.9)))
    prog = [("seg", 1.0, 0.0, 1.0, 1.0)]
    if group == "basic":
        for _ in range(int(rng.integers(1, 3))):
            prog.append(_extra_primitive(rng, 0.0, 1.0))
        return tuple(prog)
    split = _rand(rng, 0.4, 0.6)
    prog.append(("seg", split, 0.0, split, _rand(rng, 0.5, 1.0)))
    prog.append(_extra_primitive(rng, 0.0, split))
    prog.append(_extra_primitive(rng, split, 1.0))
    if rng.random() < 0.5:
        prog.append(_extra_primitive(rng, 0.0, 1.0))
    return tuple(prog)


def glyph_ok(middle: np.ndarray) -> bool:
    """Structural guarantees every synthetic glyph must meet."""
    if not middle.any(axis=0).all() or not middle[-1].any():
        return False
    if middle[0].sum() * 2 > middle.shape[1]:
        return False
    return len(label_components(middle)) == 1


def _similar(a: np.ndarray, b: np.ndarray, limit: float) -> bool:
    from vidtext.classify import resample_nearest

    if abs(a.shape[1] - b.shape[1]) > 0.3 * min(a.shape[1], b.shape[1]):
        return False
    ra = resample_nearest(a, *b.shape)
    inter = np.count_nonzero(ra & b)
    return 2 * inter / (ra.sum() + b.sum()) >= limit


def _group_sizes(size: int) -> dict[str, int]:
    n_mod = max(1, round(0.2 * size))
    n_comp = max(1, round(0.3 * size))
    return {"modifier": n_mod, "basic": size - n_mod - n_comp, "compound": n_comp}


def generate_alphabet(
    size: int,
    seed: int = 0,
    glyph_w: tuple[int, int] = (12, 18),
    glyph_h: int = NOMINAL_HEIGHT,
    matra_thickness: int = 3,
    max_similarity: float = 0.8,
) -> list[Glyph]:
    """Procedural glyph set with every group represented; deterministic in (size, seed)."""
    if size < 3:
        raise ValueError("alphabet needs at least 3 glyphs (one per group)")
    rng = np.random.default_rng([seed, size])
    widths = {
        "modifier": (4, 7),
        "basic": glyph_w,
        "compound": (int(glyph_w[1] * 1.3), int(glyph_w[1] * 1.8)),
    }
    glyphs: list[Glyph] = []
    middles: list[np.ndarray] = []
    for group, count in _group_sizes(size).items():
        for _ in range(count):
            for _attempt in range(2000):
                w = int(rng.integers(widths[group][0], widths[group][1] + 1))
                program = _random_program(rng, group)
                middle = render_program(program, w, glyph_h)
                if glyph_ok(middle) and not any(_similar(middle, m, max_similarity) for m in middles):
                    break
            else:
                raise RuntimeError(f"could not build a distinct {group} glyph")
            middles.append(middle)
            image = np.vstack([np.ones((matra_thickness, w), dtype=bool), middle])
            glyphs.append(Glyph(f"g{len(glyphs):02d}", image, group, program, w))
    return glyphs


def render_glyph(glyph: Glyph, middle_h: int) -> np.ndarray:
    """Middle-zone bitmap of a glyph at the given middle-zone height."""
    if middle_h == NOMINAL_HEIGHT:
        return glyph.image[-NOMINAL_HEIGHT:]
    w = max(2, int(round(glyph.width * middle_h / NOMINAL_HEIGHT)))
    return render_program(glyph.program, w, middle_h)


# -- line composition --------------------------------------------------------


def _irange(rng, lo_hi) -> int:
    lo, hi = lo_hi
    return int(rng.integers(lo, hi + 1))


def generate_line(spec: SynthSpec, alphabet: list[Glyph] | None = None):
    """Render one line; returns (grayscale uint8 image, GroundTruth)."""
    if alphabet is None:
        alphabet = generate_alphabet(spec.alphabet_size, spec.alphabet_seed, spec.glyph_w)
    rng = np.random.default_rng(spec.seed)
    middle_h = _irange(rng, spec.glyph_h)
    t = spec.matra_thickness
    matra_top = TOP_MARGIN + UPPER_ZONE
    baseline = matra_top + t + middle_h - 1
    height = baseline + 1 + LOWER_ZONE + BOTTOM_MARGIN

    n_words = _irange(rng, spec.words)
    words = []
    for _ in range(n_words):
        n = _irange(rng, spec.glyphs_per_word)
        words.append([alphabet[int(i)] for i in rng.integers(0, len(alphabet), size=n)])
    spacing = [[_irange(rng, spec.char_spacing) for _ in w[1:]] for w in words]
    gaps = [_irange(rng, spec.gap_width) for _ in words[1:]]
    left = _irange(rng, spec.margin)
    right = _irange(rng, spec.margin)

    bitmaps = {g.label: render_glyph(g, middle_h) for w in words for g in w}
    width = left + right + sum(gaps)
    width += sum(sum(bitmaps[g.label].shape[1] for g in w) + sum(s) for w, s in zip(words, spacing))

    ink = np.zeros((height, width), dtype=bool)
    word_boxes, char_boxes, labels, groups = [], [], [], []
    x = left
    for wi, word in enumerate(words):
        if wi:
            x += gaps[wi - 1]
        x_start = x
        boxes = []
        for gi, g in enumerate(word):
            if gi:
                x += spacing[wi][gi - 1]
            mid = bitmaps[g.label]
            gw = mid.shape[1]
            ink[matra_top + t : baseline + 1, x : x + gw] |= mid
            # 2-px ticks stay inside the glyph's own columns
            if rng.random() < spec.ascender_prob:
                col = x + int(rng.integers(0, gw - 1))
                rise = int(rng.integers(3, UPPER_ZONE - 1))
                ink[matra_top - rise : matra_top, col : col + 2] = True
            if rng.random() < spec.descender_prob:
                feet = np.nonzero(mid[-1, :-1])[0]
                if feet.size:
                    col = x + int(feet[int(rng.integers(0, feet.size))])
                    depth = int(rng.integers(3, LOWER_ZONE))
                    ink[baseline + 1 : baseline + 1 + depth, col : col + 2] = True
            boxes.append(Rect(x, matra_top, gw, baseline - matra_top + 1))
            x += gw
        ink[matra_top : matra_top + t, x_start:x] = True
        char_boxes.append(tuple(boxes))
        labels.append(tuple(g.label for g in word))
        groups.append(tuple(g.group for g in word))

    for boxes in char_boxes:
        cols = slice(boxes[0].x0, boxes[-1].x1 + 1)
        rows = np.nonzero(ink[:, cols].any(axis=1))[0]
        word_boxes.append(
            Rect(boxes[0].x0, int(rows[0]), boxes[-1].x1 - boxes[0].x0 + 1, int(rows[-1] - rows[0] + 1))
        )

    if spec.polarity == "dark-on-light":
        fg, bg = int(rng.integers(20, 71)), int(rng.integers(170, 231))
    else:
        fg, bg = int(rng.integers(170, 231)), int(rng.integers(20, 71))
    ramp = spec.background_ramp * np.linspace(0.0, 1.0, width)[None, :]
    img = np.where(ink, float(fg), bg + ramp)
    if spec.noise_sigma > 0:
        img = img + rng.normal(0.0, spec.noise_sigma, img.shape)
    gray = np.clip(np.floor(img + 0.5), 0, 255).astype(np.uint8)

    truth = GroundTruth(
        width=width,
        height=height,
        word_boxes=tuple(word_boxes),
        char_boxes=tuple(char_boxes),
        labels=tuple(labels),
        groups=tuple(groups),
        matra_span=(matra_top, matra_top + t - 1),
        baseline=baseline,
    )
    return gray, truth


def line_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def generate_corpus(spec: SynthSpec, lines: int):
    """Yield (index, image, truth) for ``lines`` lines sharing one alphabet."""
    alphabet = generate_alphabet(spec.alphabet_size, spec.alphabet_seed, spec.glyph_w)
    for i in range(lines):
        img, truth = generate_line(replace(spec, seed=line_seed(spec.seed, i)), alphabet)
        yield i, img, truth


def write_corpus(spec: SynthSpec, lines: int, out_dir) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "corpus.json").write_text(
        json.dumps({"spec": spec.to_json(), "lines": lines}, sort_keys=True, indent=2) + "\n"
    )
    for i, img, truth in generate_corpus(spec, lines):
        (out / f"{i:04d}.pgm").write_bytes(encode_pgm(img))
        (out / f"{i:04d}.truth.json").write_text(json.dumps(truth.to_json(), sort_keys=True) + "\n")
    return out


def read_corpus(corpus_dir):
    """Yield (stem, image, truth) for every line of a corpus directory, in name order."""
    from vidtext.imaging import read_image

    root = Path(corpus_dir)
    for truth_path in sorted(root.glob("*.truth.json")):
        stem = truth_path.name[: -len(".truth.json")]
        img_path = root / f"{stem}.pgm"
        if not img_path.exists():
            img_path = root / f"{stem}.png"
        truth = GroundTruth.from_json(json.loads(truth_path.read_text()))
        yield stem, read_image(img_path), truth
