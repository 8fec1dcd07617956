"""End-to-end line processing, evaluation and training-set collection.

Result JSON (one object per line)::

    {"format": "vidtext-result", "version": 1, "width", "height",
     "status": "ok" | "failed", "failure": null | "<ErrorName>: <message>",
     "gaps": [[first_col, last_col], ...],
     "words": [[x0, y0, w, h], ...],
     "matra": [top, bottom] | null, "baseline": row | null,
     "characters": [{"word": i, "rect": [x0, y0, w, h],
                     "label": str | null, "group": str | null, "score": float | null}, ...]}
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from vidtext.charseg import extract_characters
from vidtext.classify import REJECT
from vidtext.components import remove_noise
from vidtext.errors import BlankCharacter, EmptyLine, InvalidStructure, LengthMismatch
from vidtext.gradient import absolute_gradient, binarize_word, kmeans_binarize
from vidtext.imaging import Rect, encode_png
from vidtext.line_structure import (
    Span,
    detect_baseline,
    detect_matra,
    detect_word_gaps,
    edge_gaps_to_pixel_gaps,
    horizontal_projection,
    reassemble_line,
    split_words,
    split_zones,
    vertical_projection,
)
from vidtext.model import CharSample, RecognitionModel, recognize_character, train_model

RESULT_FORMAT = "vidtext-result"
RESULT_VERSION = 1


@dataclass(frozen=True)
class PipelineConfig:
    min_gap_width: int = 2
    matra_band: float = 0.85
    max_dev: int = 3
    width_tol: float = 0.25
    iou: float = 0.8


@dataclass
class LineAnalysis:
    """Intermediate rasters kept for debugging and overlays."""

    gradient: np.ndarray | None = None
    edges: np.ndarray | None = None
    clean_edges: np.ndarray | None = None
    binary: np.ndarray | None = None


@dataclass(frozen=True)
class CharResult:
    word: int
    rect: Rect
    label: str | None = None
    group: str | None = None
    score: float | None = None


@dataclass
class TranscriptionResult:
    width: int
    height: int
    gaps: list[Span] = field(default_factory=list)
    word_boxes: list[Rect] = field(default_factory=list)
    matra: Span | None = None
    baseline: int | None = None
    characters: list[CharResult] = field(default_factory=list)
    failure: str | None = None
    analysis: LineAnalysis | None = field(default=None, repr=False, compare=False)

    @property
    def ok(self) -> bool:
        return self.failure is None

    def to_json(self) -> dict:
        return {
            "format": RESULT_FORMAT,
            "version": RESULT_VERSION,
            "width": self.width,
            "height": self.height,
            "status": "ok" if self.ok else "failed",
            "failure": self.failure,
            "gaps": [list(g) for g in self.gaps],
            "words": [r.to_list() for r in self.word_boxes],
            "matra": None if self.matra is None else list(self.matra),
            "baseline": self.baseline,
            "characters": [
                {"word": c.word, "rect": c.rect.to_list(), "label": c.label, "group": c.group, "score": c.score}
                for c in self.characters
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=1) + "\n"

    @classmethod
    def from_json(cls, obj: dict) -> "TranscriptionResult":
        if obj.get("format") != RESULT_FORMAT:
            raise ValueError("not a vidtext result file")
        return cls(
            width=int(obj["width"]),
            height=int(obj["height"]),
            gaps=[tuple(g) for g in obj["gaps"]],
            word_boxes=[Rect.from_list(r) for r in obj["words"]],
            matra=None if obj["matra"] is None else tuple(obj["matra"]),
            baseline=obj["baseline"],
            characters=[
                CharResult(c["word"], Rect.from_list(c["rect"]), c["label"], c["group"], c["score"])
                for c in obj["characters"]
            ],
            failure=obj["failure"],
        )


def binarize_line(line: np.ndarray, config: PipelineConfig = PipelineConfig()):
    """Edge map -> word gaps -> per-word Otsu -> reassembled binary line.

    Returns (gaps, word boxes, binary line, LineAnalysis).
    """
    gmap = absolute_gradient(line)
    edges = kmeans_binarize(gmap)
    clean = remove_noise(edges)
    edge_gaps = detect_word_gaps(vertical_projection(clean), config.min_gap_width)
    gaps = edge_gaps_to_pixel_gaps(edge_gaps)
    words = split_words(line, gaps)
    height, width = line.shape
    binary = reassemble_line([(r, binarize_word(line, r)) for r in words], width, height)
    return gaps, words, binary, LineAnalysis(gmap, edges, clean, binary)


def run_pipeline(
    line: np.ndarray, model: RecognitionModel | None = None, config: PipelineConfig = PipelineConfig()
) -> TranscriptionResult:
    """Segment (and, given a model, recognize) one grayscale text line.

    Structural failures are recorded on the result instead of raised.
    """
    line = np.asarray(line)
    height, width = line.shape
    result = TranscriptionResult(width, height)
    try:
        gaps, words, binary, analysis = binarize_line(line, config)
        result.analysis = analysis
        if not analysis.clean_edges.any() or not binary.any():
            raise EmptyLine("no text pixels found")
        result.gaps = [tuple(int(v) for v in g) for g in gaps]
        result.word_boxes = list(words)
        matra = detect_matra(horizontal_projection(binary), config.matra_band)
        baseline = detect_baseline(binary, matra)
        split_zones(binary, matra, baseline)
        result.matra, result.baseline = matra, baseline
    except (EmptyLine, InvalidStructure) as exc:
        result.failure = f"{type(exc).__name__}: {exc}"
        return result

    for wi, word in enumerate(words):
        word_bin = binary[:, word.x0 : word.x0 + word.w]
        for cb in extract_characters(word_bin, matra, baseline, 1, config.max_dev):
            rect = replace(cb.rect, x0=cb.rect.x0 + word.x0)
            if model is None:
                result.characters.append(CharResult(wi, rect))
                continue
            strip = binary[:, rect.x0 : rect.x0 + rect.w]
            try:
                rec = recognize_character(strip, matra, baseline, model, config.width_tol)
                result.characters.append(CharResult(wi, rect, rec.label, rec.group, rec.score))
            except BlankCharacter:
                result.characters.append(CharResult(wi, rect, REJECT, None, 0.0))
    return result


# -- evaluation --------------------------------------------------------------


@dataclass(frozen=True)
class Metrics:
    total_lines: int
    failed_lines: int
    total_words: int
    total_gaps: int
    gaps_recovered: int
    total_chars: int
    chars_segmented_correctly: int
    chars_recognized: int

    @property
    def gap_recovery_rate(self) -> float:
        return self.gaps_recovered / self.total_gaps if self.total_gaps else 1.0

    @property
    def segmentation_rate(self) -> float:
        return self.chars_segmented_correctly / self.total_chars if self.total_chars else 0.0

    @property
    def recognition_rate(self) -> float:
        return self.chars_recognized / self.total_chars if self.total_chars else 0.0

    def to_json(self) -> dict:
        return {
            "total_lines": self.total_lines,
            "failed_lines": self.failed_lines,
            "total_words": self.total_words,
            "total_gaps": self.total_gaps,
            "gaps_recovered": self.gaps_recovered,
            "gap_recovery_rate": self.gap_recovery_rate,
            "total_chars": self.total_chars,
            "chars_segmented_correctly": self.chars_segmented_correctly,
            "chars_recognized": self.chars_recognized,
            "segmentation_rate": self.segmentation_rate,
            "recognition_rate": self.recognition_rate,
            "recognition_rate_pct": format_rate(self.recognition_rate),
        }


def format_rate(rate: float) -> str:
    """Percentage truncated (not rounded) to one decimal, e.g. 0.81553 -> '81.5%'."""
    tenths = int(rate * 1000 + 1e-9)
    return f"{tenths // 10}.{tenths % 10}%"


def column_iou(a: Rect, b: Rect) -> float:
    inter = min(a.x1, b.x1) - max(a.x0, b.x0) + 1
    if inter <= 0:
        return 0.0
    return inter / (a.w + b.w - inter)


def match_boxes(pred: list[Rect], truth: list[Rect], threshold: float) -> list[tuple[int, int]]:
    """Greedy one-to-one (pred, truth) matching by descending column IoU."""
    pairs = []
    for i, p in enumerate(pred):
        for j, t in enumerate(truth):
            iou = column_iou(p, t)
            if iou >= threshold:
                pairs.append((-iou, j, i))
    pairs.sort()
    used_p, used_t, out = set(), set(), []
    for _, j, i in pairs:
        if i not in used_p and j not in used_t:
            used_p.add(i)
            used_t.add(j)
            out.append((i, j))
    return out


def evaluate(results, truths, iou: float = 0.8) -> Metrics:
    results = list(results)
    truths = list(truths)
    if len(results) != len(truths):
        raise LengthMismatch(f"{len(results)} results vs {len(truths)} truths")
    failed = words = gaps = gaps_ok = chars = seg = rec = 0
    for res, truth in zip(results, truths):
        failed += not res.ok
        words += len(truth.word_boxes)
        truth_gaps = set(truth.gaps)
        gaps += len(truth_gaps)
        gaps_ok += len(truth_gaps & {tuple(g) for g in res.gaps})
        t_boxes = [b for w in truth.char_boxes for b in w]
        t_labels = [lab for w in truth.labels for lab in w]
        chars += len(t_boxes)
        matches = match_boxes([c.rect for c in res.characters], t_boxes, iou)
        seg += len(matches)
        rec += sum(res.characters[i].label == t_labels[j] for i, j in matches)
    return Metrics(len(results), failed, words, gaps, gaps_ok, chars, seg, rec)


# -- training data -----------------------------------------------------------


def collect_samples(lines, config: PipelineConfig = PipelineConfig()) -> list[CharSample]:
    """Labelled character strips from (image, truth) pairs, cut at truth boxes."""
    samples = []
    for img, truth in lines:
        _, _, binary, _ = binarize_line(img, config)
        for boxes, labels, groups in zip(truth.char_boxes, truth.labels, truth.groups):
            for box, label, group in zip(boxes, labels, groups):
                strip = binary[:, box.x0 : box.x1 + 1]
                core = strip[truth.matra_span[0] : truth.baseline + 1]
                if core.any():
                    samples.append(CharSample(label, group, strip, truth.matra_span, truth.baseline))
    return samples


def train_from_corpus(lines, config: PipelineConfig = PipelineConfig(), **kwargs) -> RecognitionModel:
    return train_model(collect_samples(lines, config), width_tol=config.width_tol, **kwargs)


# -- overlays ----------------------------------------------------------------

GAP_RGB = (255, 0, 255)
MATRA_RGB = (0, 200, 0)
BASELINE_RGB = (255, 0, 0)
BOUNDARY_RGB = (0, 90, 255)


def overlay_image(line: np.ndarray, result: TranscriptionResult) -> np.ndarray:
    """RGB view of a line with gaps, headline rows, baseline and char edges marked."""
    rgb = np.repeat(np.asarray(line, dtype=np.uint8)[..., None], 3, axis=2)
    for a, b in result.gaps:
        rgb[:, a : b + 1] = (rgb[:, a : b + 1] // 2 + np.array(GAP_RGB) // 2).astype(np.uint8)
    if result.matra is not None:
        rgb[result.matra[0] : result.matra[1] + 1, :, :] = MATRA_RGB
    if result.baseline is not None:
        rgb[result.baseline, :, :] = BASELINE_RGB
    for c in result.characters:
        rgb[c.rect.y0 : c.rect.y1 + 1, c.rect.x0] = BOUNDARY_RGB
        rgb[c.rect.y0 : c.rect.y1 + 1, c.rect.x1] = BOUNDARY_RGB
    return rgb


def dump_overlays(out_dir, stem: str, line: np.ndarray, result: TranscriptionResult) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{stem}.overlay.png").write_bytes(encode_png(overlay_image(line, result)))
    if result.analysis is not None:
        for name in ("edges", "clean_edges", "binary"):
            img = getattr(result.analysis, name)
            if img is not None:
                (out / f"{stem}.{name}.png").write_bytes(encode_png(img))
