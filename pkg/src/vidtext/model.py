"""Recognition model: training, persistence and per-character recognition.

Model file (JSON, one object)::

    {
      "format": "vidtext-model",
      "version": 1,
      "planes": {"a": [a0, a1, ..., a8], "b": [b0, b1, ..., b8]},
      "params": {"headline_threshold": 0.6, "vertical_threshold": 0.7, "width_tol": 0.25},
      "alphabet": ["g00", ...],
      "trees": {"basic": TREE, "compound": TREE},
      "metadata": {...}
    }

    TREE = {"root": 0, "nodes": [NODE, ...]}
    NODE = {"id", "kind": "width"|"headline"|"vertical_line"|"left_slant"|"upper_signature",
            "threshold", "true", "false"}
         | {"id", "kind": "leaf", "templates": [{"label", "w", "h", "rows": [[[start, end], ...], ...]}]}

Plane vectors store the offset first: a plane scores ``a1*f1 + ... + a8*f7b - a0``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from vidtext import classify
from vidtext.classify import (
    REJECT,
    DecisionTree,
    DiscriminantPlanes,
    GlyphTemplate,
    group_character,
    template_match,
    tree_classify,
)
from vidtext.errors import InsufficientData
from vidtext.features import char_core, extract_features
from vidtext.line_structure import Span

MODEL_FORMAT = "vidtext-model"
MODEL_VERSION = 1


@dataclass(frozen=True)
class Recognition:
    label: str
    group: str
    score: float


@dataclass
class RecognitionModel:
    planes: DiscriminantPlanes
    basic_tree: DecisionTree
    compound_tree: DecisionTree
    alphabet: list[str]
    metadata: dict = field(default_factory=dict)
    headline_threshold: float = classify.HEADLINE_THRESHOLD
    vertical_threshold: float = classify.VERTICAL_THRESHOLD
    width_tol: float = classify.WIDTH_TOL

    def to_json(self) -> dict:
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "planes": self.planes.to_json(),
            "params": {
                "headline_threshold": self.headline_threshold,
                "vertical_threshold": self.vertical_threshold,
                "width_tol": self.width_tol,
            },
            "alphabet": list(self.alphabet),
            "trees": {"basic": self.basic_tree.to_json(), "compound": self.compound_tree.to_json()},
            "metadata": self.metadata,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "RecognitionModel":
        if obj.get("format") != MODEL_FORMAT:
            raise ValueError("not a vidtext model file")
        if obj.get("version") != MODEL_VERSION:
            raise ValueError(f"unsupported model version {obj.get('version')!r}")
        params = obj.get("params", {})
        return cls(
            planes=DiscriminantPlanes.from_json(obj["planes"]),
            basic_tree=DecisionTree.from_json(obj["trees"]["basic"]),
            compound_tree=DecisionTree.from_json(obj["trees"]["compound"]),
            alphabet=list(obj["alphabet"]),
            metadata=obj.get("metadata", {}),
            headline_threshold=float(params.get("headline_threshold", classify.HEADLINE_THRESHOLD)),
            vertical_threshold=float(params.get("vertical_threshold", classify.VERTICAL_THRESHOLD)),
            width_tol=float(params.get("width_tol", classify.WIDTH_TOL)),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":")) + "\n"

    def save(self, path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def load(cls, path) -> "RecognitionModel":
        return cls.from_json(json.loads(Path(path).read_text()))


def _thresholded(tree: DecisionTree, model: RecognitionModel) -> DecisionTree:
    # nodes saved without a threshold fall back to the model-wide defaults
    for node in tree.nodes:
        if node.threshold is None and node.kind == "headline":
            node.threshold = model.headline_threshold
        elif node.threshold is None and node.kind == "vertical_line":
            node.threshold = model.vertical_threshold
    return tree


def recognize_character(
    char: np.ndarray, matra: Span, baseline: int, model: RecognitionModel, width_tol: float | None = None
) -> Recognition:
    """Group the character, route it through its tree, then template-match at the leaf."""
    fv = extract_features(char, matra, baseline)
    group = group_character(fv, model.planes)
    tree = model.compound_tree if group == "compound" else model.basic_tree
    leaf = _thresholded(tree, model).node(tree_classify(fv, tree))
    tol = model.width_tol if width_tol is None else width_tol
    hit = template_match(char_core(char, matra, baseline), leaf.templates, tol)
    if hit is None:
        return Recognition(REJECT, group, 0.0)
    return Recognition(hit[0], group, float(hit[1]))


@dataclass(frozen=True)
class CharSample:
    """One labelled training character as a full-height strip of its line."""

    label: str
    group: str
    strip: np.ndarray
    matra: Span
    baseline: int


def train_model(
    samples,
    headline_threshold: float = classify.HEADLINE_THRESHOLD,
    vertical_threshold: float = classify.VERTICAL_THRESHOLD,
    width_tol: float = classify.WIDTH_TOL,
    max_iter: int = classify.MAX_ITER,
    metadata: dict | None = None,
) -> RecognitionModel:
    """Fit grouping planes, grow the two default trees and store templates."""
    samples = list(samples)
    if not samples:
        raise InsufficientData("empty training set")
    feats = [extract_features(s.strip, s.matra, s.baseline) for s in samples]
    planes = classify.train_planes(
        [(fv, s.group) for fv, s in zip(feats, samples)], max_iter=max_iter
    )
    basic_items, compound_items = [], []
    for fv, s in zip(feats, samples):
        (template,) = classify.build_templates([(s.label, char_core(s.strip, s.matra, s.baseline))])
        (compound_items if s.group == "compound" else basic_items).append((fv, template))
    alphabet = sorted({s.label for s in samples})
    meta = {"samples": len(samples), "labels": len(alphabet)}
    meta.update(metadata or {})
    return RecognitionModel(
        planes=planes,
        basic_tree=classify.grow_default_tree(basic_items, headline_threshold),
        compound_tree=classify.grow_default_tree(compound_items, headline_threshold),
        alphabet=alphabet,
        metadata=meta,
        headline_threshold=headline_threshold,
        vertical_threshold=vertical_threshold,
        width_tol=width_tol,
    )


__all__ = [
    "CharSample",
    "GlyphTemplate",
    "Recognition",
    "RecognitionModel",
    "recognize_character",
    "train_model",
]
