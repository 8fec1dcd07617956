import numpy as np
import pytest

from vidtext.classify import REJECT, DecisionTree, DiscriminantPlanes, GlyphTemplate, TreeNode
from vidtext.errors import BlankCharacter, InsufficientData
from vidtext.model import CharSample, RecognitionModel, recognize_character, train_model
from vidtext.pipeline import collect_samples

MATRA = (0, 1)
BASELINE = 11


def one_template_model(template):
    flat = DiscriminantPlanes(np.zeros(8), -1.0, np.zeros(8), 1.0)  # everything "basic"
    leaf = DecisionTree([TreeNode(0, "leaf", templates=[template])])
    return RecognitionModel(flat, leaf, DecisionTree([TreeNode(0, "leaf", templates=[template])]), [template.label])


def glyph_strip():
    s = np.zeros((14, 7), bool)
    s[0:2] = True
    s[2:12, 2] = True
    s[8, 2:6] = True
    return s


def test_single_template_model_recognizes_its_glyph():
    s = glyph_strip()
    model = one_template_model(GlyphTemplate.from_bitmap("k", s[:12]))
    rec = recognize_character(s, MATRA, BASELINE, model)
    assert (rec.label, rec.group, rec.score) == ("k", "basic", 1.0)


def test_out_of_tolerance_is_rejected():
    s = glyph_strip()
    model = one_template_model(GlyphTemplate.from_bitmap("k", np.ones((12, 30), bool)))
    rec = recognize_character(s, MATRA, BASELINE, model)
    assert rec.label == REJECT and rec.score == 0.0


def test_blank_character():
    model = one_template_model(GlyphTemplate.from_bitmap("k", np.ones((3, 3), bool)))
    with pytest.raises(BlankCharacter):
        recognize_character(np.zeros((14, 5), bool), MATRA, BASELINE, model)


def test_model_json_roundtrip(model, tmp_path):
    path = tmp_path / "m.json"
    model.save(path)
    again = RecognitionModel.load(path)
    assert again.dumps() == model.dumps()
    assert path.read_text() == model.dumps()


def test_model_file_rejects_foreign_json():
    with pytest.raises(ValueError):
        RecognitionModel.from_json({"format": "other"})


def test_trained_model_structure(model, alphabet):
    assert model.alphabet == sorted(g.label for g in alphabet)
    for tree in (model.basic_tree, model.compound_tree):
        for leaf in tree.leaves():
            assert leaf.templates
            assert {t.label for t in leaf.templates} <= set(model.alphabet)
        for node in tree.nodes:
            if node.kind != "leaf":
                assert node.true is not None and node.false is not None
    assert np.isfinite(model.planes.a).all() and np.any(model.planes.a)


def test_self_recognition_on_training_renders(model, train_lines):
    samples = collect_samples(train_lines)
    hits = sum(
        recognize_character(s.strip, s.matra, s.baseline, model).label == s.label for s in samples
    )
    assert hits == len(samples)


def test_missing_group(train_lines):
    samples = [s for s in collect_samples(train_lines[:5]) if s.group != "compound"]
    with pytest.raises(InsufficientData):
        train_model(samples)
    with pytest.raises(InsufficientData):
        train_model([])


def test_retraining_is_byte_identical(train_lines):
    samples = collect_samples(train_lines[:8])
    assert train_model(samples).dumps() == train_model(list(reversed(samples))).dumps()


def test_char_sample_fields():
    s = CharSample("x", "basic", glyph_strip(), MATRA, BASELINE)
    assert s.strip.shape == (14, 7)
