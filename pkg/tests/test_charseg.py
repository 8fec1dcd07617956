import numpy as np
from hypothesis import given, settings, strategies as st

import oracles
from vidtext.charseg import extract_characters, piecewise_scan, remove_matra, straight_scan_boundaries
from vidtext.components import label_components
from vidtext.pipeline import binarize_line
from vidtext.synth import SynthSpec, generate_line

MATRA = (0, 1)
BASELINE = 11


def with_headline(middle):
    """Stack a 2-row headline over a 10-row middle zone."""
    h, w = middle.shape
    img = np.zeros((h + 2, w), bool)
    img[:2] = True
    img[2:] = middle
    return img


def kerned_pair():
    img = np.zeros((12, 14), bool)
    img[:2, :] = True
    img[2:12, 1:3] = True  # left stem
    img[2:4, 1:9] = True  # its arm overhangs the right glyph by two columns
    img[6:12, 7:13] = True  # right glyph
    return img


def test_remove_matra():
    img = np.zeros((6, 5), bool)
    img[1:3] = True
    assert not remove_matra(img, (1, 2)).any()
    img[4, 2] = True
    assert remove_matra(img, (1, 2)).sum() == 1


def test_remove_matra_separates_joined_glyphs():
    img = np.zeros((8, 7), bool)
    img[0:2] = True
    img[2:8, 1] = True
    img[2:8, 5] = True
    assert len(label_components(img)) == 1
    assert len(label_components(remove_matra(img, (0, 1)))) == 2


def test_straight_scan_two_glyphs():
    middle = np.zeros((10, 16), bool)
    middle[:, 0:6] = True
    middle[:, 10:16] = True
    assert straight_scan_boundaries(with_headline(middle), MATRA, BASELINE) == [(6, 9)]


def test_straight_scan_single_wide_glyph():
    middle = np.ones((10, 8), bool)
    assert straight_scan_boundaries(with_headline(middle), MATRA, BASELINE) == []


def test_piecewise_straight_column():
    middle = np.zeros((10, 9), bool)
    middle[:, :3] = True
    middle[:, 6:] = True
    path = piecewise_scan(with_headline(middle), 4, MATRA, BASELINE)
    assert path.cols == (4,) * 10
    assert path.deviation == 0


def test_piecewise_blocked():
    assert piecewise_scan(with_headline(np.ones((10, 9), bool)), 4, MATRA, BASELINE) is None


def test_piecewise_kerned_pair_matches_oracle():
    img = kerned_pair()
    assert straight_scan_boundaries(img, MATRA, BASELINE) == [(0, 0), (13, 13)]
    path = piecewise_scan(img, 7, MATRA, BASELINE, max_dev=3)
    assert path is not None
    assert path.max_deviation == 2
    assert path.rows == tuple(range(11, 1, -1))
    assert path.deviation == oracles.seam_cost(img.tolist(), 7, 2, 11, 3)
    assert not any(img[r, c] for r, c in zip(path.rows, path.cols))


def test_kerned_pair_is_split_into_disjoint_boxes():
    img = kerned_pair()
    boxes = extract_characters(img, MATRA, BASELINE)
    assert len(boxes) == 2
    left, right = boxes[0].rect, boxes[1].rect
    assert left.x0 == 1 and right.x1 == 12
    assert left.x1 < right.x0
    assert extract_characters(img, MATRA, BASELINE, max_dev=0)[0].rect.w == 12


def test_touching_glyphs_stay_joined():
    middle = np.zeros((10, 10), bool)
    middle[:, 1:4] = True
    middle[:, 6:9] = True
    middle[5, 4:6] = True
    assert len(extract_characters(with_headline(middle), MATRA, BASELINE)) == 1


def test_two_separated_glyphs():
    middle = np.zeros((10, 16), bool)
    middle[:, 0:6] = True
    middle[:, 10:16] = True
    boxes = extract_characters(with_headline(middle), MATRA, BASELINE)
    assert [(b.rect.x0, b.rect.w, b.order) for b in boxes] == [(0, 6, 0), (10, 6, 1)]
    assert all(b.rect.y0 == 0 and b.rect.h == 12 for b in boxes)


def test_blank_word():
    assert extract_characters(np.zeros((12, 10), bool), MATRA, BASELINE) == []


def test_five_glyph_synthetic_word():
    spec = SynthSpec(seed=5, words=(1, 1), glyphs_per_word=(5, 5), ascender_prob=0, descender_prob=0)
    img, truth = generate_line(spec)
    _, words, binary, _ = binarize_line(img)
    word = words[0]
    boxes = extract_characters(binary[:, word.x0 : word.x1 + 1], truth.matra_span, truth.baseline)
    got = [(b.rect.x0 + word.x0, b.rect.w) for b in boxes]
    assert got == [(r.x0, r.w) for r in truth.char_boxes[0]]


@st.composite
def sparse_middles(draw):
    w = draw(st.integers(3, 24))
    density = draw(st.sampled_from([0.1, 0.25, 0.4]))
    seed = draw(st.integers(0, 2**32 - 1))
    return np.random.default_rng(seed).random((10, w)) < density


@settings(max_examples=80)
@given(sparse_middles(), st.integers(0, 3))
def test_boxes_partition_middle_zone_ink(middle, max_dev):
    img = with_headline(middle)
    boxes = [b.rect for b in extract_characters(img, MATRA, BASELINE, max_dev=max_dev)]
    for a, b in zip(boxes, boxes[1:]):
        assert a.x1 < b.x0
    owner = np.zeros(middle.shape[1], int)
    for r in boxes:
        owner[r.x0 : r.x1 + 1] += 1
    assert (owner <= 1).all()
    ink_cols = middle.any(axis=0)
    assert (owner[ink_cols] == 1).all()


@settings(max_examples=80)
@given(sparse_middles())
def test_max_dev_zero_is_straight_scan(middle):
    img = with_headline(middle)
    boxes = [(b.rect.x0, b.rect.x1) for b in extract_characters(img, MATRA, BASELINE, max_dev=0)]
    clear = straight_scan_boundaries(img, MATRA, BASELINE)
    w = middle.shape[1]
    expected, start = [], 0
    for a, b in clear + [(w, w)]:
        if a > start:
            expected.append((start, a - 1))
        start = b + 1
    assert boxes == expected


@settings(max_examples=100)
@given(sparse_middles(), st.data())
def test_piecewise_matches_shortest_path_oracle(middle, data):
    img = with_headline(middle)
    start = data.draw(st.integers(0, middle.shape[1] - 1))
    max_dev = data.draw(st.integers(0, 3))
    path = piecewise_scan(img, start, MATRA, BASELINE, max_dev)
    cost = oracles.seam_cost(img.tolist(), start, 2, BASELINE, max_dev)
    if cost is None:
        assert path is None
        return
    assert path.deviation == cost
    assert path.max_deviation <= max_dev
    assert not any(img[r, c] for r, c in zip(path.rows, path.cols))
    assert all(abs(a - b) <= 1 for a, b in zip(path.cols, path.cols[1:]))
