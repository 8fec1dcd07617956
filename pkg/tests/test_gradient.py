from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st
from hypothesis.extra.numpy import arrays

import oracles
from vidtext.errors import Degenerate, DimensionMismatch, TooSmall
from vidtext.gradient import (
    binarize_word,
    combine_and_normalize,
    horizontal_gradient,
    kmeans_binarize,
    kmeans_threshold,
    otsu_threshold,
    vertical_gradient,
)
from vidtext.imaging import Rect

gray_images = arrays(np.uint8, st.tuples(st.integers(2, 12), st.integers(2, 12)))


def test_horizontal_gradient_row():
    assert horizontal_gradient(np.array([[10, 60, 60]], np.uint8)).tolist() == [[50, 0, 0]]


def test_vertical_gradient_column():
    assert vertical_gradient(np.array([[0], [255]], np.uint8)).tolist() == [[255], [0]]


def test_constant_image_has_zero_gradient():
    img = np.full((4, 5), 77, np.uint8)
    assert not horizontal_gradient(img).any()
    assert not vertical_gradient(img).any()


def test_gradient_too_small():
    with pytest.raises(TooSmall):
        horizontal_gradient(np.zeros((3, 1), np.uint8))
    with pytest.raises(TooSmall):
        vertical_gradient(np.zeros((1, 3), np.uint8))


def test_gradient_matches_oracle_5x5(rng):
    img = rng.integers(0, 256, (5, 5), dtype=np.uint8)
    assert horizontal_gradient(img).tolist() == oracles.gradient_x(img.tolist())
    assert vertical_gradient(img).tolist() == oracles.gradient_y(img.tolist())


@given(gray_images, st.integers(1, 3), st.integers(1, 3))
def test_gradient_translation_equivariant(img, dy, dx):
    h, w = img.shape
    big = np.zeros((h + dy, w + dx), np.uint8)
    big[dy:, dx:] = img
    # away from the padded border the shifted map is the shifted original
    assert np.array_equal(horizontal_gradient(big)[dy:, dx:-1], horizontal_gradient(img)[:, :-1])
    assert np.array_equal(vertical_gradient(big)[dy:-1, dx:], vertical_gradient(img)[:-1, :])


def test_combine_constant_maps():
    z = np.zeros((3, 3), np.int32)
    assert not combine_and_normalize(z, z).any()
    one = np.array([[100]])
    assert combine_and_normalize(one, one).tolist() == [[0]]


def test_combine_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        combine_and_normalize(np.zeros((2, 2)), np.zeros((2, 3)))


@given(
    arrays(np.int32, (6, 7), elements=st.integers(0, 255)),
    arrays(np.int32, (6, 7), elements=st.integers(0, 255)),
)
def test_combine_is_monotone_stretch(gx, gy):
    raw = gx + gy
    assume(raw.max() > raw.min())
    out = combine_and_normalize(gx, gy)
    assert out.min() == 0 and out.max() == 255
    flat_raw, flat_out = raw.ravel(), out.ravel()
    order = np.argsort(flat_raw, kind="stable")
    assert (np.diff(flat_out[order]) >= 0).all()
    # each output is the half-up rounding of the exact stretch
    lo, span = int(raw.min()), int(raw.max() - raw.min())
    for r, o in zip(flat_raw[:10], flat_out[:10]):
        exact = Fraction(255 * (int(r) - lo), span)
        assert o == int(exact + Fraction(1, 2))


def test_kmeans_obvious_split():
    g = np.array([0] * 10 + [200] * 5).reshape(3, 5)
    fg = kmeans_binarize(g)
    assert fg.sum() == 5
    assert (g[fg] == 200).all()


def test_kmeans_constant_map_is_background():
    assert not kmeans_binarize(np.full((4, 4), 9)).any()


def test_kmeans_small_set():
    vals = np.array([0, 1, 2, 100, 101])
    assert kmeans_binarize(vals).tolist() == [False, False, False, True, True]
    # exhaustive SSE scan agrees
    assert oracles.kmeans_min_sse(vals) == oracles.sse([0, 1, 2]) + oracles.sse([100, 101])


@settings(max_examples=60)
@given(st.lists(st.integers(0, 255), min_size=2, max_size=40))
def test_kmeans_is_threshold_partition_with_min_sse(values):
    vals = np.array(values)
    assume(len(set(values)) > 1)
    fg = kmeans_binarize(vals)
    t = kmeans_threshold(vals)
    assert np.array_equal(fg, vals > t)
    got = oracles.sse(vals[fg].tolist()) + oracles.sse(vals[~fg].tolist())
    assert got == oracles.kmeans_min_sse(values)


def test_kmeans_float_values():
    vals = np.array([0.1, 0.2, 0.15, 5.0, 5.5])
    assert kmeans_binarize(vals).tolist() == [False, False, False, True, True]


def test_otsu_bimodal():
    img = np.array([0] * 50 + [255] * 50, np.uint8).reshape(10, 10)
    assert otsu_threshold(img, Rect.full(img)) == 0


def test_otsu_constant_region():
    with pytest.raises(Degenerate):
        otsu_threshold(np.full((3, 3), 5, np.uint8), Rect(0, 0, 3, 3))


def test_otsu_matches_exhaustive_16_values(rng):
    levels = rng.choice(256, 16, replace=False)
    counts = rng.integers(1, 20, 16)
    pixels = np.repeat(levels, counts).astype(np.uint8)[None, :]
    assert otsu_threshold(pixels) == oracles.otsu(pixels.ravel())


def test_otsu_respects_region():
    img = np.zeros((4, 8), np.uint8)
    img[:, 4:] = np.array([10, 10, 90, 90] * 4).reshape(4, 4)
    assert otsu_threshold(img, Rect(4, 0, 4, 4)) == 10


def glyph_region(ink, ground):
    img = np.full((10, 10), ground, np.uint8)
    img[2:6, 3:8] = ink  # 20 of 100 pixels
    return img


def test_binarize_word_dark_text():
    img = glyph_region(30, 220)
    fg = binarize_word(img, Rect.full(img))
    assert fg.sum() == 20 and (img[fg] == 30).all()


def test_binarize_word_light_text():
    img = glyph_region(220, 30)
    fg = binarize_word(img, Rect.full(img))
    assert fg.sum() == 20 and (img[fg] == 220).all()


def test_binarize_word_even_split_prefers_busier_class():
    # 4 x 4 region, 8 dark / 8 light; dark pixels are isolated (high gradient),
    # light pixels form a block along the bottom and right.
    rows = ["D.D.", ".D.D", "D.D.", ".D.D"]
    img = np.array([[30 if ch == "D" else 200 for ch in r] for r in rows], np.uint8)
    img[2:, :] = np.array([[30, 200, 200, 200], [30, 30, 30, 200]], np.uint8)
    dark = img == 30
    assert dark.sum() == 8
    gx, gy = np.array(oracles.gradient_x(img.tolist())), np.array(oracles.gradient_y(img.tolist()))
    mag = gx + gy
    expected = dark if mag[dark].mean() > mag[~dark].mean() else ~dark
    assert np.array_equal(binarize_word(img, Rect.full(img)), expected)


def test_binarize_word_constant_region():
    img = np.full((5, 5), 100, np.uint8)
    assert not binarize_word(img, Rect.full(img)).any()


@given(arrays(np.uint8, st.tuples(st.integers(2, 8), st.integers(2, 8))))
def test_binarize_word_polarity_invariant(img):
    assume(len(np.unique(img)) > 1)
    # restrict to images whose Otsu partition is unique and not an even split
    t = oracles.otsu(img.ravel())
    split = img > t
    inv = 255 - img
    assume(np.array_equal(inv > oracles.otsu(inv.ravel()), ~split))
    assume(2 * split.sum() != split.size)
    r = Rect.full(img)
    assert np.array_equal(binarize_word(img, r), binarize_word(inv, r))
