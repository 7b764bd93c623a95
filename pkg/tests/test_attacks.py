import numpy as np
import pytest

from hvwmark.attacks import ChannelParams, crop_attack, mark_attack, print_scan_sim
from hvwmark.images import BitImage


def halftone_like(seed=0, shape=(64, 64)):
    rng = np.random.default_rng(seed)
    return BitImage(rng.choice([0, 255], shape).astype(np.uint8))


# --- parameter validation --------------------------------------------------


def test_channel_params_defaults_are_neutral():
    p = ChannelParams()
    assert (p.blur_sigma, p.noise_sigma, p.rotate_degrees, p.scale) == (0.0, 0.0, 0.0, 1.0)
    assert p.rebinarize_threshold == 128 and p.rng_seed == 0


def test_channel_params_validation():
    with pytest.raises(ValueError, match="sigma"):
        ChannelParams(blur_sigma=-1)
    with pytest.raises(ValueError, match="sigma"):
        ChannelParams(noise_sigma=-0.5)
    with pytest.raises(ValueError, match="scale"):
        ChannelParams(scale=0.0)
    with pytest.raises(ValueError, match="threshold"):
        ChannelParams(rebinarize_threshold=256)


# --- crop ------------------------------------------------------------------


def test_crop_outside_rect_untouched():
    img = halftone_like(1)
    out = crop_attack(img, (8, 8, 16, 16), 0)
    assert np.all(out.pixels[8:24, 8:24] == 0)
    mask = np.ones(img.pixels.shape, bool)
    mask[8:24, 8:24] = False
    assert np.array_equal(out.pixels[mask], img.pixels[mask])


def test_crop_zero_extent_is_identity():
    img = halftone_like(2)
    out = crop_attack(img, (10, 10, 0, 0), 255)
    assert np.array_equal(out.pixels, img.pixels)


def test_crop_full_frame():
    img = halftone_like(3)
    out = crop_attack(img, (0, 0, 64, 64), 255)
    assert np.all(out.pixels == 255)


def test_crop_does_not_mutate_input():
    img = halftone_like(4)
    before = img.pixels.copy()
    crop_attack(img, (0, 0, 32, 32), 0)
    assert np.array_equal(img.pixels, before)


def test_crop_validation():
    img = halftone_like(5)
    with pytest.raises(ValueError, match="out of bounds"):
        crop_attack(img, (60, 0, 8, 8), 0)
    with pytest.raises(ValueError, match="out of bounds"):
        crop_attack(img, (-1, 0, 4, 4), 0)
    with pytest.raises(ValueError, match="extent"):
        crop_attack(img, (0, 0, -4, 4), 0)
    with pytest.raises(ValueError, match="fill"):
        crop_attack(img, (0, 0, 4, 4), 128)


# --- mark ------------------------------------------------------------------


def test_mark_deterministic_per_seed():
    img = halftone_like(6)
    a = mark_attack(img, 5, 4, seed=42)
    b = mark_attack(img, 5, 4, seed=42)
    c = mark_attack(img, 5, 4, seed=43)
    assert np.array_equal(a.pixels, b.pixels)
    assert not np.array_equal(a.pixels, c.pixels)


def test_mark_zero_count_is_identity():
    img = halftone_like(7)
    out = mark_attack(img, 0, 10, seed=0)
    assert np.array_equal(out.pixels, img.pixels)


def test_mark_area_bound():
    img = BitImage(np.full((64, 64), 255, np.uint8))
    count, radius = 6, 5
    out = mark_attack(img, count, radius, seed=1)
    blacked = np.count_nonzero(out.pixels == 0)
    assert 0 < blacked <= count * np.pi * radius**2


def test_mark_only_darkens():
    img = halftone_like(8)
    out = mark_attack(img, 8, 3, seed=2)
    assert np.all(out.pixels <= img.pixels)


def test_mark_negative_count():
    with pytest.raises(ValueError, match="count"):
        mark_attack(halftone_like(9), -1, 3, seed=0)


# --- print-scan ------------------------------------------------------------


def test_print_scan_neutral_is_identity():
    img = halftone_like(10)
    out = print_scan_sim(img, ChannelParams())
    assert np.array_equal(out.pixels, img.pixels)


def test_print_scan_blur_of_constant_unchanged():
    img = BitImage(np.full((32, 32), 255, np.uint8))
    out = print_scan_sim(img, ChannelParams(blur_sigma=1.5))
    assert np.all(out.pixels == 255)


def test_print_scan_deterministic():
    img = halftone_like(11)
    p = ChannelParams(blur_sigma=0.6, noise_sigma=12.0, rotate_degrees=0.4, scale=0.8, rng_seed=7)
    a = print_scan_sim(img, p)
    b = print_scan_sim(img, p)
    assert np.array_equal(a.pixels, b.pixels)


def test_print_scan_seed_changes_noise():
    img = halftone_like(12)
    a = print_scan_sim(img, ChannelParams(noise_sigma=40.0, rng_seed=0))
    b = print_scan_sim(img, ChannelParams(noise_sigma=40.0, rng_seed=1))
    assert not np.array_equal(a.pixels, b.pixels)


def test_print_scan_output_is_bilevel_same_shape():
    img = halftone_like(13)
    p = ChannelParams(blur_sigma=0.8, noise_sigma=8.0, rotate_degrees=1.0, scale=0.7)
    out = print_scan_sim(img, p)
    assert isinstance(out, BitImage)
    assert out.pixels.shape == img.pixels.shape
    assert set(np.unique(out.pixels)) <= {0, 255}


def test_print_scan_blur_degrades_fine_checker():
    yy, xx = np.indices((32, 32))
    checker = (((yy + xx) % 2) * 255).astype(np.uint8)
    out = print_scan_sim(BitImage(checker), ChannelParams(blur_sigma=1.0))
    # heavy blur pulls the alternating pattern toward its 127.5 mean,
    # so rebinarization no longer reproduces the checker
    assert not np.array_equal(out.pixels, checker)
