import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sqikit.denoise.wavelet import (
    DB4_DEC_HI,
    DB4_DEC_LO,
    dwt,
    idwt,
    max_level,
    soft_threshold,
    wavelet_denoise,
)
from sqikit.signal_core import Signal, SignalError
from sqikit.synthetic import add_noise_at_snr

# published Daubechies 4-tap-pair (8 coefficient) decomposition low-pass, 16 digits
DB4_TABLE = [
    -0.010597401784997278, 0.032883011666982945, 0.030841381835986965, -0.18703481171888114,
    -0.02798376941698385, 0.6308807679295904, 0.7148465705525415, 0.23037781330885523,
]


def rel_rms(a, b):
    return np.sqrt(np.mean((a - b) ** 2)) / np.sqrt(np.mean(b**2))


def test_filters_match_published_table():
    assert np.allclose(DB4_DEC_LO, DB4_TABLE, atol=1e-15)


def test_filter_bank_orthonormality():
    h, g = DB4_DEC_LO, DB4_DEC_HI
    assert h.sum() == pytest.approx(np.sqrt(2), abs=1e-14)
    for m in range(4):
        shifted = sum(h[k] * h[k + 2 * m] for k in range(8 - 2 * m))
        assert shifted == pytest.approx(1.0 if m == 0 else 0.0, abs=1e-14)
        cross = sum(h[k] * g[k + 2 * m] for k in range(8 - 2 * m))
        assert cross == pytest.approx(0.0, abs=1e-14)
    # four vanishing moments on the high-pass side
    k = np.arange(8)
    for p in range(4):
        assert np.dot(g, k**p) == pytest.approx(0.0, abs=1e-9)


def test_periodized_single_level_is_orthogonal_matrix():
    n = 32
    basis = np.eye(n)
    rows = []
    for e in basis:
        c = dwt(e, 1, mode="periodization")
        rows.append(np.concatenate([c.approximation, c.details[0]]))
    w = np.array(rows).T
    assert np.allclose(w @ w.T, np.eye(n), atol=1e-13)


def test_perfect_reconstruction_512():
    x = np.random.default_rng(0).standard_normal(512)
    assert rel_rms(idwt(dwt(x, 4)), x) < 1e-8


@settings(max_examples=100, deadline=None)
@given(st.integers(64, 4096), st.integers(1, 4), st.integers(0, 2**32 - 1),
       st.sampled_from(["symmetric", "periodization"]))
def test_perfect_reconstruction_property(n, level, seed, mode):
    x = np.random.default_rng(seed).standard_normal(n)
    assert rel_rms(idwt(dwt(x, level, mode)), x) < 1e-8


def test_constant_has_zero_details():
    c = dwt(np.full(512, 3.3), 4)
    for d in c.details:
        assert np.max(np.abs(d)) < 1e-10


@pytest.mark.parametrize("n", [64, 512, 1024, 4096])
@pytest.mark.parametrize("level", [1, 2, 3, 4])
def test_parseval_periodized_dyadic(n, level):
    x = np.random.default_rng(n + level).standard_normal(n)
    c = dwt(x, level, mode="periodization")
    assert abs(np.sum(c.flat() ** 2) - np.sum(x**2)) / np.sum(x**2) < 1e-6


@pytest.mark.xfail(strict=True, reason="energy is not preserved with mirrored ends or non-dyadic lengths; see ledger")
def test_parseval_every_length():
    rng = np.random.default_rng(1)
    for n in range(64, 4097, 97):
        for level in range(1, 5):
            x = rng.standard_normal(n)
            c = dwt(x, level)
            assert abs(np.sum(c.flat() ** 2) - np.sum(x**2)) / np.sum(x**2) < 1e-6


def test_level_too_deep():
    assert max_level(16) == 4  # 16 -> 11 -> 9 -> 8 -> 7
    with pytest.raises(SignalError):
        dwt(np.zeros(16), 5)
    with pytest.raises(SignalError):
        dwt(np.zeros(7), 1)
    with pytest.raises(SignalError):
        dwt(np.zeros(64), 0)
    assert max_level(64) >= 4


def test_soft_threshold():
    assert np.array_equal(soft_threshold(np.array([-3.0, -1.0, 0.5, 2.0]), 1.0), [-2.0, 0.0, 0.0, 1.0])


def test_wavelet_denoise_reduces_mse(clean_ecg):
    sig, _ = clean_ecg
    noisy = add_noise_at_snr(sig.samples, 6, seed=0)
    out = wavelet_denoise(Signal(noisy, sig.fs)).samples
    assert np.mean((out - sig.samples) ** 2) < np.mean((noisy - sig.samples) ** 2)


def test_wavelet_denoise_keeps_smooth_sine():
    t = np.arange(5000) / 500
    x = np.sin(2 * np.pi * 1.2 * t)
    assert rel_rms(wavelet_denoise(Signal(x, 500)).samples, x) < 0.02


def test_wavelet_denoise_zero_and_short():
    assert np.array_equal(wavelet_denoise(Signal(np.zeros(1000), 500)).samples, np.zeros(1000))
    with pytest.raises(SignalError):
        wavelet_denoise(Signal(np.zeros(63), 500))
