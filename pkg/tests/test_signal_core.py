import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import pearson_kurtosis, pearson_skewness, sampen_oracle, apen_oracle
from sqikit.signal_core import (
    Signal,
    SignalError,
    approximate_entropy,
    band_power,
    band_power_halfopen,
    bandpass,
    moments,
    periodogram,
    resample,
    sample_entropy,
    split_windows,
)


def test_signal_is_immutable_and_validated():
    s = Signal([1.0, 2.0, 3.0], 100)
    with pytest.raises(ValueError):
        s.samples[0] = 5
    with pytest.raises(SignalError):
        Signal([1.0, np.nan], 100)
    with pytest.raises(SignalError):
        Signal([1.0], 0)


# resampling


def test_resample_length():
    s = Signal(np.zeros(5000), 500)
    out = resample(s, 125)
    assert len(out) == 1250
    assert out.fs == 125


def test_resample_identity_is_exact():
    x = np.random.default_rng(0).standard_normal(1000)
    s = Signal(x, 360)
    assert np.array_equal(resample(s, 360).samples, x)


def test_resample_sine_matches_analytic():
    t = np.arange(3600) / 360
    out = resample(Signal(np.sin(2 * np.pi * 5 * t), 360), 125)
    tt = np.arange(len(out)) / 125
    err = np.abs(out.samples - np.sin(2 * np.pi * 5 * tt))[10:-10]
    assert err.max() < 1e-3


def test_resample_round_trip():
    rng = np.random.default_rng(3)
    fs = 400.0
    t = np.arange(4000) / fs
    x = sum(rng.uniform(0.5, 1) * np.sin(2 * np.pi * f * t + rng.uniform(0, 6)) for f in (3, 17, 41, 77))
    back = resample(resample(Signal(x, fs), fs / 2), fs).samples
    e = slice(100, -100)
    rel = np.sqrt(np.mean((back[e] - x[e]) ** 2)) / np.sqrt(np.mean(x[e] ** 2))
    assert rel < 1e-3


# filtering


def test_bandpass_rejects_dc():
    out = bandpass(Signal(np.full(5000, 3.0), 500), 0.5, 40)
    assert abs(out.samples.mean()) < 1e-6 * 3.0


def test_bandpass_separates_tones():
    fs = 500
    t = np.arange(5000) / fs
    slow, fast = np.sin(2 * np.pi * 2 * t), np.sin(2 * np.pi * 60 * t)
    out = bandpass(Signal(slow + fast, fs), 5, 40).samples
    rms = np.sqrt(np.mean(out[250:-250] ** 2))
    assert rms < 0.05 * np.sqrt(np.mean(slow**2))
    assert rms < 0.05 * np.sqrt(np.mean(fast**2))


def test_bandpass_white_noise_energy_in_band():
    x = np.random.default_rng(1).standard_normal(20000)
    out = bandpass(Signal(x, 500), 5, 15)
    ps = periodogram(out)
    assert band_power(ps, 5, 15) / ps.total() > 0.9


def test_bandpass_validates_band():
    s = Signal(np.zeros(100), 100)
    for lo, hi in [(10, 5), (-1, 10), (5, 60)]:
        with pytest.raises(SignalError):
            bandpass(s, lo, hi)


# spectra


def test_periodogram_tone_concentration():
    t = np.arange(5000) / 500
    ps = periodogram(Signal(np.sin(2 * np.pi * 10 * t), 500))
    assert band_power(ps, 9.5, 10.5) / ps.total() >= 0.99


def test_periodogram_constant_is_zero():
    ps = periodogram(Signal(np.full(100, 7.0), 100))
    assert np.all(ps.power == 0)


def test_periodogram_white_noise_is_flat():
    x = np.random.default_rng(2).standard_normal(10000)
    ps = periodogram(Signal(x, 500))
    assert band_power(ps, 0, 125) / band_power(ps, 0, 250) == pytest.approx(0.5, abs=0.05)


def test_periodogram_minimum_length():
    with pytest.raises(SignalError):
        periodogram(Signal(np.ones(15), 100))


@settings(max_examples=30, deadline=None)
@given(st.integers(16, 3000), st.integers(0, 2**31 - 1))
def test_parseval(n, seed):
    x = np.random.default_rng(seed).standard_normal(n) * 3 + 1
    ps = periodogram(Signal(x, 250))
    var = np.var(x)
    assert abs(var - ps.total()) / var < 0.01


def test_band_power_examples():
    t = np.arange(5000) / 500
    ps = periodogram(Signal(np.sin(2 * np.pi * 10 * t), 500))
    assert band_power(ps, 0, 250) == pytest.approx(ps.total(), rel=0.01)
    assert band_power(ps, 10.05, 10.05) == 0.0
    assert band_power(ps, 5, 15) / band_power(ps, 20, 30) > 100
    with pytest.raises(SignalError):
        band_power(ps, 15, 5)


def test_band_power_additivity():
    ps = periodogram(Signal(np.random.default_rng(4).standard_normal(3000), 300))
    bin_max = ps.power.max() * ps.df
    a, b, c = 3.0, 17.3, 60.0
    assert abs(band_power(ps, a, b) + band_power(ps, b, c) - band_power(ps, a, c)) <= bin_max
    # half-open bands partition exactly
    assert band_power_halfopen(ps, a, b) + band_power_halfopen(ps, b, c) == pytest.approx(
        band_power_halfopen(ps, a, c), rel=1e-12)


# moments


def test_moments_examples():
    m = moments(Signal([1.0, 2, 3, 4, 5], 1))
    assert m.mean == 3 and m.skewness == 0
    g = moments(np.random.default_rng(0).standard_normal(100_000))
    assert g.kurtosis == pytest.approx(3.0, abs=0.1)
    x = [0.0, 0.0, 0.0, 1.0]
    assert moments(np.array(x)).kurtosis == pytest.approx(pearson_kurtosis(x), abs=1e-12)
    assert moments(np.array(x)).skewness == pytest.approx(pearson_skewness(x), abs=1e-12)


def test_moments_degenerate():
    m = moments(np.full(10, 2.0))
    assert m.degenerate and m.skewness == 0 and m.kurtosis == 0


def test_moments_affine():
    x = np.random.default_rng(5).gamma(2.0, size=1000)
    base = moments(x)
    pos = moments(3.0 + 4.0 * x)
    neg = moments(3.0 - 4.0 * x)
    assert pos.mean == pytest.approx(3 + 4 * base.mean, rel=1e-12)
    # power-of-two scale keeps every product exact
    assert moments(8.0 * x).skewness == base.skewness
    assert moments(8.0 * x).kurtosis == base.kurtosis
    assert moments(-8.0 * x).skewness == -base.skewness
    assert pos.skewness == pytest.approx(base.skewness, rel=1e-9)
    assert pos.kurtosis == pytest.approx(base.kurtosis, rel=1e-9)
    assert neg.skewness == pytest.approx(-base.skewness, rel=1e-9)


# entropies


def test_sample_entropy_periodic_is_low():
    x = np.tile([0.0, 1.0], 100)
    assert sample_entropy(x, 2, 0.2 * np.std(x)) < 0.05


def test_sample_entropy_constant_is_zero():
    assert sample_entropy(np.full(50, 1.5), 2, 0.0) == 0.0


def test_sample_entropy_shuffled_sine_is_higher():
    rng = np.random.default_rng(6)
    x = np.sin(np.linspace(0, 20 * np.pi, 600))
    y = rng.permutation(x)
    r = 0.2 * np.std(x)
    assert sample_entropy(y, 2, r) > sample_entropy(x, 2, r)


@pytest.mark.parametrize("n,seed", [(60, 0), (200, 1), (500, 2)])
def test_sample_entropy_matches_oracle(n, seed):
    x = np.random.default_rng(seed).standard_normal(n).cumsum()
    r = 0.2 * np.std(x)
    a, b = sampen_oracle(x, 2, r)
    assert sample_entropy(x, 2, r) == pytest.approx(-np.log(a / b), abs=1e-10)


def test_sample_entropy_no_match_is_flagged():
    x = np.arange(20, dtype=float) ** 2
    res = sample_entropy(x, 2, 0.01, return_flag=True)
    assert res.degenerate and np.isfinite(res.value)


def test_approximate_entropy():
    assert approximate_entropy(np.full(40, 3.0), 2, 0.0) == pytest.approx(0.0, abs=1e-12)
    x = np.tile([0.0, 1.0], 100)
    assert approximate_entropy(x, 2, 0.2 * np.std(x)) < 0.1
    noise = np.random.default_rng(7).standard_normal(200)
    assert approximate_entropy(noise, 2, 0.2 * np.std(noise)) > approximate_entropy(x, 2, 0.2 * np.std(x))


@pytest.mark.parametrize("seed", [0, 1])
def test_approximate_entropy_matches_oracle(seed):
    x = np.random.default_rng(seed).standard_normal(150)
    r = 0.2 * np.std(x)
    assert approximate_entropy(x, 2, r) == pytest.approx(apen_oracle(x, 2, r), abs=1e-10)


# windows


def test_split_windows():
    s = Signal(np.arange(1024.0), 360)
    assert len(split_windows(s, 512, 512)) == 2
    one = split_windows(Signal(np.arange(512.0), 360), 512)
    assert len(one) == 1 and np.array_equal(one[0].samples, np.arange(512.0))
    w = split_windows(Signal(np.arange(1000.0), 360), 512, 256)
    assert [x.samples[0] for x in w] == [0, 256]
