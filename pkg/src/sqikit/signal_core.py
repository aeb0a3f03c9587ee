"""Core signal representation and the numerical primitives shared by every
other module: resampling, zero-phase filtering, periodogram, moments and
template-matching entropies.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from scipy import signal as sps


class SignalError(ValueError):
    """Raised when a signal violates an operation's preconditions."""


@dataclass(frozen=True)
class Signal:
    """Uniformly sampled, finite, real-valued sequence.

    The sample buffer is copied and marked read-only on construction so a
    ``Signal`` can be shared freely between workers.
    """

    samples: np.ndarray
    fs: float

    def __post_init__(self):
        x = np.array(self.samples, dtype=float, copy=True).ravel()
        if not np.all(np.isfinite(x)):
            raise SignalError("signal contains NaN or Inf")
        if not (np.isfinite(self.fs) and self.fs > 0):
            raise SignalError(f"sampling rate must be positive, got {self.fs}")
        x.flags.writeable = False
        object.__setattr__(self, "samples", x)
        object.__setattr__(self, "fs", float(self.fs))

    def __len__(self):
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.samples.size / self.fs

    def with_samples(self, samples) -> "Signal":
        return Signal(samples, self.fs)


def as_signal(x, fs=None) -> Signal:
    if isinstance(x, Signal):
        return x
    if fs is None:
        raise SignalError("a sampling rate is required for raw arrays")
    return Signal(x, fs)


@dataclass(frozen=True)
class PowerSpectrum:
    freqs: np.ndarray
    power: np.ndarray

    @property
    def df(self) -> float:
        return float(self.freqs[1] - self.freqs[0]) if self.freqs.size > 1 else 0.0

    def total(self) -> float:
        return float(self.power.sum() * self.df)


@dataclass(frozen=True)
class MomentSummary:
    mean: float
    variance: float
    skewness: float
    kurtosis: float
    degenerate: bool = False


# ---------------------------------------------------------------------------
# resampling and filtering
# ---------------------------------------------------------------------------

KAISER_BETA = 8.0
TAPS_PER_PHASE = 64


def resample(signal: Signal, target_fs: float) -> Signal:
    """Band-limited rational resampling.

    Uses a Kaiser-windowed sinc (beta 8, 64 taps per polyphase branch)
    applied through a polyphase FIR. The output keeps the input duration.
    """
    if target_fs <= 0:
        raise SignalError("target_fs must be positive")
    if len(signal) < 2:
        raise SignalError("signal too short")
    if target_fs == signal.fs:
        return signal

    ratio = Fraction(target_fs / signal.fs).limit_denominator(10_000)
    up, down = ratio.numerator, ratio.denominator
    n_phase = max(up, down)
    ntaps = TAPS_PER_PHASE * n_phase + 1
    taps = sps.firwin(ntaps, 1.0 / n_phase, window=("kaiser", KAISER_BETA))
    # 'line' padding removes any linear trend before the filter sees the edges
    y = sps.resample_poly(signal.samples, up, down, window=taps, padtype="line")
    return Signal(y, signal.fs * up / down)


def _settle_len(sos) -> int:
    # impulse response decay length, used as the reflection pad
    imp = np.zeros(4096)
    imp[0] = 1.0
    h = np.abs(sps.sosfilt(sos, imp))
    above = np.nonzero(h > 1e-6 * h.max())[0]
    return int(above[-1]) + 1 if above.size else 1


def _butter_apply(x, fs, f_lo, f_hi, order=4):
    nyq = fs / 2.0
    if f_lo > 0 and f_hi < nyq:
        sos = sps.butter(order, [f_lo, f_hi], btype="bandpass", fs=fs, output="sos")
    elif f_lo > 0:
        sos = sps.butter(order, f_lo, btype="highpass", fs=fs, output="sos")
    elif f_hi < nyq:
        sos = sps.butter(order, f_hi, btype="lowpass", fs=fs, output="sos")
    else:
        return x.copy()
    padlen = min(_settle_len(sos), x.size - 1)
    return sps.sosfiltfilt(sos, x, padtype="even", padlen=padlen)


def bandpass(signal: Signal, f_lo: float, f_hi: float) -> Signal:
    """Zero-phase Butterworth band-pass (4th order per pass).

    ``f_lo == 0`` degrades to a low-pass and ``f_hi == fs/2`` to a high-pass.
    """
    nyq = signal.fs / 2.0
    if not (0 <= f_lo < f_hi <= nyq):
        raise SignalError(f"invalid band ({f_lo}, {f_hi}) for fs={signal.fs}")
    if len(signal) < 2:
        raise SignalError("signal too short")
    return signal.with_samples(_butter_apply(signal.samples, signal.fs, f_lo, f_hi))


def lowpass(signal: Signal, f_hi: float) -> Signal:
    return bandpass(signal, 0.0, f_hi)


def highpass(signal: Signal, f_lo: float) -> Signal:
    return bandpass(signal, f_lo, signal.fs / 2.0)


# ---------------------------------------------------------------------------
# spectra
# ---------------------------------------------------------------------------


def periodogram(signal: Signal) -> PowerSpectrum:
    """One-sided Hann periodogram.

    The mean is removed first and the result is scaled so that
    ``sum(power) * df`` equals the biased variance of the input.
    """
    x = signal.samples
    n = x.size
    if n < 16:
        raise SignalError("signal too short for a periodogram (need >= 16 samples)")
    x = x - x.mean()
    w = np.hanning(n + 2)[1:-1]  # strictly positive Hann taper
    spec = np.abs(np.fft.rfft(x * w)) ** 2
    if n % 2 == 0:
        spec[1:-1] *= 2.0
    else:
        spec[1:] *= 2.0
    freqs = np.fft.rfftfreq(n, d=1.0 / signal.fs)
    df = freqs[1] - freqs[0]
    var = float(np.mean(x * x))
    total = spec.sum() * df
    if total > 0 and var > 0:
        power = spec * (var / total)
    else:
        power = np.zeros_like(spec)
    return PowerSpectrum(freqs, power)


def band_power(spec: PowerSpectrum, f_lo: float, f_hi: float) -> float:
    """Integrated power over ``[f_lo, f_hi]`` (bin centres inclusive)."""
    if f_lo > f_hi:
        raise SignalError(f"inverted band ({f_lo}, {f_hi})")
    if f_lo < 0:
        raise SignalError("negative frequency")
    mask = (spec.freqs >= f_lo) & (spec.freqs <= f_hi)
    return float(spec.power[mask].sum() * spec.df)


def band_power_halfopen(spec: PowerSpectrum, f_lo: float, f_hi: float) -> float:
    """Integrated power over ``[f_lo, f_hi)``; adjacent bands partition exactly."""
    mask = (spec.freqs >= f_lo) & (spec.freqs < f_hi)
    return float(spec.power[mask].sum() * spec.df)


# ---------------------------------------------------------------------------
# moments
# ---------------------------------------------------------------------------


def moments(signal) -> MomentSummary:
    """Mean, biased variance, skewness and Pearson kurtosis (Gaussian -> 3).

    Zero-variance input yields skewness = kurtosis = 0 with
    ``degenerate=True``.
    """
    x = signal.samples if isinstance(signal, Signal) else np.asarray(signal, float)
    if x.size < 4:
        raise SignalError("need at least 4 samples for moments")
    mean = float(x.mean())
    d = x - mean
    m2 = float(np.mean(d * d))
    if m2 <= 0 or m2 <= (np.finfo(float).eps * max(abs(mean), 1e-300)) ** 2:
        return MomentSummary(mean, 0.0, 0.0, 0.0, degenerate=True)
    m3 = float(np.mean(d**3))
    m4 = float(np.mean(d**4))
    return MomentSummary(mean, m2, m3 / m2**1.5, m4 / m2**2)


# ---------------------------------------------------------------------------
# entropies
# ---------------------------------------------------------------------------


class EntropyResult(NamedTuple):
    value: float
    degenerate: bool


def _chebyshev_lag_dist(x, lag, m, n_templates):
    # max |x[i+j] - x[i+lag+j]| for j < m, for every template start i
    d = np.abs(x[lag:] - x[:-lag])
    count = n_templates - lag
    out = d[:count].copy()
    for j in range(1, m):
        np.maximum(out, d[j : j + count], out=out)
    return out, d


def _sampen_counts(x, m, r):
    n = x.size
    n_t = n - m  # same template count for lengths m and m+1
    a = b = 0
    for lag in range(1, n_t):
        dist_m, d = _chebyshev_lag_dist(x, lag, m, n_t)
        ok = dist_m <= r
        b += int(ok.sum())
        ext = d[m : m + n_t - lag]
        a += int(np.count_nonzero(ok & (ext <= r)))
    return a, b


def sample_entropy(signal, m: int = 2, r: float = None, return_flag: bool = False):
    """Sample entropy with Chebyshev distance and self-matches excluded.

    ``r`` is an absolute tolerance (callers conventionally pass 0.2 * std).
    When no (m+1)-length matches exist the value is undefined; a finite
    surrogate ``ln(B) + ln(N)`` is returned and flagged instead.
    """
    x = signal.samples if isinstance(signal, Signal) else np.asarray(signal, float)
    n = x.size
    if m < 1:
        raise SignalError("m must be >= 1")
    if n <= m + 1:
        raise SignalError("signal too short for sample entropy")
    if r is None:
        r = 0.2 * float(np.std(x))
    if r < 0:
        raise SignalError("tolerance r must be non-negative")
    a, b = _sampen_counts(x, m, r)
    if a == 0:
        res = EntropyResult(float(np.log(max(b, 1)) + np.log(n)), True)
    else:
        res = EntropyResult(float(-np.log(a / b)), False)
    return res if return_flag else res.value


def _phi(x, m, r):
    n = x.size
    n_t = n - m + 1
    counts = np.ones(n_t)  # self-match
    for lag in range(1, n_t):
        d = np.abs(x[lag:] - x[:-lag])
        count = n_t - lag
        dist = d[:count].copy()
        for j in range(1, m):
            np.maximum(dist, d[j : j + count], out=dist)
        ok = (dist <= r).astype(float)
        counts[:count] += ok
        counts[lag:] += ok
    return float(np.mean(np.log(counts / n_t)))


def approximate_entropy(signal, m: int = 2, r: float = None) -> float:
    """Approximate entropy, ``Phi(m) - Phi(m+1)`` with self-matches counted."""
    x = signal.samples if isinstance(signal, Signal) else np.asarray(signal, float)
    if m < 1:
        raise SignalError("m must be >= 1")
    if x.size <= m + 1:
        raise SignalError("signal too short for approximate entropy")
    if r is None:
        r = 0.2 * float(np.std(x))
    if r < 0:
        raise SignalError("tolerance r must be non-negative")
    return _phi(x, m, r) - _phi(x, m + 1, r)


# ---------------------------------------------------------------------------
# windowing
# ---------------------------------------------------------------------------


def split_windows(signal: Signal, win_len: int, stride: int = None) -> list:
    """Full-length windows only; a trailing partial window is dropped."""
    if stride is None:
        stride = win_len
    if stride < 1 or win_len < 1:
        raise SignalError("win_len and stride must be >= 1")
    n = len(signal)
    return [
        signal.with_samples(signal.samples[s : s + win_len])
        for s in range(0, n - win_len + 1, stride)
    ]


def window_starts(n: int, win_len: int, stride: int = None) -> range:
    stride = stride or win_len
    return range(0, n - win_len + 1, stride)
