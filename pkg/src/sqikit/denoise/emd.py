"""Empirical mode decomposition and IMF-domain denoising."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from ..signal_core import Signal, SignalError
from .wavelet import soft_threshold

SD_STOP = 0.3
SIFT_CAP = 10
# sifting continues past SIFT_CAP only until the IMF condition holds
SIFT_HARD_CAP = 200
MAX_IMFS = 12
MIRRORED_EXTREMA = 2
# IMFs oscillating slower than this are never touched by emd_denoise
NOISE_MIN_FREQ_HZ = 20.0


@dataclass(frozen=True)
class ImfSet:
    imfs: tuple
    residual: np.ndarray

    @property
    def n_imfs(self) -> int:
        return len(self.imfs)

    def reconstruct(self) -> np.ndarray:
        out = self.residual.copy()
        for imf in self.imfs:
            out = out + imf
        return out


def local_extrema(x):
    """Indices of local maxima and minima (a plateau counts once, at its start)."""
    d = np.diff(x)
    maxima = np.nonzero((d[:-1] > 0) & (d[1:] <= 0))[0] + 1
    minima = np.nonzero((d[:-1] < 0) & (d[1:] >= 0))[0] + 1
    return maxima, minima


def count_extrema(x) -> int:
    mx, mn = local_extrema(x)
    return mx.size + mn.size


def count_zero_crossings(x) -> int:
    s = np.sign(x)
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


def is_imf(x) -> bool:
    return abs(count_extrema(x) - count_zero_crossings(x)) <= 1


def _envelope(idx, values, n):
    # mirror the outermost extrema about both ends to tame end swings
    k = min(MIRRORED_EXTREMA, idx.size)
    left_t = -idx[:k][::-1]
    right_t = 2 * (n - 1) - idx[-k:][::-1]
    t = np.concatenate([left_t, idx, right_t]).astype(float)
    v = np.concatenate([values[:k][::-1], values, values[-k:][::-1]])
    t, keep = np.unique(t, return_index=True)
    return CubicSpline(t, v[keep], bc_type="not-a-knot")(np.arange(n))


def _mean_envelope(h):
    mx, mn = local_extrema(h)
    if mx.size < 2 or mn.size < 2:
        return None
    n = h.size
    return 0.5 * (_envelope(mx, h[mx], n) + _envelope(mn, h[mn], n))


def _sift(r):
    h = r.copy()
    for it in range(1, SIFT_HARD_CAP + 1):
        m = _mean_envelope(h)
        if m is None:
            return None
        h_new = h - m
        den = float(np.sum(h * h))
        sd = float(np.sum((h - h_new) ** 2)) / den if den > 0 else 0.0
        h = h_new
        if (sd < SD_STOP or it >= SIFT_CAP) and is_imf(h):
            return h
    return None


def emd(signal) -> ImfSet:
    """Decompose into IMFs by cubic-spline sifting.

    Sifting stops when the SD criterion drops below 0.3 or after 10 passes,
    provided the candidate is a valid IMF (extrema and zero-crossing counts
    differ by at most one). Extraction stops when the remainder has fewer
    than four extrema or 12 IMFs have been found. Inputs with fewer than
    four extrema come back as a bare residual.
    """
    x = signal.samples if isinstance(signal, Signal) else np.asarray(signal, float)
    if x.size < 64:
        raise SignalError("emd needs at least 64 samples")
    x = np.asarray(x, dtype=float)
    imfs = []
    r = x.copy()
    scale = float(np.sum(x * x))
    while len(imfs) < MAX_IMFS and count_extrema(r) >= 4:
        h = _sift(r)
        if h is None or float(np.sum(h * h)) <= 1e-30 * max(scale, 1e-300):
            break
        imfs.append(h)
        r = r - h
    residual = x - np.sum(imfs, axis=0) if imfs else x.copy()
    return ImfSet(tuple(imfs), residual)


def _imf_frequency(imf, fs):
    return count_zero_crossings(imf) * fs / (2.0 * imf.size)


def emd_denoise(signal: Signal) -> Signal:
    """Drop the first IMF and soft-threshold the second.

    The threshold is universal, ``sigma * sqrt(2 ln N)`` with sigma estimated
    from the first IMF's median absolute value. Only IMFs whose mean
    frequency (from zero crossings) exceeds 20 Hz are treated, so slow
    components such as baseline wander pass through untouched.
    """
    x = signal.samples
    dec = emd(signal)
    if dec.n_imfs == 0:
        return signal.with_samples(x.copy())
    imfs = list(dec.imfs)
    first = imfs[0]
    sigma = float(np.median(np.abs(first))) / 0.6745
    thr = sigma * np.sqrt(2.0 * np.log(x.size))
    if _imf_frequency(first, signal.fs) > NOISE_MIN_FREQ_HZ:
        imfs[0] = np.zeros_like(first)
        if len(imfs) > 1 and _imf_frequency(imfs[1], signal.fs) > NOISE_MIN_FREQ_HZ:
            imfs[1] = soft_threshold(imfs[1], thr)
    out = dec.residual + np.sum(imfs, axis=0)
    return signal.with_samples(out)
