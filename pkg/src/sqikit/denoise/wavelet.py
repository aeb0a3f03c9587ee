"""db4 discrete wavelet transform and universal-threshold denoising."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..signal_core import Signal, SignalError

# db4 reconstruction low-pass (scaling) filter, from an exact spectral
# factorisation; the usual 16-digit tables are only good to ~1e-12.
DB4_REC_LO = np.array([
    0.23037781330889650086,
    0.71484657055291564709,
    0.63088076792985890788,
    -0.027983769416859854211,
    -0.18703481171909308408,
    0.030841381835560763627,
    0.032883011666885199735,
    -0.010597401785069032105,
])
DB4_DEC_LO = DB4_REC_LO[::-1].copy()
DB4_REC_HI = DB4_REC_LO[::-1] * (-1.0) ** np.arange(8)
DB4_DEC_HI = DB4_REC_HI[::-1].copy()
FILTER_LEN = DB4_REC_LO.size

MODES = ("symmetric", "periodization")


@dataclass(frozen=True)
class WaveletCoeffs:
    approximation: np.ndarray
    details: tuple  # level 1 (finest) first
    level: int
    original_length: int
    mode: str = "symmetric"

    def detail(self, k: int) -> np.ndarray:
        return self.details[k - 1]

    def flat(self) -> np.ndarray:
        return np.concatenate([self.approximation, *self.details[::-1]])


def _extend(x, pad, mode):
    if mode == "symmetric":
        # half-sample symmetric: ... x1 x0 | x0 x1 ... x_{n-1} | x_{n-1} x_{n-2} ...
        return np.pad(x, pad, mode="symmetric")
    return np.pad(x, pad, mode="wrap")


def _analysis(x, mode):
    f = FILTER_LEN
    if mode == "symmetric":
        ext = _extend(x, f - 1, mode)
        lo = np.convolve(ext, DB4_DEC_LO, mode="valid")
        hi = np.convolve(ext, DB4_DEC_HI, mode="valid")
        # valid conv of the padded input = full conv of x, shifted by f-1
        n_out = (x.size + f - 1) // 2
        return lo[1 : 1 + 2 * n_out : 2], hi[1 : 1 + 2 * n_out : 2]
    if x.size % 2:
        x = np.append(x, x[-1])
    n = x.size
    k = np.arange(n // 2)
    lo = np.zeros(n // 2)
    hi = np.zeros(n // 2)
    for j in range(f):
        xi = x[(2 * k + 1 - j) % n]
        lo += DB4_DEC_LO[j] * xi
        hi += DB4_DEC_HI[j] * xi
    return lo, hi


def _synthesis(ca, cd, out_len, mode):
    f = FILTER_LEN
    n = ca.size
    up_a = np.zeros(2 * n)
    up_d = np.zeros(2 * n)
    up_a[::2] = ca
    up_d[::2] = cd
    if mode == "symmetric":
        y = np.convolve(up_a, DB4_REC_LO) + np.convolve(up_d, DB4_REC_HI)
        return y[f - 2 : f - 2 + out_len]
    # periodic: the transpose of the (orthogonal) analysis operator
    m = 2 * n
    y = np.zeros(m)
    k = np.arange(n)
    for j in range(f):
        np.add.at(y, (2 * k + 1 - j) % m, DB4_DEC_LO[j] * ca + DB4_DEC_HI[j] * cd)
    return y[:out_len]


def max_level(n: int) -> int:
    """Deepest level whose every stage still sees at least one filter length."""
    level = 0
    length = n
    while length >= FILTER_LEN:
        level += 1
        length = (length + FILTER_LEN - 1) // 2
    return level


def dwt(signal, level: int, mode: str = "symmetric") -> WaveletCoeffs:
    """Multilevel db4 analysis.

    Parameters
    ----------
    signal : Signal or array_like
    level : int
        Number of decomposition stages, at least 1. Every stage's input must
        be at least one filter length (8 samples) long.
    mode : {"symmetric", "periodization"}
        Boundary handling. "symmetric" mirrors the ends (no edge step);
        "periodization" wraps and yields a strictly orthonormal transform,
        exactly energy-preserving when the length divides by ``2**level``.
    """
    x = signal.samples if isinstance(signal, Signal) else np.asarray(signal, float)
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if level < 1:
        raise SignalError("level must be >= 1")
    if level > max_level(x.size):
        raise SignalError(f"level {level} too deep for length {x.size} (max {max_level(x.size)})")
    details = []
    a = np.asarray(x, dtype=float)
    for _ in range(level):
        a, d = _analysis(a, mode)
        details.append(d)
    return WaveletCoeffs(a, tuple(details), level, int(x.size), mode)


def _stage_lengths(n, level, mode):
    lengths = [n]
    for _ in range(level):
        m = lengths[-1]
        lengths.append((m + FILTER_LEN - 1) // 2 if mode == "symmetric" else (m + 1) // 2)
    return lengths


def idwt(coeffs: WaveletCoeffs, fs: float = None):
    """Invert :func:`dwt`; returns a Signal when ``fs`` is given, else an array."""
    lengths = _stage_lengths(coeffs.original_length, coeffs.level, coeffs.mode)
    a = coeffs.approximation
    for k in range(coeffs.level, 0, -1):
        d = coeffs.details[k - 1]
        if a.size != d.size:
            raise SignalError("approximation/detail length mismatch")
        a = _synthesis(a, d, lengths[k - 1], coeffs.mode)
    return Signal(a, fs) if fs is not None else a


def soft_threshold(x, thr: float):
    return np.sign(x) * np.maximum(np.abs(x) - thr, 0.0)


def wavelet_denoise(signal: Signal, level: int = 4) -> Signal:
    """Universal soft-threshold denoising.

    Noise scale comes from the finest details, ``median(|d1|) / 0.6745``,
    and every detail level is shrunk by ``sigma * sqrt(2 ln N)``.
    """
    x = signal.samples
    if x.size < 64:
        raise SignalError("wavelet_denoise needs at least 64 samples")
    level = min(level, max_level(x.size))
    c = dwt(x, level)
    sigma = float(np.median(np.abs(c.details[0]))) / 0.6745
    thr = sigma * np.sqrt(2.0 * np.log(x.size))
    shrunk = WaveletCoeffs(
        c.approximation,
        tuple(soft_threshold(d, thr) for d in c.details),
        c.level,
        c.original_length,
        c.mode,
    )
    return signal.with_samples(idwt(shrunk))
