"""R-peak detection, beat matching and heart-rate series.

Two detectors with deliberately different front ends are provided so their
agreement can serve as a quality index:

* ``detect_energy``: band-pass 5-15 Hz, derivative, squaring, moving-window
  integration and an adaptive dual threshold (Pan-Tompkins style).
* ``detect_derivative``: band-pass 8-20 Hz, absolute slope and a rolling
  median + MAD threshold.

Both refine their detections to the local extremum of the input signal.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage
from scipy import signal as sps

from .signal_core import Signal, SignalError, bandpass

REFRACTORY_S = 0.2
REFINE_S = 0.05
DEFAULT_TOL_S = 0.15
EDGE_GUARD_S = 0.15
DETECTORS = ("energy", "derivative", "external")


@dataclass(frozen=True)
class BeatAnnotations:
    indices: np.ndarray
    detector_id: str = "external"

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64).ravel()
        if idx.size > 1 and np.any(np.diff(idx) <= 0):
            raise ValueError("beat indices must be strictly increasing")
        if idx.size and idx[0] < 0:
            raise ValueError("beat indices must be non-negative")
        if self.detector_id not in DETECTORS:
            raise ValueError(f"unknown detector id {self.detector_id!r}")
        idx.flags.writeable = False
        object.__setattr__(self, "indices", idx)

    def __len__(self):
        return self.indices.size


@dataclass(frozen=True)
class BeatMatchResult:
    matched: int
    only_a: int
    only_b: int
    pairs: list = field(default_factory=list)


@dataclass(frozen=True)
class HeartRate:
    times: np.ndarray  # interval midpoints, s
    bpm: np.ndarray
    rr: np.ndarray  # s


def _check_detector_input(signal: Signal):
    if signal.fs < 100:
        raise SignalError(f"beat detection needs fs >= 100 Hz, got {signal.fs}")
    if signal.duration < 2.0:
        raise SignalError("beat detection needs at least 2 s of signal")


def _is_flat(x) -> bool:
    return float(np.ptp(x)) == 0.0


def refine_to_extremum(x: np.ndarray, candidates, fs: float, half_width_s: float = REFINE_S):
    """Move each candidate to the largest deviation from the local median
    within +/- ``half_width_s``, then re-impose the refractory period."""
    hw = max(int(round(half_width_s * fs)), 1)
    n = x.size
    refined = []
    strength = []
    for c in candidates:
        lo, hi = max(c - hw, 0), min(c + hw + 1, n)
        seg = x[lo:hi]
        dev = np.abs(seg - np.median(seg))
        k = int(np.argmax(dev))
        refined.append(lo + k)
        strength.append(dev[k])
    return _enforce_refractory(np.asarray(refined, dtype=np.int64), np.asarray(strength), fs)


def _enforce_refractory(idx, strength, fs):
    if idx.size == 0:
        return idx
    order = np.argsort(idx, kind="stable")
    idx, strength = idx[order], strength[order]
    min_gap = int(np.ceil(REFRACTORY_S * fs))
    keep_i, keep_s = [int(idx[0])], [float(strength[0])]
    for i, s in zip(idx[1:], strength[1:]):
        if i - keep_i[-1] < min_gap:
            if s > keep_s[-1]:
                keep_i[-1], keep_s[-1] = int(i), float(s)
        else:
            keep_i.append(int(i))
            keep_s.append(float(s))
    return np.asarray(keep_i, dtype=np.int64)


def detect_energy(signal: Signal) -> BeatAnnotations:
    """Energy-envelope QRS detector with adaptive dual thresholds.

    Parameters
    ----------
    signal : Signal
        Single-lead ECG, fs >= 100 Hz and at least 2 s long.

    Returns
    -------
    BeatAnnotations
        Strictly increasing R indices separated by at least 0.2 s.
        Envelope peaks within 0.15 s of either end are ignored, as for
        ``detect_derivative``, so the two detectors see the same span.
    """
    _check_detector_input(signal)
    x = signal.samples
    fs = signal.fs
    if _is_flat(x):
        return BeatAnnotations(np.empty(0, dtype=np.int64), "energy")

    bp = bandpass(signal, 5.0, 15.0).samples
    kernel = np.array([1.0, 2.0, 0.0, -2.0, -1.0]) * (fs / 8.0)
    deriv = np.convolve(bp, kernel, mode="same")
    sq = deriv * deriv
    mwi = ndimage.uniform_filter1d(sq, max(int(round(0.15 * fs)), 1), mode="nearest")
    if not np.any(mwi > 0):
        return BeatAnnotations(np.empty(0, dtype=np.int64), "energy")

    min_gap = int(np.ceil(REFRACTORY_S * fs))
    cands, _ = sps.find_peaks(mwi, distance=min_gap)
    guard = int(round(EDGE_GUARD_S * fs))
    cands = cands[(cands >= guard) & (cands < x.size - guard)]
    if cands.size == 0:
        return BeatAnnotations(np.empty(0, dtype=np.int64), "energy")
    heights = mwi[cands]

    # slope measure for T-wave discrimination
    slope_w = max(int(round(0.075 * fs)), 1)
    absd = np.abs(deriv)

    def slope_at(i):
        return float(absd[max(i - slope_w, 0) : i + 1].max())

    train = mwi[: int(2 * fs)]
    spki = 0.7 * float(train.max())
    npki = float(np.median(train))
    thr1 = npki + 0.25 * (spki - npki)

    beats: list = []
    rr_hist: list = []
    last_cand_pos = -1  # index into cands of the last accepted beat
    for j, (i, h) in enumerate(zip(cands, heights)):
        i = int(i)
        # search back for a missed beat when the gap grows too long
        if beats:
            rr_avg = np.mean(rr_hist[-8:]) if rr_hist else fs
            if i - beats[-1] > 1.66 * rr_avg:
                thr2 = 0.5 * thr1
                window = [
                    k for k in range(last_cand_pos + 1, j)
                    if heights[k] > thr2 and cands[k] - beats[-1] >= min_gap
                ]
                if window:
                    k = max(window, key=lambda q: heights[q])
                    rr_hist.append(int(cands[k]) - beats[-1])
                    beats.append(int(cands[k]))
                    last_cand_pos = k
                    spki = 0.25 * heights[k] + 0.75 * spki
                    thr1 = npki + 0.25 * (spki - npki)

        if h > thr1:
            if beats and i - beats[-1] < 0.36 * fs and slope_at(i) < 0.5 * slope_at(beats[-1]):
                npki = 0.125 * h + 0.875 * npki
            else:
                if beats:
                    rr_hist.append(i - beats[-1])
                beats.append(i)
                last_cand_pos = j
                spki = 0.125 * h + 0.875 * spki
        else:
            npki = 0.125 * h + 0.875 * npki
        thr1 = npki + 0.25 * (spki - npki)

    idx = refine_to_extremum(x, beats, fs)
    return BeatAnnotations(idx, "energy")


def detect_derivative(signal: Signal) -> BeatAnnotations:
    """Slope-threshold QRS detector.

    The absolute first difference of the 8-20 Hz band is compared against
    a rolling (1 s) median + 3 * MAD, floored at a quarter of the 99.5th
    percentile slope (and at a small fraction of the signal spread) so that
    flat stretches and out-of-band tones do not trigger.
    Slope peaks within 0.15 s of either end are ignored.
    """
    _check_detector_input(signal)
    x = signal.samples
    fs = signal.fs
    if _is_flat(x):
        return BeatAnnotations(np.empty(0, dtype=np.int64), "derivative")

    bp = bandpass(signal, 8.0, 20.0).samples
    s = np.abs(np.diff(bp, append=bp[-1]))
    win = max(int(round(fs)), 3)
    med = ndimage.median_filter(s, size=win, mode="reflect")
    mad = ndimage.median_filter(np.abs(s - med), size=win, mode="reflect")
    guard = int(round(EDGE_GUARD_S * fs))
    interior = np.zeros(s.size, dtype=bool)
    interior[guard : s.size - guard] = True
    if not interior.any():
        return BeatAnnotations(np.empty(0, dtype=np.int64), "derivative")
    # never below a slope a QRS-band wave at 5% of the signal's spread would
    # have; keeps out-of-band tones and filter ringing from triggering
    floor = max(
        0.25 * float(np.quantile(s[interior], 0.995)),
        0.05 * float(np.std(x)) * 2.0 * np.pi * 14.0 / fs,
    )
    thr = np.maximum(med + 3.0 * mad, floor)
    # slope bursts hugging the ends are filter start-up transients
    above = (s > thr) & interior
    if not above.any():
        return BeatAnnotations(np.empty(0, dtype=np.int64), "derivative")

    edges = np.diff(above.astype(np.int8), prepend=0, append=0)
    starts = np.nonzero(edges == 1)[0]
    ends = np.nonzero(edges == -1)[0]
    cands = np.array([a + int(np.argmax(s[a:b])) for a, b in zip(starts, ends)], dtype=np.int64)
    strength = s[cands]
    cands = _enforce_refractory(cands, strength, fs)
    idx = refine_to_extremum(x, cands, fs)
    return BeatAnnotations(idx, "derivative")


def match_beats(a: BeatAnnotations, b: BeatAnnotations, tol_s: float = DEFAULT_TOL_S, fs: float = None) -> BeatMatchResult:
    """Greedy chronological matching of two beat lists.

    Both lists are walked in time order: the earliest unmatched beats of
    ``a`` and ``b`` are paired when within the tolerance, otherwise the
    earlier of the two is left unmatched. On a line this greedy pass finds a
    maximum matching, so the matched count does not depend on argument
    order. ``tol_s`` is in seconds and needs ``fs``; pass ``fs=1`` to give
    the tolerance directly in samples.
    """
    if tol_s <= 0:
        raise ValueError("tolerance must be positive")
    if fs is None:
        raise ValueError("fs is required to convert the tolerance to samples")
    tol = tol_s * fs
    ia = np.asarray(a.indices if isinstance(a, BeatAnnotations) else a, dtype=np.int64)
    ib = np.asarray(b.indices if isinstance(b, BeatAnnotations) else b, dtype=np.int64)
    pairs = []
    i = j = 0
    while i < ia.size and j < ib.size:
        va, vb = int(ia[i]), int(ib[j])
        if abs(va - vb) <= tol:
            pairs.append((va, vb))
            i += 1
            j += 1
        elif va < vb:
            i += 1
        else:
            j += 1
    m = len(pairs)
    return BeatMatchResult(m, ia.size - m, ib.size - m, pairs)


def hr_series(beats: BeatAnnotations, fs: float) -> HeartRate:
    """Instantaneous heart rate ``60 / RR`` at each RR-interval midpoint."""
    idx = np.asarray(beats.indices if isinstance(beats, BeatAnnotations) else beats, dtype=float)
    if idx.size < 2:
        raise SignalError("insufficient beats")
    t = idx / fs
    rr = np.diff(t)
    return HeartRate((t[1:] + t[:-1]) / 2.0, 60.0 / rr, rr)
