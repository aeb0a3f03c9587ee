"""Signal quality indices and per-method feature vectors.

Every index is computed on a single-lead window. Indices that cannot be
evaluated (flat lines, too few beats, zero-power bands) fall back to a
documented convention value and are reported in ``degenerate_flags`` rather
than raising, so that garbage windows still featurize.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from functools import cached_property

import numpy as np

from . import peaks as pk
from .signal_core import (
    Signal,
    SignalError,
    approximate_entropy,
    band_power,
    band_power_halfopen,
    highpass,
    lowpass,
    moments,
    periodogram,
    sample_entropy,
)

QRS_HALF_S = 0.05
TEMPLATE_HALF_S = 0.1
BASELINE_NEIGHBORHOOD_S = 1.0

METHOD_FEATURES = {
    "li2007": ("b_sqi", "p_sqi", "k_sqi"),
    "clifford2012": ("b_sqi", "p_sqi", "k_sqi", "s_sqi", "f_sqi", "bas_sqi"),
    "behar2013": ("k_sqi", "s_sqi", "p_sqi", "b_sqi"),
    "li2014": (
        "b_sqi", "p_sqi", "k_sqi", "s_sqi", "f_sqi", "bas_sqi",
        "bs_sqi", "e_sqi", "hf_sqi", "pur_sqi", "rsd_sqi", "ent_sqi",
    ),
    "geometric": (
        "hr_median", "hr_iqr", "hr_slope", "rr_std", "samp_en", "ap_en",
        "lf_rel", "hf_rel", "lf_hf_ratio",
    ),
    "averageqrs": ("averageqrs_sqi",),
    "zhao2018": ("zhao2018_sqi",),
    "orphanidou2015": ("orphanidou_sqi",),
}

# samp_en and ent_sqi are the same quantity (m=2, r=0.2*std); the combined
# set keeps it once, under ent_sqi.
_ALIASES = {"samp_en": "ent_sqi"}


def _union_features():
    names = []
    for method in ("li2014", "geometric", "averageqrs", "orphanidou2015"):
        for name in METHOD_FEATURES[method]:
            name = _ALIASES.get(name, name)
            if name not in names:
                names.append(name)
    return tuple(names)


METHOD_FEATURES["all"] = _union_features()
METHODS = tuple(METHOD_FEATURES)


@dataclass(frozen=True)
class FeatureVector:
    values: dict
    method_id: str
    degenerate_flags: frozenset = frozenset()

    def names(self):
        return list(self.values)

    def as_array(self):
        return np.array(list(self.values.values()), dtype=float)


@dataclass(frozen=True)
class ZhaoThresholds:
    """Rule thresholds for the zhao2018 voting scheme.

    Each index scores 2 (optimal), 1 (suspicious) or 0 (unqualified).
    """

    q_optimal: float = 0.90
    q_suspicious: float = 0.60
    p_optimal_lo: float = 0.50
    p_optimal_hi: float = 0.80
    p_suspicious_lo: float = 0.40
    p_suspicious_hi: float = 0.90
    k_optimal: float = 5.0
    k_suspicious: float = 3.0
    bas_optimal: float = 0.95
    bas_suspicious: float = 0.90
    excellent_min: int = 7
    acceptable_min: int = 4

    @classmethod
    def from_mapping(cls, mapping: dict) -> "ZhaoThresholds":
        known = {f.name: f.type for f in fields(cls)}
        kw = {}
        for key, value in mapping.items():
            if key not in known:
                raise KeyError(f"unknown zhao threshold {key!r}")
            kw[key] = int(value) if key.endswith("_min") else float(value)
        return cls(**kw)


class _Cache:
    """Lazily computed intermediate results shared between indices."""

    def __init__(self, signal: Signal):
        self.signal = signal
        self.flags: set = set()

    @cached_property
    def spectrum(self):
        return periodogram(self.signal)

    @cached_property
    def beats(self):
        return pk.detect_energy(self.signal)

    @cached_property
    def beats_b(self):
        return pk.detect_derivative(self.signal)

    @cached_property
    def sampen(self):
        return sample_entropy(self.signal, 2, 0.2 * float(np.std(self.signal.samples)), return_flag=True)


def _ratio(num, den):
    # degenerate denominator -> (0, flagged)
    if den <= 0 or not np.isfinite(den):
        return 0.0, True
    return float(num / den), False


# ---------------------------------------------------------------------------
# individual indices
# ---------------------------------------------------------------------------


def moment_sqis(signal: Signal) -> dict:
    """Kurtosis (Pearson) and skewness of the window."""
    m = moments(signal)
    out = {"k_sqi": m.kurtosis, "s_sqi": m.skewness}
    if m.degenerate:
        out["_flags"] = {"k_sqi", "s_sqi"}
    return out


def spectral_sqis(signal: Signal, spectrum=None) -> dict:
    """pSQI, fSQI and basSQI from the Hann periodogram.

    p_sqi   = P(5-15 Hz) / P(5-40 Hz)
    bas_sqi = 1 - P(0-1 Hz) / P(0-40 Hz)
    f_sqi   = spectral flatness (geometric / arithmetic mean) over (0, 40] Hz
    """
    if signal.fs < 100:
        raise SignalError("spectral SQIs need fs >= 100 Hz")
    if signal.duration < 1.0:
        raise SignalError("spectral SQIs need at least 1 s of signal")
    spec = periodogram(signal) if spectrum is None else spectrum
    flags = set()
    p, bad = _ratio(band_power(spec, 5, 15), band_power(spec, 5, 40))
    if bad:
        flags.add("p_sqi")
    base, bad = _ratio(band_power(spec, 0, 1), band_power(spec, 0, 40))
    bas = 0.0 if bad else 1.0 - base
    if bad:
        flags.add("bas_sqi")

    sel = (spec.freqs > 0) & (spec.freqs <= 40)
    psd = spec.power[sel]
    am = float(psd.mean()) if psd.size else 0.0
    if am <= 0:
        f = 0.0
        flags.add("f_sqi")
    else:
        # relative floor so log() of exact-zero bins stays finite
        gm = float(np.exp(np.mean(np.log(np.maximum(psd, am * 1e-12)))))
        f = gm / am
    out = {"p_sqi": p, "f_sqi": f, "bas_sqi": bas}
    if flags:
        out["_flags"] = flags
    return out


def b_sqi(signal: Signal, tol_s: float = pk.DEFAULT_TOL_S, beats_a=None, beats_b=None, return_flag=False):
    """Beat agreement between the energy and derivative detectors.

    ``matched / (|A| + |B| - matched)``; two empty detections give 0, flagged.
    """
    a = pk.detect_energy(signal) if beats_a is None else beats_a
    b = pk.detect_derivative(signal) if beats_b is None else beats_b
    res = pk.match_beats(a, b, tol_s, fs=signal.fs)
    denom = len(a) + len(b) - res.matched
    if denom == 0:
        value, flag = 0.0, True
    else:
        value, flag = res.matched / denom, False
    return (value, flag) if return_flag else value


def _qrs_bounds(n, beat, hw):
    return max(beat - hw, 0), min(beat + hw + 1, n)


def qrs_morph_sqis(signal: Signal, beats) -> dict:
    """QRS-anchored morphology indices: bs, e, hf, pur and rsd.

    Parameters
    ----------
    signal : Signal
        ECG window.
    beats : BeatAnnotations or sequence of int
        R-peak indices, at least three.

    Returns
    -------
    dict
        bs_sqi  : mean R / (R + baseline peak-to-peak in a 1 s neighbourhood
                  of the 1 Hz low-passed signal)
        e_sqi   : energy inside QRS windows (R +/- 0.05 s) / total energy
        hf_sqi  : mean RMS of the > 40 Hz residual in each QRS window / R
        pur_sqi : w2**2 / (w0 * w4) from the spectral moments
        rsd_sqi : mean QRS-window std / (2 * whole-window std)
    """
    idx = np.asarray(getattr(beats, "indices", beats), dtype=np.int64)
    if idx.size < 3:
        raise SignalError("insufficient beats")
    x = signal.samples
    n = x.size
    fs = signal.fs
    hw = max(int(round(QRS_HALF_S * fs)), 1)
    nb = int(round(BASELINE_NEIGHBORHOOD_S * fs / 2))
    flags = set()

    baseline = lowpass(signal, 1.0).samples
    hf = highpass(signal, 40.0).samples if fs / 2 > 40 else np.zeros(n)
    xc = x - x.mean()

    bs_vals, hf_vals, rsd_vals = [], [], []
    mask = np.zeros(n, dtype=bool)
    for b in idx:
        lo, hi = _qrs_bounds(n, int(b), hw)
        seg = x[lo:hi]
        r_amp = float(np.ptp(seg))
        mask[lo:hi] = True
        blo, bhi = max(int(b) - nb, 0), min(int(b) + nb + 1, n)
        wander = float(np.ptp(baseline[blo:bhi]))
        if r_amp + wander > 0:
            bs_vals.append(r_amp / (r_amp + wander))
        if r_amp > 0:
            hf_vals.append(float(np.sqrt(np.mean(hf[lo:hi] ** 2))) / r_amp)
        rsd_vals.append(float(np.std(seg)))

    bs = float(np.mean(bs_vals)) if bs_vals else 0.0
    if not bs_vals:
        flags.add("bs_sqi")
    hfv = float(np.mean(hf_vals)) if hf_vals else 0.0
    if not hf_vals:
        flags.add("hf_sqi")

    e, bad = _ratio(float(np.sum(xc[mask] ** 2)), float(np.sum(xc**2)))
    if bad:
        flags.add("e_sqi")

    sd = float(np.std(x))
    rsd, bad = _ratio(float(np.mean(rsd_vals)), 2.0 * sd)
    if bad:
        flags.add("rsd_sqi")

    spec = periodogram(signal)
    f = spec.freqs
    w0 = float(np.sum(spec.power))
    w2 = float(np.sum(f**2 * spec.power))
    w4 = float(np.sum(f**4 * spec.power))
    pur, bad = _ratio(w2 * w2, w0 * w4)
    if bad:
        flags.add("pur_sqi")

    out = {"bs_sqi": bs, "e_sqi": e, "hf_sqi": hfv, "pur_sqi": pur, "rsd_sqi": rsd}
    if flags:
        out["_flags"] = flags
    return out


def ent_sqi(signal: Signal, return_flag=False):
    """Sample entropy with m = 2 and r = 0.2 * std."""
    res = sample_entropy(signal, 2, 0.2 * float(np.std(signal.samples)), return_flag=True)
    return tuple(res) if return_flag else res.value


def _pearson(a, b):
    a = a - a.mean()
    b = b - b.mean()
    den = np.sqrt(np.dot(a, a) * np.dot(b, b))
    return float(np.dot(a, b) / den) if den > 0 else 0.0


def template_sqis(signal: Signal, beats) -> dict:
    """Template correlation indices.

    averageqrs_sqi is the mean Pearson correlation of each beat segment
    (R +/- 0.1 s) with the average template. orphanidou_sqi is the same
    value, or 0 if the rhythm is implausible (any instantaneous HR outside
    40-180 bpm, an RR gap over 3 s, or max/min RR above 2.2).
    """
    idx = np.asarray(getattr(beats, "indices", beats), dtype=np.int64)
    if idx.size < 3:
        raise SignalError("insufficient beats")
    x = signal.samples
    hw = max(int(round(TEMPLATE_HALF_S * signal.fs)), 1)
    full = idx[(idx - hw >= 0) & (idx + hw < x.size)]
    if full.size < 3:
        raise SignalError("insufficient beats")
    segs = np.stack([x[b - hw : b + hw + 1] for b in full])
    template = segs.mean(axis=0)
    corr = float(np.mean([_pearson(s, template) for s in segs]))

    rr = np.diff(idx) / signal.fs
    hr = 60.0 / rr
    plausible = (
        np.all((hr >= 40) & (hr <= 180))
        and rr.max() <= 3.0
        and rr.max() / rr.min() <= 2.2
    )
    return {"averageqrs_sqi": corr, "orphanidou_sqi": corr if plausible else 0.0}


def _score(value, optimal, suspicious):
    if optimal(value):
        return 2
    if suspicious(value):
        return 1
    return 0


def zhao2018_classify(signal: Signal, thresholds: ZhaoThresholds = None, cache=None) -> dict:
    """Rule-based vote over qSQI (= b_sqi), pSQI, kSQI and basSQI.

    Returns the quality ``level`` ("excellent", "acceptable",
    "unacceptable") and ``zhao2018_sqi`` = vote sum / 8.
    """
    th = thresholds or ZhaoThresholds()
    c = cache or _Cache(signal)
    q = b_sqi(signal, beats_a=c.beats, beats_b=c.beats_b)
    spec = spectral_sqis(signal, c.spectrum)
    k = moments(signal).kurtosis
    p, bas = spec["p_sqi"], spec["bas_sqi"]
    total = (
        _score(q, lambda v: v > th.q_optimal, lambda v: v >= th.q_suspicious)
        + _score(
            p,
            lambda v: th.p_optimal_lo <= v <= th.p_optimal_hi,
            lambda v: th.p_suspicious_lo <= v <= th.p_suspicious_hi,
        )
        + _score(k, lambda v: v > th.k_optimal, lambda v: v >= th.k_suspicious)
        + _score(bas, lambda v: v >= th.bas_optimal, lambda v: v >= th.bas_suspicious)
    )
    if total >= th.excellent_min:
        level = "excellent"
    elif total >= th.acceptable_min:
        level = "acceptable"
    else:
        level = "unacceptable"
    return {"level": level, "zhao2018_sqi": total / 8.0, "score": total}


def geometric_features(signal: Signal, beats, spectrum=None, sampen=None) -> FeatureVector:
    """Heart-rate statistics, entropies and LF/HF band powers."""
    idx = np.asarray(getattr(beats, "indices", beats), dtype=np.int64)
    if idx.size < 3:
        raise SignalError("insufficient beats")
    fs = signal.fs
    hr = pk.hr_series(idx, fs)
    q75, q25 = np.percentile(hr.bpm, [75, 25])
    slope = float(np.polyfit(hr.times, hr.bpm, 1)[0])
    flags = set()

    if sampen is None:
        sampen = sample_entropy(signal, 2, 0.2 * float(np.std(signal.samples)), return_flag=True)
    if sampen.degenerate:
        flags.add("samp_en")
    ap = approximate_entropy(signal, 2, 0.2 * float(np.std(signal.samples)))

    spec = periodogram(signal) if spectrum is None else spectrum
    lf = band_power_halfopen(spec, 0.5, 8.0)
    hfp = band_power(spec, 8.0, 40.0)
    total = lf + hfp
    lf_rel, bad = _ratio(lf, total)
    hf_rel = 0.0 if bad else hfp / total
    if bad:
        flags |= {"lf_rel", "hf_rel"}
    ratio, bad = _ratio(lf, hfp)
    if bad:
        flags.add("lf_hf_ratio")

    values = {
        "hr_median": float(np.median(hr.bpm)),
        "hr_iqr": float(q75 - q25),
        "hr_slope": slope,
        "rr_std": float(np.std(hr.rr)),
        "samp_en": float(sampen.value),
        "ap_en": float(ap),
        "lf_rel": lf_rel,
        "hf_rel": hf_rel,
        "lf_hf_ratio": ratio,
    }
    return FeatureVector(values, "geometric", frozenset(flags))


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------


def _needed(method):
    names = set(METHOD_FEATURES[method])
    return {
        "moment": bool(names & {"k_sqi", "s_sqi"}),
        "spectral": bool(names & {"p_sqi", "f_sqi", "bas_sqi"}),
        "b": "b_sqi" in names,
        "morph": bool(names & {"bs_sqi", "e_sqi", "hf_sqi", "pur_sqi", "rsd_sqi"}),
        "ent": "ent_sqi" in names,
        "geometric": bool(names & set(METHOD_FEATURES["geometric"])),
        "template": bool(names & {"averageqrs_sqi", "orphanidou_sqi"}),
        "zhao": "zhao2018_sqi" in names,
    }


def _merge(values, flags, part, zero_names=()):
    flags |= part.pop("_flags", set())
    values.update(part)


def featurize(signal: Signal, method_id: str = "all", zhao_thresholds: ZhaoThresholds = None) -> FeatureVector:
    """Compute the feature set of one benchmarked method for one window.

    Beat-dependent indices on windows with fewer than three detected beats
    take their worst-case convention value (0) and are flagged.
    """
    if method_id not in METHOD_FEATURES:
        raise ValueError(f"unknown method {method_id!r}; choose from {', '.join(METHODS)}")
    if signal.fs < 100 or signal.duration < 2.0:
        raise SignalError("featurize needs fs >= 100 Hz and at least 2 s of signal")
    need = _needed(method_id)
    c = _Cache(signal)
    values: dict = {}
    flags: set = set()

    if need["moment"]:
        _merge(values, flags, moment_sqis(signal))
    if need["spectral"]:
        _merge(values, flags, spectral_sqis(signal, c.spectrum))
    if need["b"]:
        v, bad = b_sqi(signal, beats_a=c.beats, beats_b=c.beats_b, return_flag=True)
        values["b_sqi"] = v
        if bad:
            flags.add("b_sqi")
    if need["morph"]:
        try:
            _merge(values, flags, qrs_morph_sqis(signal, c.beats))
        except SignalError:
            for name in ("bs_sqi", "e_sqi", "hf_sqi", "pur_sqi", "rsd_sqi"):
                values[name] = 0.0
                flags.add(name)
    if need["ent"]:
        values["ent_sqi"] = c.sampen.value
        if c.sampen.degenerate:
            flags.add("ent_sqi")
    if need["geometric"]:
        try:
            g = geometric_features(signal, c.beats, c.spectrum, c.sampen)
            values.update(g.values)
            flags |= g.degenerate_flags
        except SignalError:
            for name in METHOD_FEATURES["geometric"]:
                values[name] = 0.0
                flags.add(name)
    if need["template"]:
        try:
            values.update(template_sqis(signal, c.beats))
        except SignalError:
            values.update({"averageqrs_sqi": 0.0, "orphanidou_sqi": 0.0})
            flags |= {"averageqrs_sqi", "orphanidou_sqi"}
    if need["zhao"]:
        values["zhao2018_sqi"] = zhao2018_classify(signal, zhao_thresholds, c)["zhao2018_sqi"]

    if "samp_en" in values and "ent_sqi" not in values:
        values["ent_sqi"] = values["samp_en"]
    names = METHOD_FEATURES[method_id]
    ordered = {}
    for name in names:
        v = values[name]
        if not np.isfinite(v):
            v = 0.0
            flags.add(name)
        ordered[name] = float(v) + 0.0  # no negative zero
    return FeatureVector(ordered, method_id, frozenset(f for f in flags if f in ordered))


def _featurize_star(args):
    return featurize(*args)


def featurize_many(signals, method_id: str = "all", n_jobs: int = 1, zhao_thresholds=None) -> list:
    """Featurize a batch; output order always matches input order."""
    args = [(s, method_id, zhao_thresholds) for s in signals]
    if n_jobs is None or n_jobs <= 1 or len(args) < 2:
        return [featurize(*a) for a in args]
    with ProcessPoolExecutor(max_workers=n_jobs) as ex:
        return list(ex.map(_featurize_star, args, chunksize=max(len(args) // (4 * n_jobs), 1)))
