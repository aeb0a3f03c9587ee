"""Synthetic ECG for tests, CI benchmarks and the ``--synthetic`` fallbacks.

Each beat is a sum of Gaussian waves (P, Q, R, S, T) placed relative to the
R time, so the generator doubles as ground truth for the beat detectors.
"""

from __future__ import annotations

import numpy as np

from .signal_core import Signal

# (offset from R in s, amplitude in mV, width sigma in s)
WAVES = {
    "P": (-0.20, 0.12, 0.025),
    "Q": (-0.035, -0.10, 0.010),
    "R": (0.0, 1.00, 0.011),
    "S": (0.035, -0.20, 0.010),
    "T": (0.28, 0.25, 0.045),
}


def beat_times(duration: float, hr_bpm: float, first: float = 0.4, jitter: float = 0.0, rng=None):
    """R times (s) for a train at ``hr_bpm``; ``hr_bpm`` may be a callable of time."""
    rng = np.random.default_rng(rng)
    times = []
    t = first
    while t < duration:
        times.append(t)
        hr = hr_bpm(t) if callable(hr_bpm) else hr_bpm
        rr = 60.0 / hr
        if jitter:
            rr *= 1.0 + jitter * rng.standard_normal()
        t += rr
    return np.asarray(times)


def ecg_from_beats(times, duration: float, fs: float, amplitude: float = 1.0, waves=None) -> np.ndarray:
    """Render Gaussian-wave beats centred on the given R times."""
    waves = WAVES if waves is None else waves
    n = int(round(duration * fs))
    t = np.arange(n) / fs
    x = np.zeros(n)
    for tr in times:
        for off, amp, sig in waves.values():
            c = tr + off
            lo = max(int((c - 5 * sig) * fs), 0)
            hi = min(int((c + 5 * sig) * fs) + 2, n)
            if hi <= lo:
                continue
            seg = t[lo:hi]
            x[lo:hi] += amp * np.exp(-0.5 * ((seg - c) / sig) ** 2)
    return amplitude * x


def synthetic_ecg(
    duration: float = 10.0,
    fs: float = 500.0,
    hr_bpm=72.0,
    amplitude: float = 1.0,
    jitter: float = 0.0,
    seed=None,
    first: float = 0.4,
):
    """Return ``(Signal, r_peak_indices)`` for a clean synthetic ECG."""
    rng = np.random.default_rng(seed)
    times = beat_times(duration, hr_bpm, first=first, jitter=jitter, rng=rng)
    # keep whole complexes only, clear of the detectors' edge guard
    times = times[times < duration - 0.2]
    x = ecg_from_beats(times, duration, fs, amplitude)
    idx = np.round(times * fs).astype(int)
    return Signal(x, fs), idx


def gaussian_noise(n: int, seed=None) -> np.ndarray:
    return np.random.default_rng(seed).standard_normal(n)


def add_noise_at_snr(x: np.ndarray, snr_db: float, seed=None) -> np.ndarray:
    """Add white Gaussian noise so that mean-square(x) / mean-square(noise) hits ``snr_db``."""
    noise = gaussian_noise(x.size, seed)
    p_sig = np.mean(x * x)
    p_noise = np.mean(noise * noise)
    alpha = np.sqrt(p_sig / (p_noise * 10 ** (snr_db / 10)))
    return x + alpha * noise


def labelled_windows(n_records: int, noisy_fraction: float = 0.3, duration: float = 10.0,
                     fs: float = 500.0, seed: int = 0):
    """Synthetic quality-labelled recordings.

    Clean records are jittered synthetic ECG at random heart rates with mild
    noise; noisy records get one of several artifact types (heavy wideband
    noise, baseline wander, flat-line dropout, motion-like bursts).

    Returns a list of ``(record_id, Signal, label)``.
    """
    rng = np.random.default_rng(seed)
    out = []
    n_noisy = int(round(n_records * noisy_fraction))
    labels = np.array([1] * n_noisy + [0] * (n_records - n_noisy))
    rng.shuffle(labels)
    n = int(round(duration * fs))
    t = np.arange(n) / fs
    for i, label in enumerate(labels):
        hr = rng.uniform(50, 120)
        sig, _ = synthetic_ecg(duration, fs, hr, amplitude=rng.uniform(0.5, 2.0),
                               jitter=0.03, seed=rng.integers(1 << 31),
                               first=rng.uniform(0.2, 0.8))
        x = sig.samples.copy()
        x = add_noise_at_snr(x, rng.uniform(20, 30), seed=rng.integers(1 << 31))
        if label:
            kind = rng.integers(4)
            if kind == 0:
                x = add_noise_at_snr(x, rng.uniform(-8, 0), seed=rng.integers(1 << 31))
            elif kind == 1:
                amp = rng.uniform(2, 5) * np.std(x)
                x = x + amp * np.sin(2 * np.pi * rng.uniform(0.1, 0.6) * t + rng.uniform(0, 6))
                x = add_noise_at_snr(x, rng.uniform(0, 6), seed=rng.integers(1 << 31))
            elif kind == 2:
                s = rng.integers(0, n // 2)
                x[s:s + n // 2] = x[s]
                x = add_noise_at_snr(x, rng.uniform(0, 5), seed=rng.integers(1 << 31))
            else:
                bursts = np.zeros(n)
                for _ in range(rng.integers(3, 8)):
                    c = rng.integers(0, n)
                    w = int(rng.uniform(0.2, 1.0) * fs)
                    lo, hi = max(c - w, 0), min(c + w, n)
                    bursts[lo:hi] += rng.standard_normal(hi - lo).cumsum() * 0.05
                x = x + bursts * np.std(x) * rng.uniform(1, 4)
        out.append((f"syn{i:04d}", Signal(x, fs), int(label)))
    return out
