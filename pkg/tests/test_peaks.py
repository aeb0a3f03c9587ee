import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sqikit.peaks import (
    BeatAnnotations,
    detect_derivative,
    detect_energy,
    hr_series,
    match_beats,
)
from sqikit.signal_core import Signal, SignalError
from sqikit.synthetic import synthetic_ecg


def test_energy_detector_on_clean_ecg(clean_ecg):
    sig, truth = clean_ecg
    beats = detect_energy(sig)
    assert len(beats) == 12 == truth.size
    assert np.max(np.abs(beats.indices - truth)) <= 2
    assert beats.detector_id == "energy"


def test_derivative_detector_agrees(clean_ecg):
    sig, truth = clean_ecg
    a, b = detect_energy(sig), detect_derivative(sig)
    assert len(a) == len(b)
    assert np.max(np.abs(a.indices - b.indices)) <= 3


@pytest.mark.parametrize("detector", [detect_energy, detect_derivative])
def test_flat_line_has_no_beats(detector):
    assert len(detector(Signal(np.zeros(5000), 500))) == 0


def test_derivative_rejects_mains_tone():
    t = np.arange(5000) / 500
    assert len(detect_derivative(Signal(np.sin(2 * np.pi * 50 * t), 500))) == 0


@pytest.mark.parametrize("detector", [detect_energy, detect_derivative])
def test_detector_preconditions(detector):
    with pytest.raises(SignalError):
        detector(Signal(np.zeros(900), 500))
    with pytest.raises(SignalError):
        detector(Signal(np.zeros(500), 50))


@pytest.mark.parametrize("hr", [40, 60, 90, 120, 150, 180])
@pytest.mark.parametrize("fs", [125, 360, 500])
def test_sensitivity_over_heart_rates(hr, fs):
    sig, truth = synthetic_ecg(10.0, fs, hr, jitter=0.02, seed=hr)
    for detector in (detect_energy, detect_derivative):
        beats = detector(sig)
        res = match_beats(BeatAnnotations(truth), beats, 0.15, fs)
        assert res.matched / truth.size >= 0.99
        gaps = np.diff(beats.indices)
        assert np.all(gaps >= 0.2 * fs)


def test_match_beats_examples():
    a = BeatAnnotations([100, 600])
    res = match_beats(a, BeatAnnotations([110, 1200]), 0.15, 500)
    assert (res.matched, res.only_a, res.only_b) == (1, 1, 1)
    assert res.pairs == [(100, 110)]
    same = match_beats(a, a, 0.15, 500)
    assert (same.matched, same.only_a, same.only_b) == (2, 0, 0)
    empty = match_beats(a, BeatAnnotations([]), 0.15, 500)
    assert (empty.matched, empty.only_a, empty.only_b) == (0, 2, 0)


def test_match_beats_rejects_bad_tolerance():
    with pytest.raises(ValueError):
        match_beats(BeatAnnotations([1]), BeatAnnotations([1]), 0.0, 500)


beat_lists = st.lists(st.integers(0, 5000), max_size=40, unique=True).map(sorted)


@settings(max_examples=200, deadline=None)
@given(beat_lists, beat_lists, st.integers(1, 200))
def test_match_beats_invariants(a, b, tol):
    A, B = BeatAnnotations(a), BeatAnnotations(b)
    ab = match_beats(A, B, tol, 1)
    ba = match_beats(B, A, tol, 1)
    assert ab.matched + ab.only_a == len(a)
    assert ab.matched + ab.only_b == len(b)
    assert (ab.matched, ab.only_a, ab.only_b) == (ba.matched, ba.only_b, ba.only_a)
    assert len({p[0] for p in ab.pairs}) == len({p[1] for p in ab.pairs}) == ab.matched
    assert all(abs(x - y) <= tol for x, y in ab.pairs)
    assert match_beats(A, A, tol, 1).matched == len(a)


def test_beat_annotations_validation():
    with pytest.raises(ValueError):
        BeatAnnotations([5, 3])
    with pytest.raises(ValueError):
        BeatAnnotations([1, 2], "unknown")


def test_hr_series_examples():
    hr = hr_series(BeatAnnotations(np.arange(0, 5000, 250)), 500)
    assert np.allclose(hr.bpm, 120.0)
    hr = hr_series(BeatAnnotations([0, 500, 1250]), 500)
    assert np.allclose(hr.bpm, [60.0, 40.0])
    assert np.allclose(hr.rr, [1.0, 1.5])
    assert np.allclose(hr.times, [0.5, 1.75])
    with pytest.raises(SignalError, match="insufficient beats"):
        hr_series(BeatAnnotations([3]), 500)


def test_hr_series_on_detected_beats(clean_ecg):
    sig, _ = clean_ecg
    hr = hr_series(detect_energy(sig), sig.fs)
    assert np.median(hr.bpm) == pytest.approx(72, abs=1)
