"""PhysioNet record/annotation I/O, CSV schemas, noise mixing and the
denoising corpus builder."""

from __future__ import annotations

import csv
import hashlib
import os
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .peaks import BeatAnnotations
from .signal_core import Signal, SignalError

SUPPORTED_FORMATS = (212, 16)
DEFAULT_GAIN = 200.0
NOISE_KINDS = ("em", "ma", "bw", "gn", "all")
Q3_LEVELS = (-6, 0, 6, 12, 18, 24)
Q3_WINDOW = 512


class RecordFormatError(ValueError):
    pass


@dataclass(frozen=True)
class SignalSpec:
    file_name: str
    fmt: int
    gain: float
    baseline: int
    units: str = "mV"
    adc_resolution: int = 12
    adc_zero: int = 0
    initial_value: int = 0
    checksum: int = 0
    block_size: int = 0
    description: str = ""
    byte_offset: int = 0


@dataclass(frozen=True)
class RecordHeader:
    record_name: str
    n_signals: int
    fs: float
    n_samples: int
    signals: tuple = ()
    comments: tuple = ()

    def __post_init__(self):
        if self.n_signals < 1:
            raise RecordFormatError("a record needs at least one signal")
        if not self.fs > 0:
            raise RecordFormatError("sampling frequency must be positive")
        for s in self.signals:
            if not s.gain > 0:
                raise RecordFormatError("gain must be positive")

    def lead_index(self, name: str) -> int:
        for i, s in enumerate(self.signals):
            if s.description.strip().upper() == name.upper():
                return i
        raise KeyError(f"lead {name!r} not in record {self.record_name}")


# ---------------------------------------------------------------------------
# headers
# ---------------------------------------------------------------------------

_FMT_RE = re.compile(r"^(\d+)(?:x\d+)?(?::\d+)?(?:\+(\d+))?$")
_GAIN_RE = re.compile(r"^([-+0-9.eE]+)(?:\((-?\d+)\))?(?:/(\S+))?$")


def parse_header(text: str) -> RecordHeader:
    """Parse the text of a ``.hea`` header (single-segment records)."""
    lines = []
    comments = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            comments.append(line[1:].strip())
            continue
        lines.append(line)
    if not lines:
        raise RecordFormatError("empty header")
    rec = lines[0].split()
    name = rec[0].split("/")[0]
    if "/" in rec[0]:
        raise RecordFormatError("multi-segment records are not supported")
    try:
        n_sig = int(rec[1])
        fs = float(rec[2].split("/")[0].split("(")[0]) if len(rec) > 2 else 250.0
        n_samples = int(rec[3]) if len(rec) > 3 else 0
    except (IndexError, ValueError):
        raise RecordFormatError(f"malformed record line: {lines[0]!r}") from None

    specs = []
    for line in lines[1 : 1 + n_sig]:
        f = line.split(None, 8)
        if len(f) < 2:
            raise RecordFormatError(f"malformed signal line: {line!r}")
        m = _FMT_RE.match(f[1])
        if not m:
            raise RecordFormatError(f"malformed format field {f[1]!r}")
        fmt = int(m.group(1))
        offset = int(m.group(2)) if m.group(2) else 0
        gain, baseline, units = DEFAULT_GAIN, None, "mV"
        if len(f) > 2:
            g = _GAIN_RE.match(f[2])
            if not g:
                raise RecordFormatError(f"malformed gain field {f[2]!r}")
            gain = float(g.group(1)) or DEFAULT_GAIN
            baseline = int(g.group(2)) if g.group(2) is not None else None
            units = g.group(3) or "mV"
        ints = []
        for k in range(3, 8):
            ints.append(int(f[k]) if len(f) > k else 0)
        adc_res, adc_zero, init_val, checksum, block = ints
        desc = f[8] if len(f) > 8 else ""
        specs.append(SignalSpec(
            file_name=f[0], fmt=fmt, gain=gain,
            baseline=adc_zero if baseline is None else baseline,
            units=units, adc_resolution=adc_res, adc_zero=adc_zero,
            initial_value=init_val, checksum=checksum, block_size=block,
            description=desc, byte_offset=offset,
        ))
    if len(specs) != n_sig:
        raise RecordFormatError(f"header declares {n_sig} signals but lists {len(specs)}")
    return RecordHeader(name, n_sig, fs, n_samples, tuple(specs), tuple(comments))


def read_header(path) -> RecordHeader:
    path = Path(path)
    if path.suffix != ".hea":
        path = path.with_suffix(".hea")
    return parse_header(path.read_text(encoding="latin-1"))


# ---------------------------------------------------------------------------
# sample formats
# ---------------------------------------------------------------------------


def decode_212(data: bytes, n_values: int = None) -> np.ndarray:
    """Unpack 12-bit two's-complement pairs stored in byte triples."""
    buf = np.frombuffer(data, dtype=np.uint8)
    n_full = buf.size // 3
    tail = buf.size - 3 * n_full
    if n_values is None:
        n_values = 2 * n_full + (1 if tail >= 2 else 0)
    need = (3 * n_values + 1) // 2
    if buf.size < need:
        raise RecordFormatError(
            f"truncated format-212 data: need {need} bytes, file ends at byte offset {buf.size}")
    padded = np.zeros(3 * ((n_values + 1) // 2), dtype=np.int32)
    padded[:need] = buf[:need]
    t = padded.reshape(-1, 3)
    first = t[:, 0] | ((t[:, 1] & 0x0F) << 8)
    second = t[:, 2] | ((t[:, 1] >> 4) << 8)
    out = np.empty(2 * t.shape[0], dtype=np.int32)
    out[0::2] = first
    out[1::2] = second
    out = out[:n_values]
    out[out >= 2048] -= 4096
    return out


def encode_212(values) -> bytes:
    v = np.asarray(values, dtype=np.int64)
    if v.size and (v.min() < -2048 or v.max() > 2047):
        raise ValueError("format 212 holds 12-bit values (-2048..2047)")
    u = (v & 0xFFF).astype(np.int64)
    if u.size % 2:
        u = np.append(u, 0)
    a, b = u[0::2], u[1::2]
    out = np.empty((a.size, 3), dtype=np.uint8)
    out[:, 0] = a & 0xFF
    out[:, 1] = ((a >> 8) & 0x0F) | (((b >> 8) & 0x0F) << 4)
    out[:, 2] = b & 0xFF
    raw = out.tobytes()
    return raw[: (3 * v.size + 1) // 2]


def decode_16(data: bytes, n_values: int = None) -> np.ndarray:
    if n_values is None:
        n_values = len(data) // 2
    need = 2 * n_values
    if len(data) < need:
        raise RecordFormatError(
            f"truncated format-16 data: need {need} bytes, file ends at byte offset {len(data)}")
    return np.frombuffer(data[:need], dtype="<i2").astype(np.int32)


def encode_16(values) -> bytes:
    v = np.asarray(values, dtype=np.int64)
    if v.size and (v.min() < -32768 or v.max() > 32767):
        raise ValueError("format 16 holds 16-bit values")
    return v.astype("<i2").tobytes()


def read_adc(header_path, signal_index: int = 0):
    """Raw ADC integers of one signal and its header."""
    header_path = Path(header_path)
    hdr = read_header(header_path)
    if not 0 <= signal_index < hdr.n_signals:
        raise IndexError(f"signal index {signal_index} out of range ({hdr.n_signals} signals)")
    sig_info = hdr.signals[signal_index]
    if sig_info.fmt not in SUPPORTED_FORMATS:
        raise RecordFormatError(f"unsupported storage format {sig_info.fmt}")
    # signals sharing a file are frame-interleaved
    group = [i for i, s in enumerate(hdr.signals) if s.file_name == sig_info.file_name]
    if any(hdr.signals[i].fmt != sig_info.fmt for i in group):
        raise RecordFormatError("mixed formats within one signal file are not supported")
    pos = group.index(signal_index)
    data_path = header_path.parent / sig_info.file_name
    raw = data_path.read_bytes()[sig_info.byte_offset:]
    n_sig = len(group)
    n_values = hdr.n_samples * n_sig if hdr.n_samples else None
    values = decode_212(raw, n_values) if sig_info.fmt == 212 else decode_16(raw, n_values)
    if n_values is None:
        values = values[: (values.size // n_sig) * n_sig]
    return values.reshape(-1, n_sig)[:, pos], hdr


def read_record(header_path, signal_index: int = 0) -> Signal:
    """Physical signal (``(adc - baseline) / gain``) of one channel."""
    adc, hdr = read_adc(header_path, signal_index)
    sig_info = hdr.signals[signal_index]
    return Signal((adc - sig_info.baseline) / sig_info.gain, hdr.fs)


def write_record(directory, record_name: str, adc, fs: float, fmt: int = 16,
                 gains=None, baselines=None, leads=None) -> Path:
    """Write a single-file record from raw ADC integers (shape n or n x n_sig)."""
    adc = np.asarray(adc, dtype=np.int64)
    if adc.ndim == 1:
        adc = adc[:, None]
    n, n_sig = adc.shape
    gains = list(gains) if gains is not None else [DEFAULT_GAIN] * n_sig
    baselines = list(baselines) if baselines is not None else [0] * n_sig
    leads = list(leads) if leads is not None else [f"ch{i}" for i in range(n_sig)]
    if fmt not in SUPPORTED_FORMATS:
        raise RecordFormatError(f"unsupported storage format {fmt}")
    directory = Path(directory)
    dat = f"{record_name}.dat"
    flat = adc.ravel()
    (directory / dat).write_bytes(encode_212(flat) if fmt == 212 else encode_16(flat))
    res = 12 if fmt == 212 else 16
    lines = [f"{record_name} {n_sig} {fs:g} {n}"]
    for i in range(n_sig):
        checksum = int(np.sum(adc[:, i])) & 0xFFFF
        if checksum >= 32768:
            checksum -= 65536
        first = int(adc[0, i]) if n else 0
        lines.append(f"{dat} {fmt} {gains[i]:g}({baselines[i]})/mV {res} {baselines[i]} "
                     f"{first} {checksum} 0 {leads[i]}")
    hea = directory / f"{record_name}.hea"
    hea.write_text("\n".join(lines) + "\n", encoding="ascii")
    return hea


def write_physical(directory, record_name: str, signal: Signal, fmt: int = 16,
                   gain: float = DEFAULT_GAIN, baseline: int = 0) -> Path:
    adc = np.round(signal.samples * gain + baseline).astype(np.int64)
    return write_record(directory, record_name, adc, signal.fs, fmt, [gain], [baseline])


# ---------------------------------------------------------------------------
# annotations
# ---------------------------------------------------------------------------

SKIP, NUM, SUB, CHN, AUX = 59, 60, 61, 62, 63
BEAT_CODES = frozenset({1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 25, 30, 34, 35, 38, 41})


def decode_annotations(data: bytes):
    """Decode an interval-coded annotation stream into (samples, codes)."""
    n = len(data)
    pos = 0
    t = 0
    samples, codes = [], []
    while pos + 1 < n:
        word = data[pos] | (data[pos + 1] << 8)
        code, interval = word >> 10, word & 0x3FF
        here = pos
        pos += 2
        if code == 0 and interval == 0:
            return np.asarray(samples, dtype=np.int64), np.asarray(codes, dtype=np.int64)
        if code == SKIP:
            if pos + 4 > n:
                raise RecordFormatError(f"truncated SKIP interval at byte offset {here}")
            hi = data[pos] | (data[pos + 1] << 8)
            lo = data[pos + 2] | (data[pos + 3] << 8)
            skip = (hi << 16) | lo
            if skip >= 1 << 31:
                skip -= 1 << 32
            t += skip
            pos += 4
        elif code in (NUM, SUB, CHN):
            pass
        elif code == AUX:
            pos += interval + (interval & 1)
            if pos > n:
                raise RecordFormatError(f"truncated AUX payload at byte offset {here}")
        else:
            t += interval
            samples.append(t)
            codes.append(code)
    if pos != n:
        raise RecordFormatError(f"dangling byte at offset {pos}")
    # a stream may omit the terminator
    return np.asarray(samples, dtype=np.int64), np.asarray(codes, dtype=np.int64)


def encode_annotations(samples, codes=None) -> bytes:
    """Encode annotations; long gaps use the SKIP escape."""
    samples = np.asarray(samples, dtype=np.int64)
    codes = np.ones(samples.size, dtype=np.int64) if codes is None else np.asarray(codes, dtype=np.int64)
    out = bytearray()
    prev = 0
    for s, c in zip(samples, codes):
        gap = int(s - prev)
        if gap < 0:
            raise ValueError("annotation samples must be non-decreasing")
        if gap > 1023:
            out += (SKIP << 10).to_bytes(2, "little")
            out += ((gap >> 16) & 0xFFFF).to_bytes(2, "little")
            out += (gap & 0xFFFF).to_bytes(2, "little")
            gap = 0
        out += ((int(c) << 10) | gap).to_bytes(2, "little")
        prev = int(s)
    out += b"\x00\x00"
    return bytes(out)


def read_annotations(path, beats_only: bool = True) -> BeatAnnotations:
    samples, codes = decode_annotations(Path(path).read_bytes())
    if beats_only:
        samples = samples[np.isin(codes, list(BEAT_CODES))]
    # coincident annotations collapse to one beat
    samples = np.unique(samples)
    return BeatAnnotations(samples, "external")


# ---------------------------------------------------------------------------
# CSV schemas
# ---------------------------------------------------------------------------

FEATURE_META = ("record_id", "window_start_s", "method")


def _fmt(v) -> str:
    return repr(float(v))


def write_feature_csv(path, rows, feature_names, with_label: bool = False) -> None:
    """rows: iterable of dicts with record_id, window_start_s, method, features, [label]."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([*FEATURE_META, *feature_names, *(["label"] if with_label else [])])
        for r in rows:
            line = [r["record_id"], _fmt(r["window_start_s"]), r["method"]]
            line += [_fmt(r["features"][k]) for k in feature_names]
            if with_label:
                line.append(str(int(r["label"])))
            w.writerow(line)


def read_feature_csv(path):
    """Returns (record_ids, window_starts, feature_names, matrix, labels-or-None)."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header[:3]) != FEATURE_META:
            raise ValueError(f"{path}: not a feature CSV")
        has_label = header[-1] == "label"
        names = header[3:-1] if has_label else header[3:]
        ids, starts, feats, labels = [], [], [], []
        for row in reader:
            ids.append(row[0])
            starts.append(float(row[1]))
            feats.append([float(v) for v in row[3 : 3 + len(names)]])
            if has_label:
                labels.append(int(row[-1]))
    x = np.asarray(feats, dtype=float).reshape(len(feats), len(names))
    return ids, np.asarray(starts), list(names), x, (np.asarray(labels) if has_label else None)


def read_signal_csv(path) -> Signal:
    """Two-column CSV (``time_s, value``) with a header row; fs from the time step."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] < 2 or data.shape[0] < 2:
        raise SignalError(f"{path}: expected columns time_s,value and at least two rows")
    dt = np.diff(data[:, 0])
    step = float(np.median(dt))
    if step <= 0 or not np.allclose(dt, step, rtol=1e-6, atol=1e-9):
        raise SignalError(f"{path}: time column is not uniformly increasing")
    return Signal(data[:, 1], round(1.0 / step, 6))


def write_signal_csv(path, signal: Signal, extra: dict = None) -> None:
    cols = {"value": signal.samples, **(extra or {})}
    t = np.arange(len(signal)) / signal.fs
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["time_s", *cols])
        for i in range(len(signal)):
            w.writerow([_fmt(t[i]), *(_fmt(c[i]) for c in cols.values())])


# ---------------------------------------------------------------------------
# noise
# ---------------------------------------------------------------------------


def _power(x) -> float:
    return float(np.mean(np.square(x)))


def fit_length(noise: np.ndarray, n: int, rng) -> np.ndarray:
    """A length-``n`` excerpt of ``noise`` at a seeded offset, tiled if short."""
    if noise.size >= n:
        offset = int(rng.integers(noise.size - n + 1))
        return noise[offset : offset + n]
    offset = int(rng.integers(noise.size))
    return np.take(noise, offset + np.arange(n), mode="wrap")


def mix_at_snr(clean: Signal, noise: Signal, snr_db: float, seed: int = 0) -> Signal:
    """``clean + alpha * noise`` with alpha set from whole-window mean squares.

    The noise is cut (or tiled) to the clean length starting at a seeded
    random offset before its power is measured.
    """
    if not np.isfinite(snr_db):
        raise ValueError("snr_db must be finite")
    nz = noise.samples if isinstance(noise, Signal) else np.asarray(noise, float)
    if isinstance(noise, Signal) and noise.fs != clean.fs:
        raise SignalError("clean and noise sampling rates differ")
    rng = np.random.default_rng(seed)
    nz = fit_length(nz, len(clean), rng)
    p_clean = _power(clean.samples)
    p_noise = _power(nz)
    if p_clean == 0 or p_noise == 0:
        raise SignalError("zero-power clean or noise signal")
    alpha = np.sqrt(p_clean / (p_noise * 10.0 ** (snr_db / 10.0)))
    return clean.with_samples(clean.samples + alpha * nz)


def achieved_snr(clean, noisy) -> float:
    c = clean.samples if isinstance(clean, Signal) else np.asarray(clean)
    y = noisy.samples if isinstance(noisy, Signal) else np.asarray(noisy)
    return 10.0 * np.log10(_power(c) / _power(y - c))


def make_noise(kind: str, n: int, noise_records: dict = None, seed=0) -> np.ndarray:
    """Noise of ``kind`` with length ``n``.

    ``em``, ``ma`` and ``bw`` come from recorded noise (``noise_records``
    maps kind to an array or Signal); ``gn`` is seeded white Gaussian noise;
    ``all`` sums the four, each first scaled to unit power.
    """
    if kind not in NOISE_KINDS:
        raise ValueError(f"unknown noise kind {kind!r}")
    rng = np.random.default_rng(seed)
    if kind == "gn":
        return rng.standard_normal(n)
    if kind == "all":
        total = np.zeros(n)
        for k in ("em", "ma", "bw", "gn"):
            part = make_noise(k, n, noise_records, rng.integers(1 << 63))
            total += part / np.sqrt(_power(part))
        return total
    if not noise_records or kind not in noise_records:
        raise SignalError(f"no recorded noise available for {kind!r}")
    src = noise_records[kind]
    src = src.samples if isinstance(src, Signal) else np.asarray(src, float)
    return fit_length(src, n, rng)


# ---------------------------------------------------------------------------
# denoising corpus
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WindowRecord:
    record: str
    kind: str
    snr_db: float
    window: int
    start: int
    split: str


@dataclass
class Q3Corpus:
    train: list = field(default_factory=list)  # (noisy, clean) z-normalized pairs
    test: list = field(default_factory=list)
    train_meta: list = field(default_factory=list)
    test_meta: list = field(default_factory=list)
    test_raw: list = field(default_factory=list)  # (noisy, clean, fs) un-normalized
    seed: int = 0

    def __len__(self):
        return len(self.train) + len(self.test)

    def manifest(self) -> str:
        lines = [
            "# denoising corpus manifest",
            f"# window={Q3_WINDOW} stride={Q3_WINDOW} seed={self.seed}",
            "# normalization: per window, (x - mean(noisy)) / std(noisy) applied to noisy and clean",
            "# split: even window index -> train, odd -> test",
            "record\tkind\tsnr_db\twindow\tstart\tsplit",
        ]
        rows = sorted(self.train_meta + self.test_meta,
                      key=lambda m: (m.record, NOISE_KINDS.index(m.kind), m.snr_db, m.window))
        for m in rows:
            lines.append(f"{m.record}\t{m.kind}\t{m.snr_db:g}\t{m.window}\t{m.start}\t{m.split}")
        return "\n".join(lines) + "\n"

    def manifest_hash(self) -> str:
        return hashlib.sha256(self.manifest().encode("utf-8")).hexdigest()


def _build_cell(args):
    rec_name, clean, rec_i, kind, kind_i, level, level_i, noise_records, seed = args
    cell_rng = np.random.default_rng([seed, rec_i, kind_i, level_i])
    noise = make_noise(kind, len(clean), noise_records, cell_rng.integers(1 << 63))
    noisy = mix_at_snr(clean, Signal(noise, clean.fs), level, seed=cell_rng.integers(1 << 63))
    out = []
    x, y = clean.samples, noisy.samples
    for w, start in enumerate(range(0, len(clean) - Q3_WINDOW + 1, Q3_WINDOW)):
        nw = y[start : start + Q3_WINDOW]
        cw = x[start : start + Q3_WINDOW]
        mu = float(nw.mean())
        sd = float(nw.std()) or 1.0
        split = "train" if w % 2 == 0 else "test"
        meta = WindowRecord(rec_name, kind, float(level), w, start, split)
        out.append((meta, ((nw - mu) / sd, (cw - mu) / sd), (nw, cw)))
    return out


def build_q3_corpus(clean_records: dict, noise_records: dict = None, kinds=NOISE_KINDS,
                    levels=Q3_LEVELS, seed: int = 0, n_jobs: int = 1) -> Q3Corpus:
    """Mix every clean record with every (noise kind, SNR) and window the result.

    ``clean_records`` maps a record name to its Signal. Each cell draws its
    randomness from ``(seed, record, kind, level)`` so cells can be built
    in any order.
    """
    cells = []
    for rec_i, name in enumerate(sorted(clean_records)):
        for kind in kinds:
            if kind not in NOISE_KINDS:
                raise ValueError(f"unknown noise kind {kind!r}")
            for level_i, level in enumerate(levels):
                cells.append((name, clean_records[name], rec_i, kind, NOISE_KINDS.index(kind),
                              level, level_i, noise_records, seed))
    if n_jobs and n_jobs > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as ex:
            results = list(ex.map(_build_cell, cells))
    else:
        results = [_build_cell(c) for c in cells]
    corpus = Q3Corpus(seed=seed)
    for cell in results:
        for meta, pair, raw in cell:
            if meta.split == "train":
                corpus.train.append(pair)
                corpus.train_meta.append(meta)
            else:
                corpus.test.append(pair)
                corpus.test_meta.append(meta)
                corpus.test_raw.append(raw)
    return corpus


# ---------------------------------------------------------------------------
# dataset helpers
# ---------------------------------------------------------------------------


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def verify_checksums(directory, expected: dict) -> list:
    """Compare files against expected SHA-256 digests; returns mismatching names."""
    bad = []
    for name, digest in sorted(expected.items()):
        p = Path(directory) / name
        if not p.exists() or sha256_file(p) != digest.lower():
            bad.append(name)
    return bad


def read_checksum_file(path) -> dict:
    """Parse ``sha256sum``-style lines (``<hex digest>  <file name>``) into a dict."""
    out = {}
    for n, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(None, 1)
        if len(parts) != 2 or len(parts[0]) != 64:
            raise RecordFormatError(f"{path}:{n}: expected '<sha256> <name>'")
        out[parts[1].lstrip("*")] = parts[0]
    return out


def _read_list(path):
    if not Path(path).exists():
        return []
    return [ln.strip() for ln in Path(path).read_text().splitlines() if ln.strip()]


def load_picc_set_a(directory, lead: str = "II"):
    """Labelled PICC Set A records: list of ``(record_id, Signal, label)``.

    Labels come from ``RECORDS-acceptable`` (0) and ``RECORDS-unacceptable``
    (1); records in neither list are skipped.
    """
    directory = Path(directory)
    labels = {r: 0 for r in _read_list(directory / "RECORDS-acceptable")}
    labels.update({r: 1 for r in _read_list(directory / "RECORDS-unacceptable")})
    out = []
    for rec in sorted(labels):
        hea = directory / f"{rec}.hea"
        if not hea.exists():
            continue
        hdr = read_header(hea)
        try:
            idx = hdr.lead_index(lead)
        except KeyError:
            idx = 0
        out.append((rec, read_record(hea, idx), labels[rec]))
    return out


def find_records(directory) -> list:
    """Header files in ``directory`` (sorted)."""
    return sorted(Path(directory).glob("*.hea"))


def env_data_dir(name: str):
    """Dataset directory from ``$SQIKIT_DATA/<name>``, or None if absent."""
    root = os.environ.get("SQIKIT_DATA")
    if not root:
        return None
    p = Path(root) / name
    return p if p.is_dir() else None
