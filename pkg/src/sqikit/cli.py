"""Command-line entry point: ``sqikit <command> [options]``.

Exit codes: 0 success, 1 computation failure, 2 configuration or input error.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from . import dataio, sqi
from .classify import ForestConfig, cross_validate, holdout_validate
from .denoise import autoencoder as ae
from .denoise.emd import emd_denoise
from .denoise.wavelet import wavelet_denoise
from .outlier import (
    ALGOS,
    AeOutlierConfig,
    ae_outlier_scores,
    evaluate_outliers,
    iforest_fit,
    iforest_scores,
    knn_scores,
    standardize,
    threshold_by_contamination,
)
from .signal_core import Signal, SignalError, split_windows
from .synthetic import labelled_windows, synthetic_ecg

COMMANDS = ("featurize", "q1-benchmark", "q2-outliers", "q3-denoise", "denoise",
            "inject-noise", "train-ae", "outlier-score")
DENOISERS = ("wavelet", "emd", "ae")
BENCH_METHODS = ("li2007", "clifford2012", "behar2013", "li2014", "geometric",
                 "averageqrs", "zhao2018", "orphanidou2015", "all")


class ConfigError(Exception):
    """Bad configuration or unusable input (exit code 2)."""


@dataclass
class RunConfig:
    command: str = ""
    input: str = None
    output: str = None
    method: str = None
    noise: str = "gn"
    snr: float = 6.0
    model: str = None
    seed: int = 0
    folds: int = 5
    holdout: float = None  # test fraction; replaces k-fold CV in q1 when set
    contamination: float = None
    synthetic: bool = False
    algo: str = "iforest"
    window_s: float = 10.0
    lead: str = "II"
    n_records: int = 60
    n_jobs: int = 1
    noise_dir: str = None
    checksums: str = None  # sha256sum-style file; names resolve against its directory
    # random forest
    n_trees: int = 200
    # outlier scorers
    k: int = 5
    iforest_trees: int = 100
    subsample: int = 256
    ae_outlier_epochs: int = 100
    ae_outlier_lr: float = 1e-3
    # denoising autoencoder
    epochs: int = 20
    lr: float = 1e-3
    momentum: float = 0.9
    batch_size: int = 32
    q3_seconds: float = 300.0
    zhao: dict = field(default_factory=dict)


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}
_ZHAO_KEYS = {f.name for f in fields(sqi.ZhaoThresholds)}


def _coerce(key, raw):
    typ = _FIELD_TYPES[key]
    try:
        if typ == "bool":
            low = str(raw).strip().lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if typ == "int":
            return int(raw)
        if typ == "float":
            return float(raw)
    except ValueError:
        raise ConfigError(f"config key {key!r}: cannot parse {raw!r} as {typ}") from None
    return str(raw)


def read_config_file(path) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment; unknown keys are errors."""
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {path}")
    out, zhao = {}, {}
    for n, raw in enumerate(p.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key.startswith("zhao_") and key[5:] in _ZHAO_KEYS:
            zhao[key[5:]] = value
        elif key in _FIELD_TYPES and key not in ("command", "zhao"):
            out[key] = _coerce(key, value)
        else:
            raise ConfigError(f"{path}:{n}: unknown config key {key!r}")
    if zhao:
        out["zhao"] = zhao
    return out


def build_config(args) -> RunConfig:
    values = read_config_file(args.config) if args.config else {}
    for key in ("input", "output", "method", "noise", "snr", "model", "seed", "folds",
                "contamination", "algo"):
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    if getattr(args, "synthetic", False):
        values["synthetic"] = True
    cfg = RunConfig(command=args.command, **values)
    validate(cfg)
    return cfg


def validate(cfg: RunConfig) -> None:
    if cfg.method is not None:
        allowed = DENOISERS if cfg.command == "denoise" else sqi.METHODS
        if cfg.method not in allowed:
            raise ConfigError(f"unknown method {cfg.method!r} (choose from {', '.join(allowed)})")
    if cfg.algo not in ALGOS:
        raise ConfigError(f"unknown algorithm {cfg.algo!r} (choose from {', '.join(ALGOS)})")
    if cfg.noise not in dataio.NOISE_KINDS:
        raise ConfigError(f"unknown noise kind {cfg.noise!r}")
    if not np.isfinite(cfg.snr):
        raise ConfigError("snr must be finite")
    if cfg.contamination is not None and not 0 < cfg.contamination < 1:
        raise ConfigError("contamination must lie in (0, 1)")
    if cfg.folds < 2:
        raise ConfigError("folds must be >= 2")
    if cfg.holdout is not None and not 0 < cfg.holdout < 1:
        raise ConfigError("holdout must lie in (0, 1)")
    for key in ("n_trees", "iforest_trees", "subsample", "k", "epochs", "batch_size",
                "n_records", "n_jobs", "ae_outlier_epochs"):
        if getattr(cfg, key) < 1:
            raise ConfigError(f"{key} must be >= 1")
    if cfg.window_s <= 0 or cfg.q3_seconds <= 0:
        raise ConfigError("durations must be positive")
    try:
        sqi.ZhaoThresholds.from_mapping(cfg.zhao)
    except (KeyError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _say(msg=""):
    print(msg, flush=True)


def format_table(headers, rows) -> str:
    cells = [list(map(str, headers))] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def write_csv(path, headers, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(headers)
        w.writerows(rows)


def _need_input(cfg, what="input"):
    if not cfg.input:
        raise ConfigError(f"--input is required (or --synthetic) for {cfg.command}")
    p = Path(cfg.input)
    if not p.exists():
        raise ConfigError(f"{what} not found: {cfg.input}")
    return p


def verify_dataset(cfg) -> None:
    """Check the files listed in ``cfg.checksums`` before any data are read."""
    if not cfg.checksums:
        return
    p = Path(cfg.checksums)
    if not p.is_file():
        raise ConfigError(f"checksum file not found: {p}")
    bad = dataio.verify_checksums(p.parent, dataio.read_checksum_file(p))
    if bad:
        raise ConfigError(f"checksum mismatch or missing file: {', '.join(bad)}")


def load_signal(path, lead="II") -> Signal:
    path = Path(path)
    if path.suffix == ".hea":
        hdr = dataio.read_header(path)
        try:
            idx = hdr.lead_index(lead)
        except KeyError:
            idx = 0
        return dataio.read_record(path, idx)
    if path.suffix == ".csv":
        return dataio.read_signal_csv(path)
    raise ConfigError(f"unsupported signal file {path} (expected .hea or .csv)")


def _labels_for(directory: Path) -> dict:
    labels = {}
    for name, lab in (("RECORDS-acceptable", 0), ("RECORDS-unacceptable", 1)):
        f = directory / name
        if f.exists():
            for rec in f.read_text().split():
                labels[rec] = lab
    return labels


def collect_records(cfg):
    """List of (record_id, Signal, label-or-None) from --input or the generator."""
    if cfg.synthetic:
        return [(rid, s, lab) for rid, s, lab in
                labelled_windows(cfg.n_records, 0.3, 10.0, 500.0, cfg.seed)]
    p = _need_input(cfg)
    if p.is_file():
        return [(p.stem, load_signal(p, cfg.lead), None)]
    files = sorted(list(p.glob("*.hea")) + list(p.glob("*.csv")))
    if not files:
        raise ConfigError(f"no records found in {p}")
    labels = _labels_for(p)
    return [(f.stem, load_signal(f, cfg.lead), labels.get(f.stem)) for f in files]


def _windows(records, window_s):
    for rid, sig, lab in records:
        n = int(round(window_s * sig.fs))
        if len(sig) < n:
            # a short record forms a single window
            yield rid, 0.0, sig, lab
            continue
        for k, w in enumerate(split_windows(sig, n)):
            yield rid, k * window_s, w, lab


def _zhao(cfg):
    return sqi.ZhaoThresholds.from_mapping(cfg.zhao)


def featurize_records(cfg, records, method):
    items = list(_windows(records, cfg.window_s))
    fvs = sqi.featurize_many([w for _, _, w, _ in items], method, cfg.n_jobs, _zhao(cfg))
    rows = []
    for (rid, start, _, lab), fv in zip(items, fvs):
        rows.append({"record_id": rid, "window_start_s": start, "method": method,
                     "features": fv.values, "label": lab})
    return rows


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_featurize(cfg):
    method = cfg.method or "all"
    records = collect_records(cfg)
    rows = featurize_records(cfg, records, method)
    names = list(sqi.METHOD_FEATURES[method])
    with_label = bool(rows) and all(r["label"] is not None for r in rows)
    out = cfg.output or "features.csv"
    dataio.write_feature_csv(out, rows, names, with_label)
    _say(f"wrote {len(rows)} rows x {len(names)} features to {out}")
    return 0


def _full_feature_table(cfg, records):
    """Feature matrix holding every method's columns (computed once per window)."""
    items = list(_windows(records, cfg.window_s))
    if any(lab is None for *_, lab in items):
        raise ConfigError("labels missing: need RECORDS-acceptable / RECORDS-unacceptable lists")
    sigs = [w for _, _, w, _ in items]
    full = sqi.featurize_many(sigs, "all", cfg.n_jobs, _zhao(cfg))
    zhao = sqi.featurize_many(sigs, "zhao2018", cfg.n_jobs, _zhao(cfg))
    table = []
    for a, z in zip(full, zhao):
        row = dict(a.values)
        row["samp_en"] = row["ent_sqi"]
        row.update(z.values)
        table.append(row)
    groups = np.array([rid for rid, *_ in items])
    labels = np.array([lab for *_, lab in items], dtype=int)
    return table, labels, groups


def cmd_q1_benchmark(cfg):
    if cfg.synthetic:
        records = collect_records(cfg)
    else:
        p = _need_input(cfg)
        records = dataio.load_picc_set_a(p, cfg.lead)
        if not records:
            raise ConfigError(f"no labelled records found in {p}")
    table, labels, groups = _full_feature_table(cfg, records)
    methods = (cfg.method,) if cfg.method else BENCH_METHODS
    results = []
    fc = ForestConfig(n_trees=cfg.n_trees, seed=cfg.seed)
    for m in methods:
        names = sqi.METHOD_FEATURES[m]
        x = np.array([[row[n] for n in names] for row in table])
        if cfg.holdout is not None:
            h = holdout_validate(x, labels, groups, fc, cfg.holdout, cfg.seed)
            r = {"auc_mean": h["auc"], "auc_std": 0.0, "acc_mean": h["accuracy"], "acc_std": 0.0}
        else:
            r = cross_validate(x, labels, groups, fc, cfg.folds, cfg.seed)
        results.append((m, r))
    best = max(results, key=lambda mr: (mr[1]["acc_mean"], mr[1]["auc_mean"]))[0]
    headers = ["method", "auc_mean", "auc_std", "acc_mean", "acc_std", "best"]
    rows = [[m, f"{r['auc_mean']:.3f}", f"{r['auc_std']:.3f}", f"{r['acc_mean']:.3f}",
             f"{r['acc_std']:.3f}", "*" if m == best else ""] for m, r in results]
    _say(format_table(headers, rows))
    if cfg.output:
        write_csv(cfg.output, headers, rows)
    return 0


def planted_outlier_features(n=1000, d=22, fraction=0.05, seed=0):
    rng = np.random.default_rng(seed)
    n_out = int(round(fraction * n))
    x = rng.standard_normal((n, d))
    y = np.zeros(n, dtype=int)
    idx = rng.choice(n, n_out, replace=False)
    direction = rng.standard_normal((n_out, d))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    x[idx] += 8.0 * direction
    y[idx] = 1
    return x, y


def score_all(cfg, x):
    """Scores of each algorithm on the (standardized) feature matrix."""
    out = {}
    # the matrix is scored against itself; skip each row's own zero distance
    out["knn"] = knn_scores(x, x, min(cfg.k + 1, x.shape[0]))
    model = iforest_fit(x, cfg.iforest_trees, cfg.subsample, cfg.seed)
    out["iforest"] = iforest_scores(model, x)
    out["ae"] = ae_outlier_scores(x, AeOutlierConfig(epochs=cfg.ae_outlier_epochs,
                                                     lr=cfg.ae_outlier_lr, seed=cfg.seed))
    return out


def cmd_q2_outliers(cfg):
    if cfg.synthetic:
        x, y = planted_outlier_features(seed=cfg.seed)
    else:
        p = _need_input(cfg)
        if p.is_file() and p.suffix == ".csv":
            _, _, _, x, y = dataio.read_feature_csv(p)
            if y is None:
                raise ConfigError("feature CSV has no label column")
        else:
            records = dataio.load_picc_set_a(p, cfg.lead)
            if not records:
                raise ConfigError(f"no labelled records found in {p}")
            method = cfg.method or "all"
            rows = featurize_records(cfg, records, method)
            names = sqi.METHOD_FEATURES[method]
            x = np.array([[r["features"][n] for n in names] for r in rows])
            y = np.array([r["label"] for r in rows], dtype=int)
    x = standardize(x)
    contamination = cfg.contamination if cfg.contamination is not None else float(np.mean(y))
    scores = score_all(cfg, x)
    headers = ["algo", "auc", "accuracy", "threshold"]
    rows = []
    for algo in ("knn", "iforest", "ae"):
        th = threshold_by_contamination(scores[algo], contamination)
        ev = evaluate_outliers(th, y)
        rows.append([algo, f"{ev['auc']:.3f}", f"{ev['accuracy']:.3f}", f"{th.threshold:.6g}"])
    _say(format_table(headers, rows))
    if cfg.output:
        write_csv(cfg.output, headers, rows)
    return 0


def _ae_config(cfg):
    return ae.AeConfig(epochs=cfg.epochs, lr=cfg.lr, momentum=cfg.momentum,
                       batch_size=cfg.batch_size, seed=cfg.seed)


def synthetic_q3_records(seconds: float, seed: int, fs: float = 360.0) -> dict:
    rng = np.random.default_rng(seed)
    out = {}
    for name in ("syn118", "syn119"):
        sig, _ = synthetic_ecg(seconds, fs, rng.uniform(60, 90), jitter=0.04,
                               seed=int(rng.integers(1 << 31)))
        out[name] = sig
    return out


def load_q3_inputs(cfg):
    if cfg.synthetic:
        return synthetic_q3_records(cfg.q3_seconds, cfg.seed), None, ("gn",)
    p = _need_input(cfg)
    clean = {}
    for rec in ("118", "119"):
        hea = p / f"{rec}.hea"
        if not hea.exists():
            raise ConfigError(f"missing clean record {hea}")
        clean[rec] = dataio.read_record(hea, 0)
    noise_dir = Path(cfg.noise_dir) if cfg.noise_dir else p
    noise = {}
    for kind in ("em", "ma", "bw"):
        hea = noise_dir / f"{kind}.hea"
        if not hea.exists():
            raise ConfigError(f"missing noise record {hea}")
        noise[kind] = dataio.read_record(hea, 0)
    return clean, noise, dataio.NOISE_KINDS


def evaluate_denoisers(model, corpus, fs):
    """Per (kind, level) mean squared error of each denoiser on test windows."""
    cells = {}
    for meta, (noisy, clean) in zip(corpus.test_meta, corpus.test):
        cells.setdefault((meta.kind, meta.snr_db), []).append((noisy, clean))
    rows = []
    for (kind, level) in sorted(cells, key=lambda c: (dataio.NOISE_KINDS.index(c[0]), c[1])):
        pairs = cells[(kind, level)]
        noisy = np.stack([p[0] for p in pairs])
        clean = np.stack([p[1] for p in pairs])
        den_ae = ae.forward(model, noisy.astype(np.float32)).astype(float)
        den_wt = np.stack([wavelet_denoise(Signal(x, fs)).samples for x in noisy])
        den_emd = np.stack([emd_denoise(Signal(x, fs)).samples for x in noisy])
        mse = {
            "noisy": float(np.mean((noisy - clean) ** 2)),
            "wavelet": float(np.mean((den_wt - clean) ** 2)),
            "emd": float(np.mean((den_emd - clean) ** 2)),
            "ae": float(np.mean((den_ae - clean) ** 2)),
        }
        winner = min(("wavelet", "emd", "ae"), key=lambda k: mse[k])
        rows.append((kind, level, len(pairs), mse, winner))
    return rows


def cmd_q3_denoise(cfg):
    clean, noise, kinds = load_q3_inputs(cfg)
    fs = next(iter(clean.values())).fs
    corpus = dataio.build_q3_corpus(clean, noise, kinds, dataio.Q3_LEVELS, cfg.seed, cfg.n_jobs)
    _say(f"corpus: {len(corpus.train)} train / {len(corpus.test)} test windows, "
         f"manifest sha256 {corpus.manifest_hash()}")
    model = ae.ae_train(corpus.train, _ae_config(cfg))
    if cfg.model:
        ae.save_model(model, cfg.model)
    rows = evaluate_denoisers(model, corpus, fs)
    headers = ["noise", "snr_db", "windows", "mse_noisy", "mse_wavelet", "mse_emd", "mse_ae", "winner"]
    table = [[k, f"{lv:g}", n, f"{m['noisy']:.4f}", f"{m['wavelet']:.4f}", f"{m['emd']:.4f}",
              f"{m['ae']:.4f}", w] for k, lv, n, m, w in rows]
    _say(format_table(headers, table))
    if cfg.output:
        write_csv(cfg.output, headers, table)
        Path(cfg.output).with_suffix(".manifest.tsv").write_text(corpus.manifest(), encoding="utf-8")
    return 0


def cmd_denoise(cfg):
    method = cfg.method or "wavelet"
    if method == "ae":
        if not cfg.model or not Path(cfg.model).is_file():
            raise ConfigError("method ae needs --model pointing to a trained model file")
        try:
            model = ae.load_model(cfg.model)
        except ValueError as exc:
            raise ConfigError(f"cannot load model: {exc}") from None
    sig = load_signal(_need_input(cfg), cfg.lead)
    if method == "wavelet":
        out = wavelet_denoise(sig)
    elif method == "emd":
        out = emd_denoise(sig)
    else:
        out = ae.ae_denoise(model, sig)
    dest = cfg.output or "denoised.csv"
    dataio.write_signal_csv(dest, sig, {"denoised": out.samples})
    _say(f"wrote {len(out)} samples to {dest}")
    return 0


def cmd_inject_noise(cfg):
    sig = load_signal(_need_input(cfg), cfg.lead)
    records = {}
    if cfg.noise in ("em", "ma", "bw", "all"):
        if not cfg.noise_dir:
            raise ConfigError(f"noise {cfg.noise!r} needs noise_dir with em/ma/bw records")
        for kind in ("em", "ma", "bw"):
            hea = Path(cfg.noise_dir) / f"{kind}.hea"
            if not hea.exists():
                raise ConfigError(f"missing noise record {hea}")
            records[kind] = dataio.read_record(hea, 0)
    noise = dataio.make_noise(cfg.noise, len(sig), records, cfg.seed)
    noisy = dataio.mix_at_snr(sig, Signal(noise, sig.fs), cfg.snr, cfg.seed)
    dest = cfg.output or "noisy.csv"
    dataio.write_signal_csv(dest, noisy, {"clean": sig.samples})
    _say(f"achieved SNR {dataio.achieved_snr(sig, noisy):.4f} dB; wrote {dest}")
    return 0


def cmd_train_ae(cfg):
    clean, noise, kinds = load_q3_inputs(cfg)
    corpus = dataio.build_q3_corpus(clean, noise, kinds, dataio.Q3_LEVELS, cfg.seed, cfg.n_jobs)
    model = ae.ae_train(corpus.train, _ae_config(cfg), log=_say)
    dest = cfg.model or cfg.output or "ae_model.json"
    ae.save_model(model, dest)
    _say(f"saved model to {dest}")
    return 0


def cmd_outlier_score(cfg):
    p = _need_input(cfg)
    try:
        ids, starts, _, x, _ = dataio.read_feature_csv(p)
    except (ValueError, StopIteration) as exc:
        raise ConfigError(str(exc)) from None
    if x.shape[0] < 2:
        raise ConfigError("need at least two feature rows")
    x = standardize(x)
    if cfg.algo == "knn":
        scores = knn_scores(x, x, min(cfg.k + 1, x.shape[0]))
    elif cfg.algo == "iforest":
        scores = iforest_scores(iforest_fit(x, cfg.iforest_trees, cfg.subsample, cfg.seed), x)
    else:
        scores = ae_outlier_scores(x, AeOutlierConfig(epochs=cfg.ae_outlier_epochs,
                                                      lr=cfg.ae_outlier_lr, seed=cfg.seed))
    th = threshold_by_contamination(scores, cfg.contamination if cfg.contamination is not None else 0.1)
    dest = cfg.output or "scores.csv"
    rows = [[rid, repr(float(st)), repr(float(s)), int(f)]
            for rid, st, s, f in zip(ids, starts, th.scores, th.labels_pred)]
    write_csv(dest, ["record_id", "window_start_s", "score", "flagged"], rows)
    _say(f"flagged {int(th.labels_pred.sum())} of {len(rows)} windows; wrote {dest}")
    return 0


HANDLERS = {
    "featurize": cmd_featurize,
    "q1-benchmark": cmd_q1_benchmark,
    "q2-outliers": cmd_q2_outliers,
    "q3-denoise": cmd_q3_denoise,
    "denoise": cmd_denoise,
    "inject-noise": cmd_inject_noise,
    "train-ae": cmd_train_ae,
    "outlier-score": cmd_outlier_score,
}


COMMAND_HELP = {
    "featurize": "compute SQI features per window and write a feature CSV",
    "q1-benchmark": "grouped CV of a random forest on each SQI method",
    "q2-outliers": "kNN, isolation forest and AE outlier scores vs labels",
    "q3-denoise": "MSE matrix of wavelet, EMD and AE denoisers per noise kind and SNR",
    "denoise": "denoise one record or signal CSV",
    "inject-noise": "add noise to one record at a target SNR",
    "train-ae": "train the denoising autoencoder on the noise-injection corpus",
    "outlier-score": "score the rows of a feature CSV with one outlier algorithm",
}


def build_parser():
    parser = argparse.ArgumentParser(prog="sqikit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=COMMAND_HELP[name], description=COMMAND_HELP[name])
        p.add_argument("--input", help="record directory, .hea file or CSV")
        p.add_argument("--output", help="output file")
        p.add_argument("--method", help="SQI method id, or denoiser (wavelet, emd, ae)")
        p.add_argument("--noise", help="noise kind: em, ma, bw, gn or all")
        p.add_argument("--snr", type=float, help="target SNR in dB")
        p.add_argument("--model", help="autoencoder model file")
        p.add_argument("--seed", type=int)
        p.add_argument("--folds", type=int, help="cross-validation folds")
        p.add_argument("--contamination", type=float, help="expected outlier fraction in (0, 1)")
        p.add_argument("--algo", help="outlier algorithm: knn, iforest or ae")
        p.add_argument("--synthetic", action="store_true", help="use generated data instead of --input")
        p.add_argument("--config", help="key = value config file; flags override it")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = build_config(args)
        verify_dataset(cfg)
        return HANDLERS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (FileNotFoundError, dataio.RecordFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SignalError, ValueError, FloatingPointError, ArithmeticError) as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
