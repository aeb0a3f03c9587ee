"""1-D convolutional denoising autoencoder, written directly in numpy.

The encoder is a stack of stride-2 convolutions (1 -> 16 -> 32 -> 64
channels, kernel 13) and the decoder mirrors it with transposed
convolutions back to one channel. Hidden layers use ELU; the output layer
is linear. Activations are kept channels-last, shape ``(batch, length,
channels)``, and every kernel is stored as ``(kernel, in_ch, out_ch)``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace

import numpy as np

from ..serialize import decode_array, dumps, encode_array, loads
from ..signal_core import Signal, SignalError

WINDOW = 512
HOP = WINDOW // 2


@dataclass(frozen=True)
class LayerSpec:
    kind: str  # "conv" or "convT"
    in_ch: int
    out_ch: int
    kernel: int
    stride: int
    padding: int
    output_padding: int = 0
    activation: str = "elu"  # or "linear"

    def out_len(self, n: int) -> int:
        if self.kind == "conv":
            return (n + 2 * self.padding - self.kernel) // self.stride + 1
        return (n - 1) * self.stride - 2 * self.padding + self.kernel + self.output_padding


@dataclass
class AeConfig:
    channels: tuple = (16, 32, 64)
    kernel: int = 13
    epochs: int = 20
    lr: float = 1e-3
    momentum: float = 0.9
    batch_size: int = 32
    seed: int = 0
    clip_norm: float = 5.0


@dataclass
class AeModel:
    layers: tuple
    weights: list  # [(W, b), ...]
    input_len: int = WINDOW
    seed: int = 0
    training_meta: dict = None
    loss_curve: list = field(default_factory=list)

    @property
    def trained(self) -> bool:
        return self.training_meta is not None


def architecture(channels=(16, 32, 64), kernel: int = 13) -> tuple:
    pad = kernel // 2
    chans = (1, *channels)
    enc = [LayerSpec("conv", chans[i], chans[i + 1], kernel, 2, pad) for i in range(len(channels))]
    dec = []
    rev = chans[::-1]
    for i in range(len(channels)):
        last = i == len(channels) - 1
        dec.append(LayerSpec("convT", rev[i], rev[i + 1], kernel, 2, pad, 1, "linear" if last else "elu"))
    return tuple(enc + dec)


def init_model(layers, seed: int = 0, input_len: int = WINDOW, dtype=np.float32) -> AeModel:
    rng = np.random.default_rng(seed)
    n = input_len
    for spec in layers:
        n = spec.out_len(n)
    if n != input_len:
        raise ValueError(f"architecture maps {input_len} samples to {n}")
    weights = []
    for spec in layers:
        fan_in = spec.in_ch * spec.kernel / (spec.stride if spec.kind == "convT" else 1)
        gain = np.sqrt(2.0) if spec.activation == "elu" else 1.0
        w = rng.standard_normal((spec.kernel, spec.in_ch, spec.out_ch)) * (gain / np.sqrt(fan_in))
        weights.append((w.astype(dtype), np.zeros(spec.out_ch, dtype=dtype)))
    return AeModel(tuple(layers), weights, input_len, seed)


# ---------------------------------------------------------------------------
# layers
# ---------------------------------------------------------------------------


def _conv_forward(spec, w, b, x):
    bsz, n, c = x.shape
    k, s, p = spec.kernel, spec.stride, spec.padding
    n_out = spec.out_len(n)
    xp = np.pad(x, ((0, 0), (p, p), (0, 0)))
    idx = s * np.arange(n_out)[:, None] + np.arange(k)[None, :]
    cols = xp[:, idx, :].reshape(bsz * n_out, k * c)
    z = (cols @ w.reshape(k * c, -1)).reshape(bsz, n_out, -1) + b
    return z, (cols, n)


def _conv_backward(spec, w, cache, dz):
    cols, n = cache
    bsz, n_out, o = dz.shape
    k, s, p = spec.kernel, spec.stride, spec.padding
    c = w.shape[1]
    dzm = dz.reshape(bsz * n_out, o)
    dw = (cols.T @ dzm).reshape(w.shape)
    db = dz.sum(axis=(0, 1))
    dcols = (dzm @ w.reshape(k * c, o).T).reshape(bsz, n_out, k, c)
    dxp = np.zeros((bsz, n + 2 * p, c), dtype=dz.dtype)
    span = s * (n_out - 1) + 1
    for j in range(k):
        dxp[:, j : j + span : s, :] += dcols[:, :, j, :]
    return dxp[:, p : p + n, :], dw, db


def _convT_forward(spec, w, b, x):
    bsz, n, c = x.shape
    k, s, p = spec.kernel, spec.stride, spec.padding
    o = w.shape[2]
    n_out = spec.out_len(n)
    prod = (x.reshape(bsz * n, c) @ w.transpose(1, 0, 2).reshape(c, k * o)).reshape(bsz, n, k, o)
    full = np.zeros((bsz, (n - 1) * s + k, o), dtype=prod.dtype)
    span = s * (n - 1) + 1
    for j in range(k):
        full[:, j : j + span : s, :] += prod[:, :, j, :]
    z = full[:, p : p + n_out, :] + b
    return z, (x, n)


def _convT_backward(spec, w, cache, dz):
    x, n = cache
    bsz, n_out, o = dz.shape
    k, s, p = spec.kernel, spec.stride, spec.padding
    c = w.shape[1]
    full = np.zeros((bsz, (n - 1) * s + k, o), dtype=dz.dtype)
    full[:, p : p + n_out, :] = dz
    idx = s * np.arange(n)[:, None] + np.arange(k)[None, :]
    dprod = full[:, idx, :].reshape(bsz * n, k * o)
    wt = w.transpose(1, 0, 2).reshape(c, k * o)
    dx = (dprod @ wt.T).reshape(bsz, n, c)
    dw = (x.reshape(bsz * n, c).T @ dprod).reshape(c, k, o).transpose(1, 0, 2)
    db = dz.sum(axis=(0, 1))
    return dx, dw, db


def _elu(z):
    return np.where(z > 0, z, np.expm1(np.minimum(z, 0)))


def forward(model: AeModel, x, keep_cache: bool = False):
    """Run the network on ``x`` of shape ``(batch, length)``."""
    a = np.asarray(x)[:, :, None]
    caches = []
    for spec, (w, b) in zip(model.layers, model.weights):
        if spec.kind == "conv":
            z, cache = _conv_forward(spec, w, b, a)
        else:
            z, cache = _convT_forward(spec, w, b, a)
        a = _elu(z) if spec.activation == "elu" else z
        if keep_cache:
            caches.append((cache, z))
    out = a[:, :, 0]
    return (out, caches) if keep_cache else out


def loss_and_grads(model: AeModel, noisy, clean):
    """Mean squared error over all samples and its parameter gradients."""
    y, caches = forward(model, noisy, keep_cache=True)
    diff = y - clean
    loss = float(np.mean(diff * diff))
    da = (2.0 / diff.size) * diff[:, :, None]
    grads = [None] * len(model.layers)
    for i in range(len(model.layers) - 1, -1, -1):
        spec = model.layers[i]
        w, _ = model.weights[i]
        cache, z = caches[i]
        dz = da * np.where(z > 0, 1.0, np.exp(np.minimum(z, 0))).astype(da.dtype) if spec.activation == "elu" else da
        if spec.kind == "conv":
            da, dw, db = _conv_backward(spec, w, cache, dz)
        else:
            da, dw, db = _convT_backward(spec, w, cache, dz)
        grads[i] = (dw, db)
    return loss, grads


# ---------------------------------------------------------------------------
# training and inference
# ---------------------------------------------------------------------------


def _stack_pairs(pairs):
    noisy, clean = zip(*pairs) if pairs else ((), ())
    lengths = {len(a) for a in noisy} | {len(a) for a in clean}
    if not pairs:
        raise SignalError("no training pairs")
    if lengths != {WINDOW}:
        raise SignalError(f"all windows must be {WINDOW} samples, got lengths {sorted(lengths)}")
    return np.asarray(noisy, dtype=np.float32), np.asarray(clean, dtype=np.float32)


def ae_train(pairs, config: AeConfig = None, log=None) -> AeModel:
    """Fit the autoencoder with mini-batch SGD + momentum on MSE.

    ``pairs`` is a sequence of ``(noisy, clean)`` windows of 512 samples,
    already z-normalised. Training is single-threaded numpy and fully
    determined by ``config.seed``.
    """
    cfg = config or AeConfig()
    noisy, clean = _stack_pairs(pairs)
    model = init_model(architecture(cfg.channels, cfg.kernel), cfg.seed)
    rng = np.random.default_rng(cfg.seed + 1)
    velocity = [(np.zeros_like(w), np.zeros_like(b)) for w, b in model.weights]
    lr = np.float32(cfg.lr)
    mom = np.float32(cfg.momentum)
    curve = []
    n = noisy.shape[0]
    for epoch in range(cfg.epochs):
        order = rng.permutation(n)
        total = 0.0
        for start in range(0, n, cfg.batch_size):
            sel = order[start : start + cfg.batch_size]
            loss, grads = loss_and_grads(model, noisy[sel], clean[sel])
            total += loss * sel.size
            norm = np.sqrt(sum(float(np.sum(g * g)) for pair in grads for g in pair))
            scale = np.float32(min(1.0, cfg.clip_norm / norm)) if norm > 0 else np.float32(1.0)
            new_w, new_v = [], []
            for (w, b), (dw, db), (vw, vb) in zip(model.weights, grads, velocity):
                vw = mom * vw - lr * scale * dw.astype(np.float32)
                vb = mom * vb - lr * scale * db.astype(np.float32)
                new_w.append((w + vw, b + vb))
                new_v.append((vw, vb))
            model.weights, velocity = new_w, new_v
        curve.append(total / n)
        if log:
            log(f"epoch {epoch + 1}/{cfg.epochs} loss {curve[-1]:.6f}")
    for w, b in model.weights:
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
            raise FloatingPointError("training diverged (non-finite weights)")
    model.loss_curve = curve
    model.training_meta = {
        "epochs": cfg.epochs,
        "learning_rate": cfg.lr,
        "momentum": cfg.momentum,
        "batch_size": cfg.batch_size,
        "final_loss": curve[-1] if curve else None,
    }
    return model


def _window_weights():
    i = np.arange(WINDOW)
    return 1.0 - np.abs(i - (WINDOW - 1) / 2.0) / (WINDOW / 2.0)


def ae_denoise(model: AeModel, signal: Signal) -> Signal:
    """Denoise a signal of any length with overlapping 512-sample windows.

    The signal is z-normalised, cut into windows with 50% overlap (the last
    one flush with the end), passed through the network and recombined with
    triangular weights. Inputs shorter than one window are reflect-padded.
    """
    if not model.trained:
        raise SignalError("model is untrained")
    x = signal.samples
    n = x.size
    mu = float(x.mean())
    sd = float(x.std())
    if sd == 0:
        return signal.with_samples(x.copy())
    z = (x - mu) / sd
    if n < WINDOW:
        mode = "reflect" if n > 1 else "edge"
        padded = np.pad(z, (0, WINDOW - n), mode=mode)
        y = forward(model, padded[None, :].astype(np.float32))[0, :n]
        return signal.with_samples(y.astype(float) * sd + mu)
    starts = list(range(0, n - WINDOW + 1, HOP))
    if starts[-1] != n - WINDOW:
        starts.append(n - WINDOW)
    batch = np.stack([z[s : s + WINDOW] for s in starts]).astype(np.float32)
    out = forward(model, batch).astype(float)
    wt = _window_weights()
    acc = np.zeros(n)
    norm = np.zeros(n)
    for s, y in zip(starts, out):
        acc[s : s + WINDOW] += wt * y
        norm[s : s + WINDOW] += wt
    return signal.with_samples(acc / norm * sd + mu)


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------


def model_to_text(model: AeModel) -> str:
    meta = {
        "layers": [asdict(spec) for spec in model.layers],
        "input_len": model.input_len,
        "seed": model.seed,
        "training_meta": model.training_meta,
        "loss_curve": [float(v) for v in model.loss_curve],
    }
    arrays = {}
    for i, (w, b) in enumerate(model.weights):
        arrays[f"layer{i}.weight"] = encode_array(w, "<f4")
        arrays[f"layer{i}.bias"] = encode_array(b, "<f4")
    return dumps("autoencoder", meta, arrays)


def model_from_text(text: str) -> AeModel:
    meta, arrays = loads(text, "autoencoder")
    layers = tuple(LayerSpec(**spec) for spec in meta["layers"])
    weights = []
    for i, spec in enumerate(layers):
        w = decode_array(arrays[f"layer{i}.weight"])
        b = decode_array(arrays[f"layer{i}.bias"])
        if w.shape != (spec.kernel, spec.in_ch, spec.out_ch) or b.shape != (spec.out_ch,):
            raise ValueError(f"layer {i} weight shape does not match its descriptor")
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
            raise ValueError(f"layer {i} has non-finite weights")
        weights.append((w, b))
    return AeModel(layers, weights, meta["input_len"], meta["seed"],
                   meta["training_meta"], list(meta.get("loss_curve", [])))


def save_model(model: AeModel, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(model_to_text(model))


def load_model(path) -> AeModel:
    with open(path, encoding="ascii") as fh:
        return model_from_text(fh.read())


def with_dtype(model: AeModel, dtype) -> AeModel:
    """Copy of ``model`` with parameters cast to ``dtype`` (for gradient checks)."""
    return replace(model, weights=[(w.astype(dtype), b.astype(dtype)) for w, b in model.weights])
