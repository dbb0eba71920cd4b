"""A small numpy MLP with label-vector output heads.

The trunk is ``F -> h -> h`` with ReLU activations. The output head is one
of:

``fc``
    ``h -> L`` logits, trained with sigmoid cross-entropy averaged over
    the ``L`` labels.
``hrr``
    ``h -> d`` real label vector, trained with the cosine retrieval loss.
``chrr``
    ``h -> 2d`` raw outputs read as ``d`` Cartesian pairs
    ``(raw[2i], raw[2i+1])``; each pair becomes one angle via atan2.
``chrr-half``
    the second hidden layer is split in two halves of ``h/2`` units; the
    first half feeds ``d`` x-coordinates and the second ``d``
    y-coordinates, so the head has ``h*d`` weights like ``hrr``.
``chrr-sin`` / ``chrr-tanh``
    ``h -> d`` raw outputs mapped to angles by ``pi*sin`` or ``pi*tanh``.

Label-vector heads are scored by decoding the output with the codebook's
concept vector and summing ``1 - sim(decoded, c_p)`` over the true labels
``p``. Batch losses and gradients are means over examples.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from . import chrr, codec, hrr
from .codec import Algebra, Codebook
from .errors import DimensionError, TrainingDivergedError

HEADS = ("fc", "hrr", "chrr", "chrr-half", "chrr-sin", "chrr-tanh")
#: Guard added under the square root of every Cartesian-pair and HRR norm.
EPS = 1e-12


def head_algebra(head: str) -> Algebra | None:
    if head == "fc":
        return None
    return Algebra.HRR if head == "hrr" else Algebra.CHRR


@dataclass(frozen=True)
class TrainConfig:
    lr: float = 1.0
    batch_size: int = 64
    epochs: int = 100
    seed: int = 0
    normalize_features: bool = False

    def __post_init__(self):
        if self.lr < 0 or self.batch_size < 1 or self.epochs < 0:
            raise ValueError("batch size must be positive; learning rate and epochs "
                             "must be non-negative")


def param_shapes(head: str, F: int, h: int, d: int) -> dict:
    """Parameter shapes in checkpoint order; ``d`` is ``L`` for the fc head."""
    shapes = {"W1": (F, h), "b1": (h,), "W2": (h, h), "b2": (h,)}
    if head == "chrr-half":
        shapes.update({"W3x": (h // 2, d), "b3x": (d,), "W3y": (h // 2, d), "b3y": (d,)})
    else:
        out = 2 * d if head == "chrr" else d
        shapes.update({"W3": (h, out), "b3": (out,)})
    return shapes


class MlpModel:
    """Weights of the network plus, for label-vector heads, its codebook.

    The codebook is regenerated from ``(algebra, dim, n_labels, seed)``
    rather than stored.
    """

    def __init__(self, head: str, n_features: int, hidden: int, n_labels: int,
                 dim: int | None = None, seed: int = 0, params: dict | None = None):
        if head not in HEADS:
            raise ValueError(f"unknown head {head!r}; expected one of {HEADS}")
        if head == "chrr-half" and hidden % 2:
            raise ValueError(f"chrr-half needs an even hidden size, got {hidden}")
        if min(n_features, hidden, n_labels) < 1:
            raise DimensionError("layer sizes must be positive")
        if head != "fc" and (dim is None or dim < 1):
            raise DimensionError(f"head {head!r} needs a positive label-vector dimension")
        self.head = head
        self.n_features = n_features
        self.hidden = hidden
        self.n_labels = n_labels
        self.dim = n_labels if head == "fc" else int(dim)
        self.seed = int(seed)
        self._codebook = None
        shapes = self.param_shapes()
        if params is None:
            params = self._init_params(shapes)
        elif list(params) != list(shapes) or any(params[k].shape != s for k, s in shapes.items()):
            raise DimensionError("parameter shapes do not match the architecture")
        self.params = params

    def param_shapes(self) -> dict:
        return param_shapes(self.head, self.n_features, self.hidden, self.dim)

    def _init_params(self, shapes: dict) -> dict:
        # uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)); biases share their layer's fan-in
        rng = np.random.default_rng([self.seed, 1])
        fan_in = {"1": self.n_features, "2": self.hidden,
                  "3": self.hidden // 2 if self.head == "chrr-half" else self.hidden}
        params = {}
        for name, shape in shapes.items():
            bound = 1.0 / np.sqrt(fan_in[name[1]])
            params[name] = rng.uniform(-bound, bound, size=shape)
        return params

    @property
    def codebook(self) -> Codebook | None:
        alg = head_algebra(self.head)
        if alg is None:
            return None
        if self._codebook is None:
            self._codebook = codec.generate_codebook(alg, self.dim, self.n_labels, self.seed)
        return self._codebook

    def copy(self) -> "MlpModel":
        m = MlpModel(self.head, self.n_features, self.hidden, self.n_labels,
                     None if self.head == "fc" else self.dim, self.seed,
                     {k: v.copy() for k, v in self.params.items()})
        m._codebook = self._codebook
        return m

    def head_weight_count(self) -> int:
        """Number of weights between the second hidden layer and the output."""
        return sum(v.size for k, v in self.params.items() if k.startswith("W3"))

    def param_count(self) -> int:
        return sum(v.size for v in self.params.values())


# --- forward ----------------------------------------------------------------

def _check_finite(arr: np.ndarray, layer: str) -> None:
    if not np.all(np.isfinite(arr)):
        raise TrainingDivergedError(f"non-finite activations in layer '{layer}'")


def cartesian_to_angles(raw) -> np.ndarray:
    """Read ``raw`` as interleaved ``(x, y)`` pairs and return their angles."""
    raw = np.asarray(raw, dtype=np.float64)
    if raw.shape[-1] % 2:
        raise DimensionError("cartesian_to_angles needs an even number of values")
    return _pair_angles(raw[..., 0::2], raw[..., 1::2])


def _pair_angles(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    norm = np.sqrt(x * x + y * y + EPS * EPS)
    return chrr.canonicalize(np.arctan2(y / norm, x / norm))


def _as_features(model: MlpModel, X):
    if sp.issparse(X):
        X = sp.csr_matrix(X)
    else:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != model.n_features:
        raise DimensionError(f"feature index out of range: inputs have {X.shape[1]} "
                             f"columns, model expects {model.n_features}")
    return X


def _forward(model: MlpModel, X) -> dict:
    P = model.params
    z1 = X @ P["W1"] + P["b1"]
    _check_finite(z1, "hidden1")
    a1 = np.maximum(z1, 0.0)
    z2 = a1 @ P["W2"] + P["b2"]
    _check_finite(z2, "hidden2")
    a2 = np.maximum(z2, 0.0)
    cache = {"X": X, "z1": z1, "a1": a1, "z2": z2, "a2": a2}
    head = model.head
    if head == "chrr-half":
        half = model.hidden // 2
        x = a2[:, :half] @ P["W3x"] + P["b3x"]
        y = a2[:, half:] @ P["W3y"] + P["b3y"]
        raw = np.concatenate([x, y], axis=1)
    else:
        raw = a2 @ P["W3"] + P["b3"]
        if head == "chrr":
            x, y = raw[:, 0::2], raw[:, 1::2]
    _check_finite(raw, "output")
    cache["raw"] = raw
    if head in ("chrr", "chrr-half"):
        cache["x"], cache["y"] = x, y
        norm = np.sqrt(x * x + y * y + EPS * EPS)
        cache["out"] = np.arctan2(y / norm, x / norm)
    elif head == "chrr-sin":
        cache["out"] = np.pi * np.sin(raw)
    elif head == "chrr-tanh":
        cache["out"] = np.pi * np.tanh(raw)
    else:
        cache["out"] = raw
    return cache


def forward(model: MlpModel, X) -> np.ndarray:
    """Head output for a batch: logits (fc), label vectors (hrr) or angles (chrr*)."""
    X = _as_features(model, X)
    cache = _forward(model, X)
    if model.head in ("chrr", "chrr-half"):
        return _pair_angles(cache["x"], cache["y"])
    if model.head.startswith("chrr"):
        return chrr.canonicalize(cache["out"])
    return cache["out"]


# --- losses -----------------------------------------------------------------

def _pairs(label_sets: Sequence[Sequence[int]], n_labels: int) -> tuple[np.ndarray, np.ndarray]:
    rows = np.fromiter((i for i, ls in enumerate(label_sets) for _ in ls), dtype=np.int64)
    cols = np.fromiter((l for ls in label_sets for l in ls), dtype=np.int64, count=rows.size)
    if cols.size and (cols.min() < 0 or cols.max() >= n_labels):
        raise IndexError(f"label id out of range [0, {n_labels})")
    return rows, cols


def _row_sum(rows: np.ndarray, values: np.ndarray, n: int) -> np.ndarray:
    """Sum per-pair rows of ``values`` into ``n`` example rows."""
    sel = sp.csr_matrix((np.ones(rows.size), (rows, np.arange(rows.size))), shape=(n, rows.size))
    return sel @ values


def chrr_loss(angles, labels: Sequence[int], book: Codebook) -> float:
    """Sum over labels of ``1 - sim(decode(angles), c_p)`` for a circular output."""
    labels = list(labels)
    if not labels:
        raise ValueError("loss needs at least one label")
    decoded = codec.decode(book, angles)
    return float(np.sum(1.0 - chrr.similarity(decoded, book.vectors[labels])))


def hrr_loss(vector, labels: Sequence[int], book: Codebook) -> float:
    """Same as :func:`chrr_loss` with cosine similarity on real vectors."""
    labels = list(labels)
    if not labels:
        raise ValueError("loss needs at least one label")
    decoded = codec.decode(book, vector)
    return float(np.sum(1.0 - hrr.similarity(decoded, book.vectors[labels])))


def _fc_loss_grad(logits, label_sets, n_labels):
    B = logits.shape[0]
    rows, cols = _pairs(label_sets, n_labels)
    Y = np.zeros_like(logits)
    Y[rows, cols] = 1.0
    # softplus(z) - y*z, averaged over labels
    L = logits.shape[1]
    per_example = np.mean(np.logaddexp(0.0, logits) - Y * logits, axis=1)
    sig = 0.5 * (1.0 + np.tanh(0.5 * logits))
    return per_example, (sig - Y) / (B * L)


def _chrr_loss_grad(angles, label_sets, book):
    B, d = angles.shape
    rows, cols = _pairs(label_sets, book.n_labels)
    if np.any(np.bincount(rows, minlength=B) == 0):
        raise ValueError("every example needs at least one label")
    delta = angles - book.concept
    diff = delta[rows] - book.vectors[cols]
    per_example = np.bincount(rows, weights=1.0 - np.cos(diff).mean(axis=1), minlength=B)
    grad = _row_sum(rows, np.sin(diff), B) / (d * B)
    return per_example, grad


def _hrr_loss_grad(S, label_sets, book):
    B, d = S.shape
    rows, cols = _pairs(label_sets, book.n_labels)
    if np.any(np.bincount(rows, minlength=B) == 0):
        raise ValueError("every example needs at least one label")
    inv_f = np.fft.rfft(codec.concept_inverse(book))
    u = np.fft.irfft(np.fft.rfft(S, axis=1) * inv_f, n=d, axis=1)
    un = np.sqrt(np.sum(u * u, axis=1) + EPS * EPS)
    C = book.vectors
    Cn = C / np.linalg.norm(C, axis=1, keepdims=True)
    sims = np.sum(u[rows] * Cn[cols], axis=1) / un[rows]
    per_example = np.bincount(rows, weights=1.0 - sims, minlength=B)
    s_sum = np.bincount(rows, weights=sims, minlength=B)
    A = _row_sum(rows, Cn[cols], B)
    g_u = -(A / un[:, None] - (s_sum / un ** 2)[:, None] * u) / B
    # adjoint of binding with inv: correlate with it
    g_S = np.fft.irfft(np.fft.rfft(g_u, axis=1) * np.conj(inv_f), n=d, axis=1)
    return per_example, g_S


def _output_grad(model: MlpModel, cache: dict, label_sets):
    head = model.head
    if head == "fc":
        return _fc_loss_grad(cache["out"], label_sets, model.n_labels)
    if head == "hrr":
        return _hrr_loss_grad(cache["out"], label_sets, model.codebook)
    return _chrr_loss_grad(cache["out"], label_sets, model.codebook)


def loss(model: MlpModel, X, label_sets) -> float:
    """Mean per-example loss over a batch."""
    X = _as_features(model, X)
    cache = _forward(model, X)
    per_example, _ = _output_grad(model, cache, label_sets)
    return float(per_example.mean())


def backward(model: MlpModel, X, label_sets) -> tuple[float, dict]:
    """Mean batch loss and its exact gradient for every parameter."""
    X = _as_features(model, X)
    if X.shape[0] == 0:
        raise ValueError("cannot differentiate an empty batch")
    if len(label_sets) != X.shape[0]:
        raise ValueError("one label set per example is required")
    P = model.params
    cache = _forward(model, X)
    per_example, g_out = _output_grad(model, cache, label_sets)
    head = model.head
    grads = {}

    if head in ("chrr", "chrr-half"):
        x, y = cache["x"], cache["y"]
        r2 = x * x + y * y + EPS * EPS
        g_x = -g_out * y / r2
        g_y = g_out * x / r2
    elif head == "chrr-sin":
        g_raw = g_out * np.pi * np.cos(cache["raw"])
    elif head == "chrr-tanh":
        g_raw = g_out * np.pi * (1.0 - np.tanh(cache["raw"]) ** 2)
    else:
        g_raw = g_out

    a2 = cache["a2"]
    if head == "chrr-half":
        half = model.hidden // 2
        grads["W3x"] = a2[:, :half].T @ g_x
        grads["b3x"] = g_x.sum(axis=0)
        grads["W3y"] = a2[:, half:].T @ g_y
        grads["b3y"] = g_y.sum(axis=0)
        g_a2 = np.concatenate([g_x @ P["W3x"].T, g_y @ P["W3y"].T], axis=1)
    else:
        if head == "chrr":
            g_raw = np.empty_like(cache["raw"])
            g_raw[:, 0::2] = g_x
            g_raw[:, 1::2] = g_y
        grads["W3"] = a2.T @ g_raw
        grads["b3"] = g_raw.sum(axis=0)
        g_a2 = g_raw @ P["W3"].T

    g_z2 = g_a2 * (cache["z2"] > 0)
    grads["W2"] = cache["a1"].T @ g_z2
    grads["b2"] = g_z2.sum(axis=0)
    g_z1 = (g_z2 @ P["W2"].T) * (cache["z1"] > 0)
    grads["W1"] = np.asarray(X.T @ g_z1)
    grads["b1"] = g_z1.sum(axis=0)

    for name, g in grads.items():
        _check_finite(g, f"grad:{name}")
    return float(per_example.mean()), {k: grads[k] for k in P}


# --- training and inference ---------------------------------------------------

def _prepare_features(X, normalize: bool):
    X = sp.csr_matrix(X, dtype=np.float64)
    if normalize:
        norms = np.sqrt(np.asarray(X.multiply(X).sum(axis=1)).ravel())
        norms[norms == 0] = 1.0
        X = sp.csr_matrix(sp.diags(1.0 / norms) @ X)
    return X


def train(model: MlpModel, dataset, cfg: TrainConfig) -> tuple[MlpModel, list[float]]:
    """Mini-batch SGD; returns a trained copy and the per-epoch mean loss.

    Examples are reshuffled every epoch from a generator seeded with
    ``cfg.seed``. Examples with an empty label set are skipped for the
    label-vector heads, whose loss is undefined for them.
    """
    model = model.copy()
    X = _prepare_features(dataset.features, cfg.normalize_features)
    labels = list(dataset.labels)
    usable = np.arange(len(labels))
    if model.head != "fc":
        usable = np.array([i for i, ls in enumerate(labels) if ls], dtype=np.int64)
    if usable.size == 0:
        raise ValueError("training set has no labelled examples")
    rng = np.random.default_rng(cfg.seed)
    history = []
    for epoch in range(cfg.epochs):
        order = usable[rng.permutation(usable.size)]
        total = 0.0
        for b, start in enumerate(range(0, order.size, cfg.batch_size)):
            idx = order[start:start + cfg.batch_size]
            try:
                batch_loss, grads = backward(model, X[idx], [labels[i] for i in idx])
            except TrainingDivergedError as exc:
                raise TrainingDivergedError(f"epoch {epoch}, batch {b}: {exc}") from None
            if not np.isfinite(batch_loss):
                raise TrainingDivergedError(f"epoch {epoch}, batch {b}: non-finite loss")
            total += batch_loss * idx.size
            if cfg.lr:
                for name, g in grads.items():
                    model.params[name] -= cfg.lr * g
        history.append(total / order.size)
    return model, history


def scores(model: MlpModel, X) -> np.ndarray:
    """Per-label scores ``(batch, L)``: logits for fc, similarities otherwise."""
    out = forward(model, X)
    if model.head == "fc":
        return out
    book = model.codebook
    if book.algebra.is_circular:
        dec = out - book.concept
        C = book.vectors
        return (np.cos(dec) @ np.cos(C).T + np.sin(dec) @ np.sin(C).T) / book.dim
    dec = codec.decode(book, out)
    dec = dec / np.linalg.norm(dec, axis=1, keepdims=True)
    C = book.vectors / np.linalg.norm(book.vectors, axis=1, keepdims=True)
    return dec @ C.T


def predict_ranking(model: MlpModel, X, top_k: int) -> np.ndarray:
    """Top-k label ids per example, ties broken by ascending id."""
    if not 1 <= top_k <= model.n_labels:
        raise ValueError(f"top_k must be in [1, {model.n_labels}], got {top_k}")
    return codec.top_k_by_score(scores(model, X), top_k)


def predict_in_batches(model: MlpModel, X, top_k: int, batch_size: int = 1024,
                       normalize: bool = False) -> np.ndarray:
    X = _prepare_features(X, normalize)
    parts = [predict_ranking(model, X[i:i + batch_size], top_k)
             for i in range(0, X.shape[0], batch_size)]
    return np.concatenate(parts) if parts else np.zeros((0, top_k), dtype=np.int64)


# --- checkpoints ----------------------------------------------------------------

MODEL_MAGIC = b"VSAM"
MODEL_VERSION = 1
_HEADER = struct.Struct("<4sHBIIIIQ")


def model_to_bytes(model: MlpModel) -> bytes:
    header = _HEADER.pack(MODEL_MAGIC, MODEL_VERSION, HEADS.index(model.head),
                          model.n_features, model.hidden, model.dim, model.n_labels,
                          model.seed & 0xFFFFFFFFFFFFFFFF)
    blocks = b"".join(np.ascontiguousarray(v, dtype="<f8").tobytes() for v in model.params.values())
    return header + blocks


def model_from_bytes(data: bytes) -> MlpModel:
    if len(data) < _HEADER.size:
        raise ValueError("model file is truncated")
    magic, version, head, F, h, d, L, seed = _HEADER.unpack_from(data)
    if magic != MODEL_MAGIC:
        raise ValueError(f"not a model file (magic {magic!r})")
    if version != MODEL_VERSION:
        raise ValueError(f"unsupported model version {version}")
    if head >= len(HEADS):
        raise ValueError(f"unknown head code {head}")
    name = HEADS[head]
    offset = _HEADER.size
    params = {}
    for key, shape in param_shapes(name, F, h, d).items():
        n = int(np.prod(shape))
        if offset + 8 * n > len(data):
            raise ValueError("model file is truncated")
        params[key] = np.frombuffer(data, dtype="<f8", count=n, offset=offset).reshape(shape).astype(np.float64)
        offset += 8 * n
    if offset != len(data):
        raise ValueError("model file has trailing bytes")
    return MlpModel(name, F, h, L, None if name == "fc" else d, seed, params)


def save_model(model: MlpModel, path) -> None:
    Path(path).write_bytes(model_to_bytes(model))


def load_model(path) -> MlpModel:
    return model_from_bytes(Path(path).read_bytes())
