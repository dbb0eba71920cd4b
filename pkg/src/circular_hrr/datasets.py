"""Sparse multi-label datasets in the XMC repository text format.

The format is line oriented::

    num_examples num_features num_labels
    l1,l2,...,lm f1:v1 f2:v2 ...
     f1:v1 ...                      <- leading space: empty label set

Files are read and written with ``\\n`` line endings; feature values are
written in shortest round-trip form.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .errors import DatasetFormatError


@dataclass(frozen=True, eq=False)
class SparseDataset:
    """Bag-of-words instances with label sets.

    ``features`` is an ``(n, F)`` CSR matrix with sorted indices; ``labels``
    holds one ascending tuple of label ids per example.
    """

    features: sp.csr_matrix
    labels: tuple
    n_labels: int

    @property
    def n_examples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def __len__(self):
        return self.n_examples

    def subset(self, index) -> "SparseDataset":
        index = np.asarray(index, dtype=np.int64)
        feats = self.features[index]
        feats.sort_indices()
        return SparseDataset(feats, tuple(self.labels[i] for i in index), self.n_labels)

    def label_matrix(self, rows=None) -> sp.csr_matrix:
        """Binary ``(n, L)`` indicator matrix of the label sets."""
        labels = self.labels if rows is None else [self.labels[i] for i in rows]
        indptr = np.cumsum([0] + [len(ls) for ls in labels])
        indices = np.fromiter((l for ls in labels for l in ls), dtype=np.int64, count=indptr[-1])
        data = np.ones(indices.size)
        return sp.csr_matrix((data, indices, indptr), shape=(len(labels), self.n_labels))

    def __eq__(self, other):
        if not isinstance(other, SparseDataset):
            return NotImplemented
        a, b = self.features, other.features
        return (a.shape == b.shape and self.n_labels == other.n_labels
                and self.labels == other.labels
                and np.array_equal(a.indptr, b.indptr)
                and np.array_equal(a.indices, b.indices)
                and np.array_equal(a.data, b.data))

    __hash__ = None


def _parse_int(token: str, lineno: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise DatasetFormatError(lineno, f"non-numeric {what} {token!r}") from None


def _parse_header(line: str) -> tuple[int, int, int]:
    parts = line.split()
    if len(parts) != 3:
        raise DatasetFormatError(1, "header must be 'num_examples num_features num_labels'")
    try:
        n, f, l = (int(p) for p in parts)
    except ValueError:
        raise DatasetFormatError(1, f"non-numeric header {line.strip()!r}") from None
    if n < 0 or f < 0 or l < 0:
        raise DatasetFormatError(1, "header counts must be non-negative")
    return n, f, l


def _parse_example(line: str, lineno: int, n_features: int, n_labels: int):
    if line.startswith(" ") or line == "":
        label_field, rest = "", line
    else:
        label_field, _, rest = line.partition(" ")

    labels = []
    if label_field:
        for tok in label_field.split(","):
            lab = _parse_int(tok, lineno, "label id")
            if not 0 <= lab < n_labels:
                raise DatasetFormatError(lineno, f"label id {lab} outside [0, {n_labels})")
            labels.append(lab)
        if len(set(labels)) != len(labels):
            raise DatasetFormatError(lineno, "duplicate label id")

    idx, vals = [], []
    for tok in rest.split():
        key, sep, val = tok.partition(":")
        if not sep:
            raise DatasetFormatError(lineno, f"feature token {tok!r} is not 'id:value'")
        fid = _parse_int(key, lineno, "feature id")
        if not 0 <= fid < n_features:
            raise DatasetFormatError(lineno, f"feature id {fid} outside [0, {n_features})")
        try:
            v = float(val)
        except ValueError:
            raise DatasetFormatError(lineno, f"non-numeric feature value {val!r}") from None
        if not np.isfinite(v):
            raise DatasetFormatError(lineno, f"non-finite feature value {val!r}")
        idx.append(fid)
        vals.append(v)
    if len(set(idx)) != len(idx):
        raise DatasetFormatError(lineno, "duplicate feature id")
    order = np.argsort(idx, kind="stable")
    return tuple(sorted(labels)), np.asarray(idx, dtype=np.int64)[order], np.asarray(vals)[order]


def parse_xmc_text(text: str) -> SparseDataset:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise DatasetFormatError(1, "missing header line")
    n, n_features, n_labels = _parse_header(lines[0])
    body = [ln.rstrip("\r") for ln in lines[1:]]
    if len(body) != n:
        raise DatasetFormatError(n + 2 if len(body) > n else len(body) + 2,
                                 f"header declares {n} examples, file has {len(body)}")
    labels, indptr, indices, data = [], [0], [], []
    for lineno, line in enumerate(body, start=2):
        labs, idx, vals = _parse_example(line, lineno, n_features, n_labels)
        labels.append(labs)
        indices.append(idx)
        data.append(vals)
        indptr.append(indptr[-1] + idx.size)
    feats = sp.csr_matrix(
        (np.concatenate(data) if data else np.zeros(0),
         np.concatenate(indices) if indices else np.zeros(0, dtype=np.int64),
         np.asarray(indptr)),
        shape=(n, n_features),
    )
    return SparseDataset(feats, tuple(labels), n_labels)


def parse_xmc(path) -> SparseDataset:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_xmc_text(fh.read())


def format_value(v: float) -> str:
    """Shortest round-trip decimal, without a trailing ``.0`` for integers."""
    s = repr(float(v))
    return s[:-2] if s.endswith(".0") else s


def emit_xmc_text(ds: SparseDataset) -> str:
    buf = io.StringIO()
    buf.write(f"{ds.n_examples} {ds.n_features} {ds.n_labels}\n")
    X = ds.features
    for i, labs in enumerate(ds.labels):
        lo, hi = X.indptr[i], X.indptr[i + 1]
        feats = " ".join(f"{j}:{format_value(v)}" for j, v in zip(X.indices[lo:hi], X.data[lo:hi]))
        buf.write(",".join(str(l) for l in labs))
        if feats:
            buf.write(" " + feats)
        elif not labs:
            buf.write(" ")
        buf.write("\n")
    return buf.getvalue()


def emit_xmc(ds: SparseDataset, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(emit_xmc_text(ds))


def dataset_stats(ds: SparseDataset) -> dict:
    """Counts plus the average number of examples per label (L-bar)."""
    occurrences = sum(len(ls) for ls in ds.labels)
    return {
        "num_examples": ds.n_examples,
        "num_features": ds.n_features,
        "num_labels": ds.n_labels,
        "avg_samples_per_label": occurrences / ds.n_labels if ds.n_labels else 0.0,
        "avg_labels_per_example": occurrences / ds.n_examples if ds.n_examples else 0.0,
    }


def generate_synthetic(num_examples: int, n_features: int, n_labels: int,
                       labels_per_example: int, noise: float, seed: int) -> SparseDataset:
    """Block-structured multi-label data.

    Label ``l`` owns features ``[l*b, (l+1)*b)`` with ``b = F // L``. Each
    example draws ``labels_per_example`` distinct labels uniformly, turns on
    their owned features with value 1, and then flips the presence of every
    feature independently with probability ``noise``.
    """
    k, F, L = labels_per_example, n_features, n_labels
    if not 1 <= k <= L <= F:
        raise ValueError(f"need 1 <= k <= L <= F, got k={k}, L={L}, F={F}")
    if not 0.0 <= noise < 1.0:
        raise ValueError(f"noise must lie in [0, 1), got {noise}")
    if num_examples < 0:
        raise ValueError("num_examples must be non-negative")
    rng = np.random.default_rng(seed)
    block = F // L
    dense = np.zeros((num_examples, F), dtype=bool)
    labels = []
    for i in range(num_examples):
        labs = np.sort(rng.choice(L, size=k, replace=False))
        for l in labs:
            dense[i, l * block:(l + 1) * block] = True
        labels.append(tuple(int(l) for l in labs))
    if noise > 0:
        dense ^= rng.random((num_examples, F)) < noise
    feats = sp.csr_matrix(dense.astype(np.float64))
    feats.sort_indices()
    return SparseDataset(feats, tuple(labels), L)


def train_test_split(ds: SparseDataset, n_train: int) -> tuple[SparseDataset, SparseDataset]:
    """First ``n_train`` examples for training, the rest for testing."""
    return ds.subset(np.arange(n_train)), ds.subset(np.arange(n_train, ds.n_examples))


def from_lists(labels: Sequence[Sequence[int]], features: Sequence[dict],
               n_features: int, n_labels: int) -> SparseDataset:
    """Build a dataset from Python lists; mostly for tests and fixtures."""
    text = [f"{len(labels)} {n_features} {n_labels}"]
    for labs, feats in zip(labels, features):
        ftxt = " ".join(f"{j}:{format_value(v)}" for j, v in sorted(feats.items()))
        text.append(f"{','.join(map(str, sorted(labs)))} {ftxt}".rstrip() if labs else f" {ftxt}")
    return parse_xmc_text("\n".join(text) + "\n")
