"""Ranking metrics for multi-label prediction and model-size accounting."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .datasets import SparseDataset


@dataclass(frozen=True, eq=False)
class PropensityTable:
    """Per-label relative frequency in the training set, floored at ``floor``."""

    propensities: np.ndarray
    counts: np.ndarray
    n_train: int
    floor: float

    def __getitem__(self, label: int) -> float:
        return float(self.propensities[label])

    def __len__(self):
        return self.propensities.size


def build_propensities(train: SparseDataset, floor: float = 1e-9) -> PropensityTable:
    if train.n_examples == 0:
        raise ValueError("propensities need a non-empty training set")
    counts = np.zeros(train.n_labels, dtype=np.int64)
    for labs in train.labels:
        counts[list(labs)] += 1
    props = np.maximum(counts / train.n_examples, floor)
    return PropensityTable(props, counts, train.n_examples, floor)


def _top_k(ranking: Sequence[int], k: int) -> list[int]:
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    ranking = [int(r) for r in ranking]
    if len(set(ranking)) != len(ranking):
        raise ValueError("ranking contains duplicate label ids")
    if len(ranking) < k:
        raise ValueError(f"ranking has {len(ranking)} entries, need at least k={k}")
    return ranking[:k]


def precision_at_k(ranking: Sequence[int], truth: Iterable[int], k: int) -> float:
    truth = set(int(t) for t in truth)
    top = _top_k(ranking, k)
    return sum(1 for l in top if l in truth) / k


def psp_at_k(ranking: Sequence[int], truth: Iterable[int], k: int, props,
             normalized: bool = False) -> float:
    """Propensity-scored precision: each hit in the top k counts ``1/p_l``.

    ``props`` is a :class:`PropensityTable` or anything indexable by label.
    With ``normalized=True`` the score is divided by the best achievable
    top-k score for this truth set (0 when the truth set is empty).
    """
    truth = set(int(t) for t in truth)
    top = _top_k(ranking, k)
    score = sum(1.0 / props[l] for l in top if l in truth) / k
    if not normalized:
        return score
    ideal = sorted((1.0 / props[l] for l in truth), reverse=True)[:k]
    best = sum(ideal) / k
    return score / best if best > 0 else 0.0


def compression_report(F: int, h_chrr: int, h_fc: int, d: int, L: int) -> dict:
    """Model-size and output-size compression of a CHRR network against FC.

    Model size counts the weights of both networks: FC uses
    ``F*h + h*h + h*L``, CHRR uses ``F*h + h*h + h*2d + d*L``.
    """
    if min(F, h_chrr, h_fc, d, L) <= 0:
        raise ValueError("all sizes must be positive")
    chrr_size = (F * h_chrr + h_chrr * h_chrr) + (h_chrr * 2 * d + d * L)
    fc_size = (F * h_fc + h_fc * h_fc) + (h_fc * L)
    return {
        "model_size_ratio": 1.0 - chrr_size / fc_size,
        "output_dim_ratio": 1.0 - d / L,
    }


def evaluate_rankings(rankings: Sequence[Sequence[int]], truths: Sequence[Iterable[int]],
                      ks: Sequence[int] = (1, 5, 10, 20), props=None,
                      normalized_psp: bool = False) -> dict:
    """Average P@k (and PSP@k when ``props`` is given) over examples.

    Returns ``{("P", k): value, ("PSP", k): value, ...}`` in a fixed order.
    """
    if len(rankings) != len(truths):
        raise ValueError("one ranking per example is required")
    n = len(rankings)
    out = {}
    for k in ks:
        out[("P", k)] = float(np.mean([precision_at_k(r, t, k) for r, t in zip(rankings, truths)])) if n else 0.0
    if props is not None:
        for k in ks:
            vals = [psp_at_k(r, t, k, props, normalized_psp) for r, t in zip(rankings, truths)]
            out[("PSP", k)] = float(np.mean(vals)) if n else 0.0
    return out


def report_csv(report: Mapping, header: str | None = None) -> str:
    buf = io.StringIO()
    if header:
        buf.write(f"# {header}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("metric", "k", "value"))
    for (metric, k), value in report.items():
        w.writerow((metric, k, repr(float(value))))
    return buf.getvalue()


def report_json(report: Mapping) -> str:
    rows = [{"metric": m, "k": k, "value": float(v)} for (m, k), v in report.items()]
    return json.dumps(rows, indent=2) + "\n"


def write_report(report: Mapping, path, header: str | None = None) -> Path:
    """Write the report as CSV, or JSON when the suffix is ``.json``."""
    path = Path(path)
    text = report_json(report) if path.suffix.lower() == ".json" else report_csv(report, header)
    path.write_text(text, encoding="utf-8")
    return path
