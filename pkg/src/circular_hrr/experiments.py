"""Monte-Carlo sweeps over dimension and label-set size.

Two experiments are provided:

* :func:`run_retrieval_sweep` -- for each (algebra, d, k) cell, build
  ``trials`` fresh codebooks, encode ``k`` random labels, and record how
  many of them come back in the top-k ranking.
* :func:`run_variance_sweep` -- at a fixed dimension, encode ``k`` labels
  and pool the similarities between the decoded vector and each encoded
  label vector; report their mean and variance per k.

Every trial draws from its own seed, a stable 64-bit hash of
``(base seed, algebra, d, k, trial)``, so results do not depend on the
order in which cells are evaluated or on the number of worker threads.
"""

from __future__ import annotations

import csv
import hashlib
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import codec
from .codec import Algebra

DEFAULT_DIMS = tuple(2 ** i for i in range(11))
DEFAULT_KS = (1,) + tuple(range(5, 51, 5))


def trial_seed(base: int, algebra, d: int, k: int, trial: int) -> int:
    """Stable 64-bit seed for one trial of one grid cell."""
    algebra = Algebra.parse(algebra)
    key = f"{int(base)}|{algebra.label}|{int(d)}|{int(k)}|{int(trial)}".encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "little")


@dataclass(frozen=True)
class SweepConfig:
    algebras: tuple = (Algebra.HRR, Algebra.CHRR)
    dims: tuple = DEFAULT_DIMS
    ks: tuple = DEFAULT_KS
    n_labels: int = 1000
    trials: int = 100
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "algebras", tuple(Algebra.parse(a) for a in self.algebras))
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "ks", tuple(int(k) for k in self.ks))
        if any(d < 1 for d in self.dims) or any(k < 1 for k in self.ks):
            raise ValueError("grid values must be positive")
        if self.trials < 1:
            raise ValueError("trials must be positive")
        if self.ks and max(self.ks) > self.n_labels:
            raise ValueError(f"k={max(self.ks)} exceeds the number of labels {self.n_labels}")


@dataclass(frozen=True)
class RetrievalCell:
    algebra: Algebra
    d: int
    k: int
    mean: float
    std: float
    trials: int


@dataclass(frozen=True)
class VarianceRow:
    algebra: Algebra
    k: int
    mean: float
    variance: float
    count: int


@dataclass
class RetrievalResult:
    cells: list = field(default_factory=list)

    def cell(self, algebra, d: int, k: int) -> RetrievalCell:
        algebra = Algebra.parse(algebra)
        for c in self.cells:
            if c.algebra == algebra and c.d == d and c.k == k:
                return c
        raise KeyError((algebra, d, k))

    def means(self, algebra) -> dict:
        algebra = Algebra.parse(algebra)
        return {(c.d, c.k): c.mean for c in self.cells if c.algebra == algebra}


@dataclass
class VarianceResult:
    rows: list = field(default_factory=list)

    def row(self, algebra, k: int) -> VarianceRow:
        algebra = Algebra.parse(algebra)
        for r in self.rows:
            if r.algebra == algebra and r.k == k:
                return r
        raise KeyError((algebra, k))


def _retrieval_cell(algebra: Algebra, d: int, k: int, cfg: SweepConfig) -> RetrievalCell:
    accs = np.empty(cfg.trials)
    for t in range(cfg.trials):
        seed = trial_seed(cfg.seed, algebra, d, k, t)
        book = codec.generate_codebook(algebra, d, cfg.n_labels, seed)
        pick = np.random.default_rng([seed, 1]).choice(cfg.n_labels, size=k, replace=False)
        accs[t] = codec.retrieval_accuracy(book, pick)
    return RetrievalCell(algebra, d, k, float(accs.mean()), float(accs.std()), cfg.trials)


def _run_cells(fn, keys, threads: int):
    if threads <= 1:
        return [fn(*key) for key in keys]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(fn, *key) for key in keys]
        return [f.result() for f in futures]


def run_retrieval_sweep(cfg: SweepConfig, threads: int = 1) -> RetrievalResult:
    keys = [(a, d, k, cfg) for a in sorted(cfg.algebras) for d in sorted(cfg.dims)
            for k in sorted(cfg.ks)]
    return RetrievalResult(_run_cells(_retrieval_cell, keys, threads))


def _variance_row(algebra: Algebra, d: int, k: int, cfg: SweepConfig) -> VarianceRow:
    sims = np.empty((cfg.trials, k))
    for t in range(cfg.trials):
        book = codec.generate_codebook(algebra, d, k, trial_seed(cfg.seed, algebra, d, k, t))
        decoded = codec.decode(book, codec.encode(book, range(k)))
        sims[t] = codec.label_scores(book, decoded)
    return VarianceRow(algebra, k, float(sims.mean()), float(sims.var()), sims.size)


def run_variance_sweep(cfg: SweepConfig,
                       variants: Sequence = (Algebra.HRR_PLAIN, Algebra.HRR, Algebra.CHRR),
                       threads: int = 1) -> VarianceResult:
    """Pooled similarity statistics per (variant, k) at the single dimension in ``cfg.dims``.

    Each trial draws exactly ``k`` label vectors plus the concept vector
    and encodes all of them; ``cfg.n_labels`` is not used.
    """
    if len(cfg.dims) != 1:
        raise ValueError("the variance sweep runs at a single dimension")
    d = cfg.dims[0]
    variants = sorted(Algebra.parse(v) for v in variants)
    keys = [(v, d, k, cfg) for v in variants for k in sorted(cfg.ks)]
    return VarianceResult(_run_cells(_variance_row, keys, threads))


# --- output -----------------------------------------------------------------

RETRIEVAL_COLUMNS = ("algebra", "d", "k", "mean", "std", "trials")
VARIANCE_COLUMNS = ("algebra", "k", "mean", "variance", "count")


def _write_csv(path: Path, columns, rows, header: str | None) -> None:
    buf = io.StringIO()
    if header:
        buf.write(f"# {header}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    w.writerows(rows)
    path.write_text(buf.getvalue(), encoding="utf-8")


def retrieval_csv(result: RetrievalResult, path, header: str | None = None) -> Path:
    path = Path(path)
    rows = [(c.algebra.label, c.d, c.k, repr(c.mean), repr(c.std), c.trials)
            for c in result.cells]
    _write_csv(path, RETRIEVAL_COLUMNS, rows, header)
    return path


def read_retrieval_csv(path) -> RetrievalResult:
    lines = [ln for ln in Path(path).read_text(encoding="utf-8").splitlines()
             if not ln.startswith("#")]
    reader = csv.DictReader(lines)
    if tuple(reader.fieldnames or ()) != RETRIEVAL_COLUMNS:
        raise ValueError(f"unexpected columns {reader.fieldnames}")
    return RetrievalResult([
        RetrievalCell(Algebra.parse(r["algebra"]), int(r["d"]), int(r["k"]),
                      float(r["mean"]), float(r["std"]), int(r["trials"]))
        for r in reader
    ])


def variance_csv(result: VarianceResult, path, header: str | None = None) -> Path:
    path = Path(path)
    rows = [(r.algebra.label, r.k, repr(r.mean), repr(r.variance), r.count)
            for r in result.rows]
    _write_csv(path, VARIANCE_COLUMNS, rows, header)
    return path


# Warm colormap: dark blue (0.0) -> pale yellow (0.5) -> dark red (1.0),
# linear in RGB between the stops. Higher accuracy is warmer.
COLORMAP_STOPS = ((0.0, (49, 54, 149)), (0.5, (255, 255, 191)), (1.0, (165, 0, 38)))


def accuracy_color(value: float) -> str:
    v = min(max(float(value), 0.0), 1.0)
    for (x0, c0), (x1, c1) in zip(COLORMAP_STOPS, COLORMAP_STOPS[1:]):
        if v <= x1:
            t = (v - x0) / (x1 - x0)
            rgb = [round(a + t * (b - a)) for a, b in zip(c0, c1)]
            return "#{:02x}{:02x}{:02x}".format(*rgb)
    return "#{:02x}{:02x}{:02x}".format(*COLORMAP_STOPS[-1][1])


def heatmap_svg(result: RetrievalResult, header: str | None = None, cell: int = 18) -> str:
    """One panel per algebra; rows are d (small at the bottom), columns are k."""
    algebras = sorted({c.algebra for c in result.cells})
    dims = sorted({c.d for c in result.cells})
    ks = sorted({c.k for c in result.cells})
    margin_l, margin_t, gap = 48, 28, 24
    pw, ph = cell * len(ks), cell * len(dims)
    width = margin_l + len(algebras) * (pw + gap + margin_l)
    height = margin_t + ph + 36
    out = ['<?xml version="1.0" encoding="UTF-8"?>']
    if header:
        out.append(f"<!-- {header} -->")
    out.append(f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
               f'font-family="sans-serif" font-size="9">')
    for p, alg in enumerate(algebras):
        x0 = margin_l + p * (pw + gap + margin_l)
        out.append(f'<g class="panel" id="panel-{alg.label}">')
        out.append(f'<text x="{x0 + pw / 2}" y="{margin_t - 12}" text-anchor="middle" '
                   f'font-size="11">{alg.label.upper()}</text>')
        for c in result.cells:
            if c.algebra != alg:
                continue
            col = ks.index(c.k)
            row = len(dims) - 1 - dims.index(c.d)
            out.append(f'<rect class="cell" x="{x0 + col * cell}" y="{margin_t + row * cell}" '
                       f'width="{cell}" height="{cell}" fill="{accuracy_color(c.mean)}">'
                       f'<title>d={c.d} k={c.k} acc={c.mean:.4f}</title></rect>')
        for i, d in enumerate(dims):
            y = margin_t + (len(dims) - 1 - i) * cell + cell * 0.7
            out.append(f'<text x="{x0 - 4}" y="{y}" text-anchor="end">{d}</text>')
        for j, k in enumerate(ks):
            out.append(f'<text x="{x0 + j * cell + cell / 2}" y="{margin_t + ph + 12}" '
                       f'text-anchor="middle">{k}</text>')
        out.append(f'<text x="{x0 + pw / 2}" y="{margin_t + ph + 28}" text-anchor="middle">k</text>')
        out.append(f'<text x="{x0 - 34}" y="{margin_t + ph / 2}" text-anchor="middle" '
                   f'transform="rotate(-90 {x0 - 34} {margin_t + ph / 2})">d</text>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_heatmap(result: RetrievalResult, out_dir, stem: str = "retrieval",
                 header: str | None = None) -> tuple[Path, Path]:
    """Write ``<stem>.csv`` and ``<stem>.svg`` into ``out_dir``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = retrieval_csv(result, out_dir / f"{stem}.csv", header)
    svg_path = out_dir / f"{stem}.svg"
    svg_path.write_text(heatmap_svg(result, header), encoding="utf-8")
    return csv_path, svg_path
