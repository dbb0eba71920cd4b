"""Encoding label sets into a single memory vector and retrieving them.

A :class:`Codebook` fixes one random symbol vector per label plus a
positive-concept vector ``p``. A label set ``S`` is stored as the
superposition of ``p (x) c_l`` over ``l`` in ``S``; retrieval unbinds ``p``
and ranks every label by similarity to the result.
"""

from __future__ import annotations

import enum
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from . import chrr, hrr
from .errors import DimensionError


class Algebra(enum.IntEnum):
    HRR = 0  # real vectors, projected to a unit spectrum
    CHRR = 1  # circular vectors
    HRR_PLAIN = 2  # unprojected Gaussian samples, unbound with the involution

    @classmethod
    def parse(cls, name: "str | Algebra") -> "Algebra":
        if isinstance(name, Algebra):
            return name
        key = str(name).strip().lower().replace("-", "_")
        aliases = {"hrr": cls.HRR, "hrr_proj": cls.HRR, "hrrwproj": cls.HRR,
                   "chrr": cls.CHRR, "hrr_plain": cls.HRR_PLAIN}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown algebra {name!r}") from None

    @property
    def label(self) -> str:
        return {Algebra.HRR: "hrr", Algebra.CHRR: "chrr", Algebra.HRR_PLAIN: "hrr-plain"}[self]

    @property
    def is_circular(self) -> bool:
        return self is Algebra.CHRR


@dataclass(frozen=True, eq=False)
class Codebook:
    algebra: Algebra
    dim: int
    seed: int
    concept: np.ndarray = field(repr=False)
    vectors: np.ndarray = field(repr=False)

    def __post_init__(self):
        for arr in (self.concept, self.vectors):
            arr.setflags(write=False)
        if self.concept.shape != (self.dim,) or self.vectors.ndim != 2 \
                or self.vectors.shape[1] != self.dim:
            raise DimensionError("codebook vectors do not share the declared dimension")

    @property
    def n_labels(self) -> int:
        return self.vectors.shape[0]

    def __eq__(self, other):
        if not isinstance(other, Codebook):
            return NotImplemented
        return (self.algebra == other.algebra and self.dim == other.dim
                and self.seed == other.seed
                and np.array_equal(self.concept, other.concept)
                and np.array_equal(self.vectors, other.vectors))

    __hash__ = None


def _sample(algebra: Algebra, d: int, rng: np.random.Generator, size=None) -> np.ndarray:
    if algebra is Algebra.CHRR:
        return chrr.sample_uniform(d, rng, size)
    v = hrr.sample_gaussian(d, rng, size)
    return hrr.project(v) if algebra is Algebra.HRR else v


def generate_codebook(algebra, dim: int, n_labels: int, seed: int) -> Codebook:
    """Draw the concept vector, then label vectors in id order, from one stream."""
    algebra = Algebra.parse(algebra)
    if dim < 1:
        raise DimensionError(f"dimension must be positive, got {dim}")
    if n_labels < 1:
        raise ValueError(f"a codebook needs at least one label, got {n_labels}")
    rng = np.random.default_rng(seed)
    concept = _sample(algebra, dim, rng)
    vectors = _sample(algebra, dim, rng, size=n_labels)
    return Codebook(algebra, dim, int(seed), concept, vectors)


def _label_ids(codebook: Codebook, labels: Iterable[int]) -> np.ndarray:
    ids = np.array(sorted({int(l) for l in labels}), dtype=np.int64)
    if ids.size == 0:
        raise ValueError("cannot encode an empty label set")
    if ids[0] < 0 or ids[-1] >= codebook.n_labels:
        raise IndexError(f"label id out of range [0, {codebook.n_labels})")
    return ids


def encode(codebook: Codebook, labels: Iterable[int]) -> np.ndarray:
    """Superpose ``bind(concept, c_l)`` over the labels, in ascending id order."""
    ids = _label_ids(codebook, labels)
    if codebook.algebra.is_circular:
        bound = chrr.bind(codebook.concept, codebook.vectors[ids])
        return chrr.superpose_many(bound)
    bound = hrr.bind(codebook.concept, codebook.vectors[ids])
    return bound.sum(axis=0)


def concept_inverse(codebook: Codebook) -> np.ndarray:
    """Inverse of the concept vector used for decoding.

    Projected HRR and CHRR use their exact inverses. Plain HRR uses the
    involution, the approximate inverse of the original real-valued scheme;
    with the exact inverse every label shares one perfectly cancelled
    concept and plain HRR would decode exactly like the projected variant.
    """
    if codebook.algebra.is_circular:
        return chrr.invert(codebook.concept)
    if codebook.algebra is Algebra.HRR_PLAIN:
        return hrr.approx_invert(codebook.concept)
    return hrr.invert(codebook.concept)


def decode(codebook: Codebook, memory) -> np.ndarray:
    """Unbind the concept vector from a memory vector."""
    memory = np.asarray(memory, dtype=np.float64)
    if memory.shape[-1] != codebook.dim:
        raise DimensionError(f"memory has dimension {memory.shape[-1]}, codebook {codebook.dim}")
    if codebook.algebra.is_circular:
        return chrr.bind(memory, concept_inverse(codebook))
    return hrr.bind(memory, concept_inverse(codebook))


def label_scores(codebook: Codebook, decoded) -> np.ndarray:
    """Similarity of ``decoded`` against every label vector.

    ``decoded`` may be a single vector or a stack ``(b, d)``; the result has
    shape ``(n_labels,)`` or ``(b, n_labels)``.
    """
    decoded = np.asarray(decoded, dtype=np.float64)
    if decoded.shape[-1] != codebook.dim:
        raise DimensionError(f"decoded vector has dimension {decoded.shape[-1]}, codebook {codebook.dim}")
    q = decoded[..., None, :]
    if codebook.algebra.is_circular:
        return chrr.similarity(q, codebook.vectors)
    return hrr.similarity(q, codebook.vectors)


def top_k_by_score(scores: np.ndarray, top_k: int) -> np.ndarray:
    """Indices of the ``top_k`` highest scores; ties go to the lower index."""
    n = scores.shape[-1]
    if not 1 <= top_k <= n:
        raise ValueError(f"top_k must be in [1, {n}], got {top_k}")
    order = np.argsort(-scores, axis=-1, kind="stable")
    return order[..., :top_k]


def rank_labels(codebook: Codebook, decoded, top_k: int) -> list[tuple[int, float]]:
    scores = label_scores(codebook, decoded)
    if scores.ndim != 1:
        raise DimensionError("rank_labels takes a single decoded vector")
    top = top_k_by_score(scores, top_k)
    return [(int(i), float(scores[i])) for i in top]


def retrieval_accuracy(codebook: Codebook, labels: Iterable[int]) -> float:
    """Fraction of the encoded labels found in the top-k ranking, k = len(labels)."""
    ids = _label_ids(codebook, labels)
    k = ids.size
    decoded = decode(codebook, encode(codebook, ids))
    top = top_k_by_score(label_scores(codebook, decoded), k)
    return np.isin(top, ids).sum() / k


# --- persistence ------------------------------------------------------------

CODEBOOK_MAGIC = b"VSAC"
CODEBOOK_VERSION = 1
_HEADER = struct.Struct("<4sHBIIQ")


def codebook_to_bytes(codebook: Codebook) -> bytes:
    header = _HEADER.pack(CODEBOOK_MAGIC, CODEBOOK_VERSION, int(codebook.algebra),
                          codebook.dim, codebook.n_labels, codebook.seed & 0xFFFFFFFFFFFFFFFF)
    body = np.concatenate([codebook.concept[None, :], codebook.vectors]).astype("<f8")
    return header + body.tobytes()


def codebook_from_bytes(data: bytes) -> Codebook:
    if len(data) < _HEADER.size:
        raise ValueError("codebook file is truncated")
    magic, version, algebra, dim, n, seed = _HEADER.unpack_from(data)
    if magic != CODEBOOK_MAGIC:
        raise ValueError(f"not a codebook file (magic {magic!r})")
    if version != CODEBOOK_VERSION:
        raise ValueError(f"unsupported codebook version {version}")
    expected = _HEADER.size + 8 * dim * (n + 1)
    if len(data) != expected:
        raise ValueError(f"codebook file has {len(data)} bytes, expected {expected}")
    body = np.frombuffer(data, dtype="<f8", offset=_HEADER.size).astype(np.float64)
    body = body.reshape(n + 1, dim)
    return Codebook(Algebra(algebra), dim, seed, body[0].copy(), body[1:].copy())


def save_codebook(codebook: Codebook, path) -> None:
    Path(path).write_bytes(codebook_to_bytes(codebook))


def load_codebook(path) -> Codebook:
    return codebook_from_bytes(Path(path).read_bytes())
