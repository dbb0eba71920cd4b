"""Real and circular holographic reduced representations for multi-label learning."""

from . import chrr, codec, datasets, experiments, hrr, metrics, neural
from .codec import Algebra, Codebook, decode, encode, generate_codebook, rank_labels

__version__ = "0.1.0"

__all__ = [
    "Algebra", "Codebook", "chrr", "codec", "datasets", "decode", "encode",
    "experiments", "generate_codebook", "hrr", "metrics", "neural", "rank_labels",
]
