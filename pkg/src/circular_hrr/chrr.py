"""Circular holographic reduced representations.

A circular vector stores one angle per slot, in radians, always in the
canonical interval ``(-pi, pi]``. Unit phasors ``exp(i*angle)`` only exist
transiently inside :func:`superpose` and :func:`superpose_many`.

Binding is slotwise angle addition, unbinding adds the negated cue, and
similarity is the mean cosine of the slotwise differences. Superposition
takes the angle of the phasor sum, so its result is unitary by
construction. Pairwise :func:`superpose` is commutative but not
associative; encode many items with :func:`superpose_many`.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import DimensionError

TWO_PI = 2.0 * np.pi
#: Phasor sums shorter than this have no meaningful angle; they map to 0.
DEGENERATE_SUM = 1e-12


def canonicalize(angle):
    """Wrap angles into ``(-pi, pi]``.

    Values already in range pass through untouched, so canonical inputs
    are never perturbed by rounding. ``-pi`` maps to ``pi``.
    """
    a = np.asarray(angle, dtype=np.float64)
    if not np.all(np.isfinite(a)):
        raise ValueError("cannot canonicalize a non-finite angle")
    out = np.array(a, copy=True)
    wrap = (out <= -np.pi) | (out > np.pi)
    if np.any(wrap):
        out[wrap] = np.pi - np.mod(np.pi - out[wrap], TWO_PI)
        # np.mod can round up to exactly 2*pi
        out[out <= -np.pi] = np.pi
    if np.ndim(angle) == 0:
        return float(out)
    return out


def _as_vector(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 0 or x.shape[-1] < 1:
        raise DimensionError("circular vectors need at least one slot")
    return x


def _check_same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape[-1] != b.shape[-1]:
        raise DimensionError(f"dimension mismatch: {a.shape[-1]} vs {b.shape[-1]}")


def sample_uniform(d: int, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Draw angles i.i.d. uniform on ``(-pi, pi]``."""
    if d < 1:
        raise DimensionError(f"dimension must be positive, got {d}")
    shape = (d,) if size is None else (size, d)
    # uniform on [0, 2pi) reflected onto (-pi, pi]
    return np.pi - rng.uniform(0.0, TWO_PI, size=shape)


def zero(d: int) -> np.ndarray:
    """The binding identity."""
    if d < 1:
        raise DimensionError(f"dimension must be positive, got {d}")
    return np.zeros(d)


def bind(phi, theta) -> np.ndarray:
    phi = _as_vector(phi)
    theta = _as_vector(theta)
    _check_same_dim(phi, theta)
    return canonicalize(phi + theta)


def invert(theta) -> np.ndarray:
    return canonicalize(-_as_vector(theta))


def similarity(phi, theta):
    """Mean of ``cos(phi_j - theta_j)``; broadcasts over leading axes."""
    phi = _as_vector(phi)
    theta = _as_vector(theta)
    _check_same_dim(phi, theta)
    return np.mean(np.cos(phi - theta), axis=-1)


def _phasor_angle(re: np.ndarray, im: np.ndarray) -> np.ndarray:
    out = np.arctan2(im, re)
    out[np.hypot(re, im) < DEGENERATE_SUM] = 0.0
    return canonicalize(out)


def superpose(phi, theta) -> np.ndarray:
    """Angle of ``exp(i*phi) + exp(i*theta)``, slotwise."""
    phi = _as_vector(phi)
    theta = _as_vector(theta)
    _check_same_dim(phi, theta)
    # fixed operand order per slot keeps the result commutative bit for bit
    lo = np.minimum(phi, theta)
    hi = np.maximum(phi, theta)
    return _phasor_angle(np.cos(lo) + np.cos(hi), np.sin(lo) + np.sin(hi))


def superpose_many(vs: Sequence[np.ndarray] | np.ndarray) -> np.ndarray:
    """Angle of the sum of all unit phasors in one pass.

    Per slot, the angles are sorted before accumulation, which makes the
    result bitwise independent of input order.
    """
    stack = np.asarray(vs, dtype=np.float64)
    if stack.ndim != 2 or stack.shape[0] == 0:
        raise ValueError("superpose_many needs a non-empty list of equal-length vectors")
    if stack.shape[1] < 1:
        raise DimensionError("circular vectors need at least one slot")
    if stack.shape[0] == 1:
        return canonicalize(stack[0])
    stack = np.sort(stack, axis=0)
    return _phasor_angle(np.cos(stack).sum(axis=0), np.sin(stack).sum(axis=0))
