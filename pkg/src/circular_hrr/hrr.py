"""Real-valued holographic reduced representations.

Vectors are plain float64 numpy arrays. Every operation acts on the last
axis, so a stack of vectors with shape ``(n, d)`` is processed row by row.

Transform convention: the forward DFT is unnormalized and the inverse
carries ``1/d`` (numpy's default), so a vector whose spectrum has unit
magnitude in every bin has unit Euclidean norm.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, SingularSpectrumError

#: Bins below this magnitude are replaced by ``1+0j`` during projection.
PROJECT_FLOOR = 1e-15
#: Bins below this magnitude make a vector non-invertible.
INVERT_FLOOR = 1e-12


def _as_vector(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 0 or x.shape[-1] < 1:
        raise DimensionError("HRR vectors need at least one component")
    return x


def _check_same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape[-1] != b.shape[-1]:
        raise DimensionError(f"dimension mismatch: {a.shape[-1]} vs {b.shape[-1]}")


def sample_gaussian(d: int, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Draw components i.i.d. from N(0, 1/d).

    With ``size`` given, returns ``size`` vectors stacked as ``(size, d)``;
    the stream is consumed in row order, so row ``i`` equals the ``i``-th
    of ``size`` consecutive single draws.
    """
    if d < 1:
        raise DimensionError(f"dimension must be positive, got {d}")
    shape = (d,) if size is None else (size, d)
    return rng.normal(0.0, 1.0 / np.sqrt(d), size=shape)


def dft(x) -> np.ndarray:
    """Full complex spectrum of a real vector (unnormalized)."""
    return np.fft.fft(_as_vector(x), axis=-1)


def idft(spectrum) -> np.ndarray:
    """Inverse of :func:`dft`, returning the real part."""
    return np.fft.ifft(np.asarray(spectrum), axis=-1).real


def project(x) -> np.ndarray:
    """Rescale every spectral bin to unit magnitude, keeping its phase."""
    x = _as_vector(x)
    d = x.shape[-1]
    f = np.fft.rfft(x, axis=-1)
    mag = np.abs(f)
    tiny = mag < PROJECT_FLOOR
    f = np.where(tiny, 1.0 + 0.0j, f / np.where(tiny, 1.0, mag))
    return np.fft.irfft(f, n=d, axis=-1)


def bind(a, b) -> np.ndarray:
    """Circular convolution via the FFT."""
    a = _as_vector(a)
    b = _as_vector(b)
    _check_same_dim(a, b)
    d = a.shape[-1]
    return np.fft.irfft(np.fft.rfft(a, axis=-1) * np.fft.rfft(b, axis=-1), n=d, axis=-1)


def invert(a) -> np.ndarray:
    """Exact inverse under :func:`bind`: the vector whose spectrum is ``1/F(a)``.

    Raises :class:`SingularSpectrumError` naming the first offending bin
    when any spectral magnitude falls below ``INVERT_FLOOR``.
    """
    a = _as_vector(a)
    d = a.shape[-1]
    f = np.fft.rfft(a, axis=-1)
    mag = np.abs(f)
    bad = np.argwhere(mag < INVERT_FLOOR)
    if bad.size:
        idx = tuple(bad[0])
        raise SingularSpectrumError(int(idx[-1]), float(mag[idx]))
    return np.fft.irfft(1.0 / f, n=d, axis=-1)


def approx_invert(a) -> np.ndarray:
    """The involution ``a*[i] = a[-i mod d]``, the classic approximate inverse.

    Its spectrum is the conjugate of ``F(a)``, so it equals :func:`invert`
    exactly when every bin of ``a`` has unit magnitude and only approximates
    it otherwise. It never fails on a singular spectrum.
    """
    a = _as_vector(a)
    return np.roll(np.flip(a, axis=-1), 1, axis=-1)


def identity(d: int) -> np.ndarray:
    """The delta vector ``[1, 0, ..., 0]``, the unit of :func:`bind`."""
    if d < 1:
        raise DimensionError(f"dimension must be positive, got {d}")
    e = np.zeros(d)
    e[0] = 1.0
    return e


def dot(a, b) -> np.ndarray | float:
    a = _as_vector(a)
    b = _as_vector(b)
    _check_same_dim(a, b)
    return np.sum(a * b, axis=-1)


def similarity(a, b) -> np.ndarray | float:
    """Cosine similarity along the last axis (broadcasting over the rest)."""
    a = _as_vector(a)
    b = _as_vector(b)
    _check_same_dim(a, b)
    na = np.linalg.norm(a, axis=-1)
    nb = np.linalg.norm(b, axis=-1)
    if np.any(na == 0) or np.any(nb == 0):
        raise ValueError("cosine similarity is undefined for a zero vector")
    return np.sum(a * b, axis=-1) / (na * nb)


def superpose(a, b) -> np.ndarray:
    a = _as_vector(a)
    b = _as_vector(b)
    _check_same_dim(a, b)
    return a + b
