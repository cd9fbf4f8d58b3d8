"""Haar wavelet coefficients of dyadic histograms and the multiscale sup metric.

A histogram with ``n = 2^(L+1)`` equal bins on [0, 1] has coefficients

    c[0]              = 2^-(L+1) * sum_j h_j
    c[2^l + k]        = 2^(-(L+1) + l/2) * (sum of h over the left half of the
                        k-th level-l dyadic interval - sum over its right half)

for ``l = 0..L`` and ``k = 0..2^l - 1``. ``2^((L+1)/2) W`` is orthogonal, so the
inverse is ``2^(L+1) W^T``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BadShape, InvalidParameter, TooLarge

MAX_BINS = 2**20
# above this many bins the O(n) pyramid is used instead of the dense matrix
DENSE_LIMIT = 2**10


@dataclass(frozen=True)
class HaarTransform:
    L: int
    matrix: np.ndarray

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def forward(self, heights) -> np.ndarray:
        return self.matrix @ np.asarray(heights, dtype=float)

    def inverse(self, coeffs) -> np.ndarray:
        return self.size * (self.matrix.T @ np.asarray(coeffs, dtype=float))


def _check_level(L: int, max_bins: int) -> int:
    if L < 0 or int(L) != L:
        raise InvalidParameter(f"level must be a nonnegative integer, got {L}")
    if 2 ** (int(L) + 1) > max_bins:
        raise TooLarge(f"2^{L + 1} bins exceeds the maximum of {max_bins}")
    return int(L)


def build_haar_matrix(L: int, max_bins: int = MAX_BINS) -> HaarTransform:
    """Dense ``W`` for ``2^(L+1)`` bins, built entry by entry from the indicator formula."""
    L = _check_level(L, max_bins)
    n = 2 ** (L + 1)
    W = np.empty((n, n))
    W[0] = 2.0 ** -(L + 1)
    j = np.arange(n)
    for l in range(L + 1):
        # bin j sits in level-(l+1) interval j // 2^(L-l)
        child = j // 2 ** (L - l)
        scale = 2.0 ** (-(L + 1) + l / 2)
        for k in range(2**l):
            W[2**l + k] = scale * ((child == 2 * k).astype(float) - (child == 2 * k + 1))
    return HaarTransform(L, W)


def _level_of(n: int) -> int:
    if n < 2 or n & (n - 1):
        raise BadShape(f"length must be a power of two >= 2, got {n}")
    return n.bit_length() - 2


def _fast_forward(h: np.ndarray, L: int) -> np.ndarray:
    out = np.empty_like(h)
    s = h
    for l in range(L, -1, -1):
        a, b = s[0::2], s[1::2]
        out[2**l : 2 ** (l + 1)] = 2.0 ** (-(L + 1) + l / 2) * (a - b)
        s = a + b
    out[0] = 2.0 ** -(L + 1) * s[0]
    return out


def _fast_inverse(c: np.ndarray, L: int) -> np.ndarray:
    s = np.array([2.0 ** (L + 1) * c[0]])
    for l in range(L + 1):
        d = c[2**l : 2 ** (l + 1)] / 2.0 ** (-(L + 1) + l / 2)
        nxt = np.empty(2 * s.size)
        nxt[0::2] = 0.5 * (s + d)
        nxt[1::2] = 0.5 * (s - d)
        s = nxt
    return s


def to_wavelet(heights, fast: bool | None = None) -> np.ndarray:
    """Haar coefficients ``W h`` of a histogram with a power-of-two number of bins."""
    h = np.asarray(heights, dtype=float)
    if h.ndim != 1:
        raise BadShape("heights must be one-dimensional")
    L = _level_of(h.size)
    _check_level(L, MAX_BINS)
    if fast is None:
        fast = h.size > DENSE_LIMIT
    return _fast_forward(h, L) if fast else build_haar_matrix(L).forward(h)


def to_heights(coeffs, fast: bool | None = None) -> np.ndarray:
    """Inverse of :func:`to_wavelet`."""
    c = np.asarray(coeffs, dtype=float)
    if c.ndim != 1:
        raise BadShape("coefficients must be one-dimensional")
    L = _level_of(c.size)
    _check_level(L, MAX_BINS)
    if fast is None:
        fast = c.size > DENSE_LIMIT
    return _fast_inverse(c, L) if fast else build_haar_matrix(L).inverse(c)


def ell_infty_distance(coeffs_f, coeffs_g) -> float:
    """``|f_-1 - g_-1| + sum_l 2^(l/2) max_k |f_lk - g_lk|``."""
    f = np.asarray(coeffs_f, dtype=float)
    g = np.asarray(coeffs_g, dtype=float)
    if f.shape != g.shape:
        raise BadShape(f"shape mismatch {f.shape} vs {g.shape}")
    L = _level_of(f.size)
    diff = np.abs(f - g)
    total = diff[0]
    for l in range(L + 1):
        total += math.sqrt(2.0**l) * diff[2**l : 2 ** (l + 1)].max()
    return float(total)
