"""Finite-difference stencils, cumulative quadrature and resampling on uniform grids."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import GridError

MIN_POINTS = 7


@lru_cache(maxsize=None)
def fd_weights(offsets: tuple[int, ...], order: int) -> np.ndarray:
    """Weights w with Σ w_j f(x + o_j h) ≈ h^order f^(order)(x).

    Solved from the Taylor moment conditions; the offsets are small so the
    Vandermonde system is well conditioned.
    """
    k = len(offsets)
    if order >= k:
        raise GridError(f"{k} points cannot resolve derivative order {order}")
    o = np.asarray(offsets, dtype=float)
    A = np.vander(o, k, increasing=True).T
    rhs = np.zeros(k)
    rhs[order] = float(np.prod(np.arange(1, order + 1)))
    return np.linalg.solve(A, rhs)


def derivative(u: np.ndarray, h: float, *, order: int = 1, accuracy: int = 4, axis: int = -1) -> np.ndarray:
    """Derivative along ``axis`` with centered interior and one-sided edge stencils."""
    u = np.asarray(u)
    N = u.shape[axis]
    if N < MIN_POINTS:
        raise GridError(f"need at least {MIN_POINTS} samples, got {N}")
    half = (order + accuracy - 1) // 2
    width = 2 * half + 1
    u = np.moveaxis(u, axis, 0)
    out = np.zeros_like(u, dtype=np.result_type(u, float))
    w = fd_weights(tuple(range(-half, half + 1)), order)
    for j, wj in zip(range(-half, half + 1), w):
        out[half:N - half] += wj * u[half + j:N - half + j]
    for i in list(range(half)) + list(range(N - half, N)):
        start = min(max(i - half, 0), N - width - 1)
        offs = tuple(range(start - i, start - i + width + 1))
        wi = fd_weights(offs, order)
        out[i] = np.tensordot(wi, u[start:start + width + 1], axes=(0, 0))
    return np.moveaxis(out / h**order, 0, axis)


def cumulative_integral(u: np.ndarray, h: float, *, axis: int = -1) -> np.ndarray:
    """∫_{x0}^{x_k} u, trapezoid plus the endpoint correction −h²/12 (u'_k − u'_0)."""
    u = np.moveaxis(np.asarray(u, dtype=float), axis, 0)
    trap = np.zeros_like(u)
    trap[1:] = np.cumsum(0.5 * h * (u[1:] + u[:-1]), axis=0)
    du = derivative(u, h, axis=0)
    out = trap - (h * h / 12.0) * (du - du[0])
    return np.moveaxis(out, 0, axis)


def reverse_cumulative_integral(u: np.ndarray, h: float, *, axis: int = -1) -> np.ndarray:
    """∫_{x_k}^{x_end} u with the same correction, computed on the reversed axis."""
    u = np.moveaxis(np.asarray(u, dtype=float), axis, 0)
    out = cumulative_integral(u[::-1], h, axis=0)[::-1]
    return np.moveaxis(out, 0, axis)


def trapezoid_weights(N: int, h: float) -> np.ndarray:
    w = np.full(N, h)
    w[0] = w[-1] = 0.5 * h
    return w


def shift_open(u: np.ndarray, offset: float, n_out: int | None = None, *, axis: int = -1) -> np.ndarray:
    """Sample ``u`` at fractional positions ``offset + i`` along a non-periodic axis.

    Integer parts move by index with zero fill; the remaining fraction is a
    band-limited phase shift on a zero-padded copy, accurate for well
    resolved, compactly supported data.
    """
    u = np.moveaxis(np.asarray(u), axis, 0)
    N = u.shape[0]
    n_out = N if n_out is None else n_out
    k = int(np.floor(offset))
    frac = offset - k
    if frac > 1e-14:
        pad = N
        padded = np.concatenate([np.zeros((pad,) + u.shape[1:]), u, np.zeros((pad,) + u.shape[1:])])
        freqs = np.fft.fftfreq(padded.shape[0])
        phase = np.exp(2j * np.pi * freqs * frac).reshape((-1,) + (1,) * (u.ndim - 1))
        moved = np.fft.ifft(np.fft.fft(padded, axis=0) * phase, axis=0)
        moved = moved.real if not np.iscomplexobj(u) else moved
        src = moved[pad:pad + N]
    else:
        src = u
    out = np.zeros((n_out,) + u.shape[1:], dtype=src.dtype)
    lo = max(0, -k)
    hi = min(n_out, N - k)
    if hi > lo:
        out[lo:hi] = src[lo + k:hi + k]
    return np.moveaxis(out, 0, axis)


def shift_periodic(u: np.ndarray, offset: float, *, axis: int = -1) -> np.ndarray:
    """Sample a periodic array at ``offset + i``: a roll for integers, FFT phase otherwise."""
    k = int(np.round(offset))
    if abs(offset - k) < 1e-14:
        return np.roll(u, -k, axis=axis)
    u = np.moveaxis(np.asarray(u), axis, 0)
    freqs = np.fft.fftfreq(u.shape[0])
    phase = np.exp(2j * np.pi * freqs * offset).reshape((-1,) + (1,) * (u.ndim - 1))
    moved = np.fft.ifft(np.fft.fft(u, axis=0) * phase, axis=0)
    moved = moved.real if not np.iscomplexobj(u) else moved
    return np.moveaxis(moved, 0, axis)


def smoothstep(x: np.ndarray) -> np.ndarray:
    """C∞ transition: 0 for x ≤ 0, 1 for x ≥ 1."""
    x = np.asarray(x, dtype=float)
    def g(y):
        out = np.zeros_like(y)
        pos = y > 0
        out[pos] = np.exp(-1.0 / y[pos])
        return out
    a, b = g(x), g(1.0 - x)
    return a / (a + b)


def bump(x: np.ndarray, center: float, radius: float) -> np.ndarray:
    """Compactly supported C∞ bump, peak value 1."""
    r = (np.asarray(x, dtype=float) - center) / radius
    out = np.zeros_like(r)
    inside = np.abs(r) < 1
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - r[inside] ** 2))
    return out


def gaussian(x: np.ndarray, center: float, width: float) -> np.ndarray:
    return np.exp(-0.5 * ((np.asarray(x, dtype=float) - center) / width) ** 2)
