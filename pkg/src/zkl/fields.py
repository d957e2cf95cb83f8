"""Spectral vector calculus on a :class:`PeriodicGrid`.

One-dimensional grids carry fields that depend on ``x_3`` only, so the
gradient is ``(0, 0, d/dx_3)``. Vector fields always have three components.
"""
from __future__ import annotations

import numpy as np

from .semiclassical_ops import PeriodicGrid


def wave_vectors(grid: PeriodicGrid, drop_nyquist: bool = True) -> np.ndarray:
    """Wave vectors, shape ``(3, *grid.shape)``. The Nyquist row is zeroed
    by default so odd derivatives of real fields stay real."""
    k = grid.wavenumbers()
    if drop_nyquist:
        nyq = np.pi * grid.points_per_axis / grid.period
        k = np.where(np.isclose(np.abs(k), nyq), 0.0, k)
    out = np.zeros((3,) + grid.shape)
    if grid.dim == 1:
        out[2] = k[0]
    else:
        out[:] = k
    return out


def _fwd(f, grid):
    return grid.forward(f)


def _inv(fh, grid, real: bool):
    out = grid.inverse(fh)
    return out.real if real else out


def gradient(f, grid: PeriodicGrid) -> np.ndarray:
    k = wave_vectors(grid)
    return _inv(1j * k * _fwd(f, grid)[None], grid, np.isrealobj(f))


def divergence(F, grid: PeriodicGrid) -> np.ndarray:
    k = wave_vectors(grid)
    return _inv(np.sum(1j * k * _fwd(F, grid), axis=0), grid, np.isrealobj(F))


def curl(F, grid: PeriodicGrid) -> np.ndarray:
    k = wave_vectors(grid)
    return _inv(np.cross(1j * k, _fwd(F, grid), axis=0), grid, np.isrealobj(F))


def laplacian(f, grid: PeriodicGrid) -> np.ndarray:
    k2 = np.sum(wave_vectors(grid, drop_nyquist=False) ** 2, axis=0)
    return _inv(-k2 * _fwd(f, grid), grid, np.isrealobj(f))


def directional(v, f, grid: PeriodicGrid) -> np.ndarray:
    """``(v . grad) f`` for a scalar or a stack of scalars ``f``."""
    f = np.asarray(f)
    if f.ndim == len(grid.shape):
        return np.sum(v * gradient(f, grid), axis=0)
    return np.array([np.sum(v * gradient(c, grid), axis=0) for c in f])


def leray(F, grid: PeriodicGrid) -> np.ndarray:
    """Divergence-free part of a vector field (mean kept)."""
    k = wave_vectors(grid)
    k2 = np.sum(k**2, axis=0)
    Fh = _fwd(F, grid)
    safe = np.where(k2 > 0, k2, 1.0)
    Fh = Fh - k * np.sum(k * Fh, axis=0) / safe
    return _inv(Fh, grid, np.isrealobj(F))


def inverse_gradient_potential(f, grid: PeriodicGrid) -> np.ndarray:
    """Curl-free ``V`` with ``div V = f`` (``f`` of zero mean): ``V = grad lap^{-1} f``."""
    k = wave_vectors(grid)
    k2 = np.sum(k**2, axis=0)
    fh = _fwd(f, grid)
    safe = np.where(k2 > 0, k2, 1.0)
    Vh = np.where(k2 > 0, -1j * k * fh / safe, 0.0)
    return _inv(Vh, grid, np.isrealobj(f))


def sup(f) -> float:
    return float(np.max(np.abs(f))) if np.size(f) else 0.0
