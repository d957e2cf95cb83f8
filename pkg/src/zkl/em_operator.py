"""Right-hand side of the log-density Euler-Maxwell system on a periodic grid.

``du/dt = -eps^-2 op(i H(eps k)) u + N(u)`` with ``H`` the constant Hermitian
rest symbol and ``N`` collecting the quadratic source, the remainder source and
both convection terms.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from . import fields
from .model import (NE_INDEX, VE_SLICE, VI_SLICE, W_INDEX, PlasmaParams,
                    bilinear_B, gauss_residual, rest_symbol, source_G)
from .semiclassical_ops import PeriodicGrid


def scaled_frequencies(grid: PeriodicGrid, eps: float) -> np.ndarray:
    """``eps k`` per grid frequency, shape ``(*grid.shape, 3)`` (Nyquist zeroed)."""
    return np.moveaxis(eps * fields.wave_vectors(grid), 0, -1)


def _spectral_apply(mats, u, grid: PeriodicGrid):
    uh = grid.forward(u)
    out = np.einsum("...ij,j...->i...", mats, uh)
    return grid.inverse(out).real


def linear_rhs(u, params: PlasmaParams, grid: PeriodicGrid) -> np.ndarray:
    eps = params.eps
    H = rest_symbol(eps, params.theta_e, params.alpha, scaled_frequencies(grid, eps))
    return _spectral_apply(-1j * H / eps**2, u, grid)


def nonlinear_rhs(u, params: PlasmaParams, grid: PeriodicGrid) -> np.ndarray:
    eps, te = params.eps, params.theta_e
    out = bilinear_B(u, u, te) / eps + source_G(params, u)
    out[6:10] -= te * fields.directional(u[VE_SLICE], u[6:10], grid)
    out[10:14] -= eps * fields.directional(u[VI_SLICE], u[10:14], grid)
    return out


def em_rhs(u, params: PlasmaParams, grid: PeriodicGrid) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    return linear_rhs(u, params, grid) + nonlinear_rhs(u, params, grid)


@lru_cache(maxsize=32)
def _propagator(eps, theta_e, alpha, grid: PeriodicGrid, dt):
    H = rest_symbol(eps, theta_e, alpha, scaled_frequencies(grid, eps))
    lam, V = np.linalg.eigh(H)
    phase = np.exp(-1j * dt * lam / eps**2)
    P = np.einsum("...ij,...j,...kj->...ik", V, phase, V.conj())
    P.setflags(write=False)
    return P


def linear_propagator(params: PlasmaParams, grid: PeriodicGrid, dt: float) -> np.ndarray:
    """Exact flow matrices ``exp(-i dt H(eps k) / eps^2)`` per frequency, cached and read-only."""
    return _propagator(params.eps, params.theta_e, params.alpha, grid, float(dt))


def apply_linear_flow(u, params: PlasmaParams, grid: PeriodicGrid, dt: float) -> np.ndarray:
    return _spectral_apply(linear_propagator(params, grid, dt), u, grid)


def gauss_field(u, params: PlasmaParams, grid: PeriodicGrid) -> np.ndarray:
    """Pointwise Gauss-law residual, zero for consistent data at all times."""
    return gauss_residual(params, fields.divergence(u[3:6], grid), u[NE_INDEX], u[W_INDEX])
