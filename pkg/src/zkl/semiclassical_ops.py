"""Semiclassical Sobolev norms, quantization and paradifferential smoothing on a torus.

Frequencies live on the lattice ``2 pi / period * Z^d``. Fourier coefficients are
normalized as ``fft(values) / n_total`` so that a single mode ``exp(i k x)`` has
coefficient one.

Paradifferential smoothing is applied to the rescaled symbol ``q(eps x, xi)``:
an x-frequency ``eta`` of ``q`` is weighed by ``psi(eps * eta, eps * k)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .resonance import smooth_step

ORACLE_MAX_POINTS = 2**14
PLATEAU_IN = 1.1
PLATEAU_OUT = 1.9


@dataclass(frozen=True)
class PeriodicGrid:
    dim: int = 1
    points_per_axis: int = 64
    period: float = 2 * np.pi

    def __post_init__(self):
        if self.dim not in (1, 3):
            raise ValueError("dim must be 1 or 3")
        n = self.points_per_axis
        if n < 2 or n & (n - 1):
            raise ValueError("points_per_axis must be a power of two")
        if self.period <= 0:
            raise ValueError("period must be positive")

    @property
    def shape(self) -> tuple:
        return (self.points_per_axis,) * self.dim

    @property
    def size(self) -> int:
        return self.points_per_axis**self.dim

    @property
    def cell_volume(self) -> float:
        return (self.period / self.points_per_axis) ** self.dim

    def axis(self) -> np.ndarray:
        return np.arange(self.points_per_axis) * (self.period / self.points_per_axis)

    def coordinates(self) -> np.ndarray:
        """Array of shape ``(dim, *shape)``."""
        return np.array(np.meshgrid(*([self.axis()] * self.dim), indexing="ij"))

    def axis_wavenumbers(self) -> np.ndarray:
        n = self.points_per_axis
        return np.fft.fftfreq(n, d=1.0 / n) * (2 * np.pi / self.period)

    def wavenumbers(self) -> np.ndarray:
        """Array of shape ``(dim, *shape)``."""
        return np.array(np.meshgrid(*([self.axis_wavenumbers()] * self.dim), indexing="ij"))

    def wavenumber_norm(self) -> np.ndarray:
        return np.sqrt(np.sum(self.wavenumbers() ** 2, axis=0))

    def _axes(self, values) -> tuple:
        return tuple(range(np.ndim(values) - self.dim, np.ndim(values)))

    def forward(self, values) -> np.ndarray:
        return np.fft.fftn(values, axes=self._axes(values)) / self.size

    def inverse(self, coeffs) -> np.ndarray:
        return np.fft.ifftn(coeffs, axes=self._axes(coeffs)) * self.size


# -- norms ------------------------------------------------------------------

def hs_eps_norm(values, eps: float, s: float, grid: PeriodicGrid) -> float:
    """``|| (1 + |eps k|^2)^{s/2} hat v ||`` on the torus (L2-normalized by volume).

    ``values`` has shape ``grid.shape`` or ``(components, *grid.shape)``.
    """
    return spectral_norm(grid.forward(np.asarray(values)), eps, s, grid)


def spectral_norm(coeffs, eps: float, s: float, grid: PeriodicGrid) -> float:
    weight = (1.0 + (eps * grid.wavenumber_norm()) ** 2) ** s
    volume = grid.period**grid.dim
    return float(np.sqrt(volume * np.sum(weight * np.abs(coeffs) ** 2)))


def dilate(values, grid: PeriodicGrid, eps: float):
    """Samples and grid of ``eps^{d/2} v(eps x)``: same samples on a period ``period / eps``."""
    new = PeriodicGrid(grid.dim, grid.points_per_axis, grid.period / eps)
    return eps ** (grid.dim / 2) * np.asarray(values), new


# -- symbols ------------------------------------------------------------------

@dataclass
class Multiplier:
    """Fourier multiplier ``p(xi)``; ``fn`` takes an array ``(dim, ...)``."""
    fn: Callable


@dataclass
class ProductSymbol:
    """``sum_i p1_i(v(x)) p2_i(xi)`` with scalar factors."""
    terms: Sequence[tuple]

    def __call__(self, v, xi):
        return sum(p1(v) * p2(xi) for p1, p2 in self.terms)

    def conj(self) -> "ProductSymbol":
        return ProductSymbol([(lambda v, f=p1: np.conj(f(v)), lambda xi, g=p2: np.conj(g(xi)))
                              for p1, p2 in self.terms])

    def times(self, other: "ProductSymbol") -> "ProductSymbol":
        return ProductSymbol([(lambda v, f=a, g=c: f(v) * g(v), lambda xi, f=b, g=d: f(xi) * g(xi))
                              for a, b in self.terms for c, d in other.terms])


@dataclass
class GeneralSymbol:
    """Arbitrary scalar ``q(v, xi)``; quantized by the direct double sum only."""
    fn: Callable


def _scaled_xi(grid: PeriodicGrid, eps: float) -> np.ndarray:
    return eps * grid.wavenumbers()


def quantize(symbol, v, u, eps: float, grid: PeriodicGrid, oracle: bool = False) -> np.ndarray:
    """``op_eps(q) u`` with ``q(x, xi) = symbol(v(x), xi)``.

    Multipliers act diagonally in spectrum; product symbols are applied as
    pointwise multiplication after a multiplier. ``oracle=True`` (forced for
    ``GeneralSymbol``) evaluates the double sum ``sum_k e^{ikx} q(v(x), eps k) u_k``
    and is restricted to grids of at most ``2**14`` points.
    """
    u = np.asarray(u)
    if isinstance(symbol, Multiplier):
        return grid.inverse(symbol.fn(_scaled_xi(grid, eps)) * grid.forward(u))
    if isinstance(symbol, ProductSymbol) and not oracle:
        uh = grid.forward(u)
        xi = _scaled_xi(grid, eps)
        return sum(p1(v) * grid.inverse(p2(xi) * uh) for p1, p2 in symbol.terms)
    if isinstance(symbol, (ProductSymbol, GeneralSymbol)):
        fn = symbol.fn if isinstance(symbol, GeneralSymbol) else symbol
        return _oracle(fn, v, u, eps, grid)
    raise TypeError(f"unsupported symbol type {type(symbol).__name__}")


def _oracle(fn, v, u, eps, grid: PeriodicGrid) -> np.ndarray:
    if grid.size > ORACLE_MAX_POINTS:
        raise ValueError(f"oracle quantization limited to {ORACLE_MAX_POINTS} grid points, got {grid.size}")
    x = grid.coordinates().reshape(grid.dim, -1)
    k = grid.wavenumbers().reshape(grid.dim, -1)
    vx = np.asarray(v).reshape(-1)
    q = fn(vx[:, None], eps * k[:, None, :])                 # (Nx, Nk)
    kernel = np.exp(1j * (x.T @ k)) * q
    uh = grid.forward(u)
    lead = uh.shape[:-grid.dim]
    flat = uh.reshape(lead + (-1,))
    out = np.tensordot(flat, kernel, axes=([-1], [1]))
    return out.reshape(lead + grid.shape)


# -- paradifferential cutoff -------------------------------------------------

def plateau(t):
    """Radial cutoff: 1 for ``|t| <= 1.1``, 0 for ``|t| >= 1.9``."""
    return 1.0 - smooth_step((np.abs(np.asarray(t, dtype=float)) - PLATEAU_IN) / (PLATEAU_OUT - PLATEAU_IN))


def dyadic_piece(k: int, xi_norm):
    """``phi_k``: consecutive differences of the plateau in ``2^{-k} <xi>``."""
    br = np.sqrt(1.0 + np.asarray(xi_norm, dtype=float) ** 2)
    head = plateau(2.0**-k * br)
    return head if k == 0 else head - plateau(2.0 ** -(k - 1) * br)


def psi(eta_norm, xi_norm):
    """``sum_k chi(2^{3-k} eta) phi_k(xi)`` over the dyadic blocks that can be nonzero."""
    eta_norm = np.asarray(eta_norm, dtype=float)
    xi_norm = np.asarray(xi_norm, dtype=float)
    top = float(np.max(np.sqrt(1.0 + xi_norm**2))) if xi_norm.size else 1.0
    k_max = int(np.ceil(np.log2(top))) + 2
    out = np.zeros(np.broadcast(eta_norm, xi_norm).shape)
    for k in range(k_max + 1):
        out = out + plateau(2.0 ** (3 - k) * eta_norm) * dyadic_piece(k, xi_norm)
    return out


def _para_columns(symbol, v, uh, eps, grid: PeriodicGrid, cutoff: bool, tol: float):
    """Output spectrum of ``op_eps(q)`` or ``op_eps^psi(q)`` applied to coefficients ``uh``."""
    if isinstance(symbol, Multiplier):
        return symbol.fn(_scaled_xi(grid, eps)) * uh
    if not isinstance(symbol, ProductSymbol):
        raise TypeError("paradifferential smoothing needs a multiplier or a product symbol")
    waves = grid.wavenumbers()
    knorm = grid.wavenumber_norm()
    scale = np.max(np.abs(uh))
    out = np.zeros(uh.shape, dtype=complex)
    if scale == 0.0:
        return out
    significant = np.argwhere(np.abs(uh) > tol * scale)
    for p1, p2 in symbol.terms:
        qh = grid.forward(p1(v))
        for idx in map(tuple, significant):
            k_vec = waves[(slice(None),) + idx]
            term = qh * p2(eps * k_vec.reshape((grid.dim,) + (1,) * grid.dim))
            if cutoff:
                term = term * psi(eps * knorm, eps * np.linalg.norm(k_vec))
            out += np.roll(term, shift=idx, axis=tuple(range(grid.dim))) * uh[idx]
    return out


def para_smooth(symbol, v, u, eps: float, grid: PeriodicGrid, tol: float = 0.0) -> np.ndarray:
    """``op_eps^psi(q) u``: the symbol's x-spectrum is cut by ``psi(eps eta, eps k)``.

    Input frequencies with ``|u_k| <= tol * max |u|`` are skipped. Scalar symbols;
    a leading component axis on ``u`` is not supported here.
    """
    uh = grid.forward(np.asarray(u))
    return grid.inverse(_para_columns(symbol, v, uh, eps, grid, True, tol))


def para_remainder(symbol, v, u, eps: float, grid: PeriodicGrid, tol: float = 0.0) -> np.ndarray:
    """``(op_eps - op_eps^psi)(q) u`` computed column by column in spectrum."""
    uh = grid.forward(np.asarray(u))
    full = _para_columns(symbol, v, uh, eps, grid, False, tol)
    smooth = _para_columns(symbol, v, uh, eps, grid, True, tol)
    return grid.inverse(full - smooth)


def para_matrix(symbol, v, eps: float, grid: PeriodicGrid) -> np.ndarray:
    """Matrix of ``op_eps^psi(q)`` on Fourier coefficients (columns = input modes)."""
    n = grid.size
    out = np.zeros((n, n), dtype=complex)
    for col in range(n):
        e = np.zeros(n, dtype=complex)
        e[col] = 1.0
        out[:, col] = _para_columns(symbol, v, e.reshape(grid.shape), eps, grid, True, 0.0).reshape(-1)
    return out


# -- scaling studies ------------------------------------------------------------

def d0_for(dim: int) -> int:
    return 1 if dim == 1 else 2


def critical_profile(grid: PeriodicGrid, s: float) -> np.ndarray:
    """Real profile with spectrum ``<eta>^{-(s + d/2)}``: the borderline of ``H^s``."""
    k = grid.wavenumber_norm()
    coeffs = (1.0 + k**2) ** (-(s + grid.dim / 2) / 2) * np.exp(0.3j * np.sum(grid.wavenumbers(), axis=0))
    v = grid.inverse(coeffs).real
    return v / np.max(np.abs(v))


def oscillatory_profile(grid: PeriodicGrid, eps: float, width: float = 2.0) -> np.ndarray:
    """``phi(x) exp(i x_1 / eps)`` with a gaussian envelope centred in the box."""
    x = grid.coordinates()
    r2 = np.sum((x - grid.period / 2) ** 2, axis=0)
    return np.exp(-r2 / width**2) * np.exp(1j * x[0] / eps)


def _smooth_test_field(grid: PeriodicGrid) -> np.ndarray:
    x = grid.coordinates()
    return np.exp(np.cos(2 * np.pi * x[0] / grid.period))


def _fit_slope(eps_list, values) -> float:
    return float(np.polyfit(np.log(eps_list), np.log(values), 1)[0])


DEFAULT_EPS = tuple(2.0**-m for m in range(2, 7))


def remainder_study(s: float = 4.0, eps_list=DEFAULT_EPS, profile: str = "critical",
                    grid: PeriodicGrid | None = None, m: float = 0.0):
    """Ratio ``||(op - op^psi)(p(v)) u||_{eps,s} / (||v||_{eps,s} ||u||_{eps,m+d0})`` per eps.

    The symbol is ``sin(v) <xi>^{-1}`` (order zero, vanishing at ``v = 0``).
    Returns ``(ratios, slope)``.
    """
    grid = grid or PeriodicGrid(1, 2048, 16 * np.pi)
    symbol = ProductSymbol([(np.sin, lambda xi: 1.0 / np.sqrt(1.0 + np.sum(xi**2, axis=0)))])
    u = _smooth_test_field(grid)
    d0 = d0_for(grid.dim)
    ratios = []
    for eps in eps_list:
        v = critical_profile(grid, s) if profile == "critical" else oscillatory_profile(grid, eps)
        rem = para_remainder(symbol, v, u, eps, grid, tol=1e-15)
        ratios.append(hs_eps_norm(rem, eps, s, grid)
                      / (hs_eps_norm(v, eps, s, grid) * hs_eps_norm(u, eps, m + d0, grid)))
    ratios = np.array(ratios)
    return ratios, _fit_slope(eps_list, ratios)


def _bench_symbols():
    odd = ProductSymbol([(lambda v: v, lambda xi: xi[0] / np.sqrt(1.0 + xi[0] ** 2))])
    even = ProductSymbol([(np.sin, lambda xi: 1.0 / np.sqrt(1.0 + xi[0] ** 2))])
    return odd, even


def composition_study(eps_list=DEFAULT_EPS, grid: PeriodicGrid | None = None):
    """``||(op^psi(p1) op^psi(p2) - op^psi(p1 p2)) u|| / ||u||_{eps,1}`` per eps, and its slope."""
    grid = grid or PeriodicGrid(1, 512, 8 * np.pi)
    x = grid.coordinates()[0]
    v = np.cos(2 * np.pi * x / grid.period) + 0.5 * np.sin(4 * np.pi * x / grid.period)
    p1, p2 = _bench_symbols()
    prod = p1.times(p2)
    out = []
    for eps in eps_list:
        worst = 0.0
        for u in _test_fields(grid, eps):
            lhs = para_smooth(p1, v, para_smooth(p2, v, u, eps, grid), eps, grid)
            rhs = para_smooth(prod, v, u, eps, grid)
            worst = max(worst, hs_eps_norm(lhs - rhs, eps, 0, grid) / hs_eps_norm(u, eps, 1, grid))
        out.append(worst)
    out = np.array(out)
    return out, _fit_slope(eps_list, out)


def adjoint_study(eps_list=DEFAULT_EPS, grid: PeriodicGrid | None = None):
    """``||(op^psi(p)^* - op^psi(p^*))|| `` on the test fields, per eps, and its slope."""
    grid = grid or PeriodicGrid(1, 512, 8 * np.pi)
    x = grid.coordinates()[0]
    v = np.cos(2 * np.pi * x / grid.period) + 0.5 * np.sin(4 * np.pi * x / grid.period)
    p = ProductSymbol([(lambda w: w, lambda xi: (xi[0] + 1j) / np.sqrt(1.0 + xi[0] ** 2))])
    out = []
    for eps in eps_list:
        A = para_matrix(p, v, eps, grid)
        B = para_matrix(p.conj(), v, eps, grid)
        D = A.conj().T - B
        worst = 0.0
        for u in _test_fields(grid, eps):
            uh = grid.forward(u).reshape(-1)
            worst = max(worst, spectral_norm((D @ uh).reshape(grid.shape), eps, 0, grid)
                        / hs_eps_norm(u, eps, 1, grid))
        out.append(worst)
    out = np.array(out)
    return out, _fit_slope(eps_list, out)


def _test_fields(grid: PeriodicGrid, eps: float):
    """A smooth field and a semiclassical wave packet."""
    x = grid.coordinates()[0]
    packet = np.exp(-((x - grid.period / 2) / 4.0) ** 2) * np.exp(1j * np.round(0.5 / eps * grid.period / (2 * np.pi))
                                                                 * 2 * np.pi * x / grid.period)
    return [_smooth_test_field(grid), packet]
