"""Pseudospectral Strang solver for the vector Zakharov system.

Unknowns: the complex envelope ``E`` (the ``e^{+i theta}`` harmonic of the
electric field) and the slow density ``n`` with its time derivative ``nt``::

    dE/dt  = (i/2) (n E - Lap_e E + E / theta_e^2)
    n_tt   - (1 + alpha^2) Lap n = Lap |E|^2

with ``Lap_e = theta_e^2 grad div - curl curl``.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import fields
from .errors import BlowUpError, DivergenceError
from .model import PlasmaParams
from .semiclassical_ops import PeriodicGrid

PROJECTION_TOL = 1e-6


@dataclass(frozen=True)
class ZakharovState:
    E: np.ndarray          # (3, *shape) complex
    n: np.ndarray          # (*shape) real
    nt: np.ndarray         # (*shape) real
    t: float = 0.0


@dataclass(frozen=True)
class ZakharovConfig:
    grid: PeriodicGrid
    dt: float = 1e-3
    theta_e: float = 0.2
    alpha: float = 0.1
    splitting_order: int = 2

    def __post_init__(self):
        if self.dt == 0 or not np.isfinite(self.dt):
            raise ValueError("dt must be finite and nonzero")
        if self.splitting_order != 2:
            raise ValueError("only Strang splitting (order 2) is implemented")

    @classmethod
    def from_params(cls, params: PlasmaParams, grid: PeriodicGrid, dt: float = 1e-3) -> "ZakharovConfig":
        return cls(grid, dt, params.theta_e, params.alpha)

    @property
    def sound_speed(self) -> float:
        return float(np.sqrt(1.0 + self.alpha**2))


def init_from_datum(E0, grid: PeriodicGrid, tol: float = 1e-10) -> ZakharovState:
    """Zero density, the given envelope. Slightly compressible data are projected;
    a projection moving the field by more than ``1e-6`` relative is an error."""
    E0 = np.asarray(E0, dtype=complex)
    if E0.shape != (3,) + grid.shape:
        raise ValueError(f"envelope must have shape {(3,) + grid.shape}, got {E0.shape}")
    div = fields.divergence(E0, grid)
    if fields.sup(div) > tol:
        projected = fields.leray(E0, grid)
        scale = max(fields.sup(E0), 1e-300)
        if fields.sup(projected - E0) > PROJECTION_TOL * scale:
            raise DivergenceError(f"datum is not divergence-free (max |div E| = {fields.sup(div):.3e})")
        E0 = projected
    zero = np.zeros(grid.shape)
    return ZakharovState(E0, zero, zero.copy(), 0.0)


def mass(state: ZakharovState, grid: PeriodicGrid) -> float:
    """``||E||_{L^2}`` over the torus."""
    return float(np.sqrt(grid.cell_volume * np.sum(np.abs(state.E) ** 2)))


def _dispersion_blocks(grid: PeriodicGrid, theta_e: float):
    k = fields.wave_vectors(grid, drop_nyquist=False)
    k2 = np.sum(k**2, axis=0)
    safe = np.where(k2 > 0, k2, 1.0)
    khat = np.where(k2 > 0, k / np.sqrt(safe), 0.0)
    # -Lap_e = |k|^2 (transverse) + theta^2 |k|^2 (longitudinal)
    return k2, khat, k2, theta_e**2 * k2


def linear_flow(E, h: float, cfg: ZakharovConfig) -> np.ndarray:
    """Exact flow of ``dE/dt = (i/2)(-Lap_e E + E/theta_e^2)`` over time ``h``."""
    grid = cfg.grid
    _, khat, w_perp, w_par = _dispersion_blocks(grid, cfg.theta_e)
    shift = 1.0 / cfg.theta_e**2
    Eh = grid.forward(E)
    par = np.sum(khat * Eh, axis=0)
    par_part = khat * par
    perp_part = Eh - par_part
    Eh = (perp_part * np.exp(0.5j * h * (w_perp + shift))
          + par_part * np.exp(0.5j * h * (w_par + shift)))
    return grid.inverse(Eh)


def wave_flow(n, nt, source, h: float, cfg: ZakharovConfig):
    """Exact flow of ``n_tt - c^2 Lap n = Lap F`` with ``F`` frozen over ``h``."""
    grid = cfg.grid
    c = cfg.sound_speed
    k2 = np.sum(fields.wave_vectors(grid, drop_nyquist=False) ** 2, axis=0)
    nh, nth, Fh = grid.forward(n), grid.forward(nt), grid.forward(source)
    w = c * np.sqrt(k2)
    moving = w > 0
    part = np.where(moving, -Fh / c**2, 0.0)      # steady response to the frozen source
    dev = nh - part
    safe = np.where(moving, w, 1.0)
    cos, sin = np.cos(w * h), np.sin(w * h)
    n_new = np.where(moving, part + dev * cos + nth * sin / safe, nh + nth * h)
    nt_new = np.where(moving, -dev * w * sin + nth * cos, nth)
    return grid.inverse(n_new).real, grid.inverse(nt_new).real


def intensity(E) -> np.ndarray:
    return np.sum(np.abs(E) ** 2, axis=0)


def step(state: ZakharovState, cfg: ZakharovConfig) -> ZakharovState:
    """One Strang step: half wave, half dispersion, potential rotation, half dispersion, half wave."""
    h = cfg.dt
    n, nt = wave_flow(state.n, state.nt, intensity(state.E), 0.5 * h, cfg)
    E = linear_flow(state.E, 0.5 * h, cfg)
    E = E * np.exp(0.5j * h * n)[None]
    E = linear_flow(E, 0.5 * h, cfg)
    n, nt = wave_flow(n, nt, intensity(E), 0.5 * h, cfg)
    t = state.t + h
    if not (np.all(np.isfinite(E)) and np.all(np.isfinite(n)) and np.all(np.isfinite(nt))):
        raise BlowUpError(f"non-finite Zakharov state at t = {t:.6g}", time=t)
    return ZakharovState(E, n, nt, t)


def run(state: ZakharovState, cfg: ZakharovConfig, T: float, record_every: int = 0):
    """Advance to time ``state.t + T`` (rounded to whole steps).

    Returns ``(final_state, series)`` where ``series`` rows are
    ``(t, mass, max|E|, max|n|)`` every ``record_every`` steps (0: ends only).
    """
    steps = int(round(abs(T) / abs(cfg.dt)))
    series = [_diagnostics(state, cfg.grid)]
    for i in range(steps):
        state = step(state, cfg)
        if record_every and (i + 1) % record_every == 0 and i + 1 < steps:
            series.append(_diagnostics(state, cfg.grid))
    if steps:
        series.append(_diagnostics(state, cfg.grid))
    return state, np.array(series)


def _diagnostics(state, grid):
    return (state.t, mass(state, grid), fields.sup(state.E), fields.sup(state.n))


def history(state: ZakharovState, cfg: ZakharovConfig, times) -> list:
    """States at the requested increasing times (each reached by whole steps of ``cfg.dt``)."""
    out = []
    for t in times:
        steps = int(round((t - state.t) / cfg.dt))
        for _ in range(steps):
            state = step(state, cfg)
        out.append(replace(state, t=float(t)))
    return out


def rhs(state: ZakharovState, cfg: ZakharovConfig):
    """Exact time derivatives ``(E_t, n_t, nt_t)`` of the model."""
    grid = cfg.grid
    E = state.E
    lap_e = cfg.theta_e**2 * fields.gradient(fields.divergence(E, grid), grid) - fields.curl(fields.curl(E, grid), grid)
    E_t = 0.5j * (state.n[None] * E - lap_e + E / cfg.theta_e**2)
    c2 = cfg.sound_speed**2
    nt_t = c2 * fields.laplacian(state.n, grid) + fields.laplacian(intensity(E), grid)
    return E_t, state.nt.copy(), nt_t


def plane_wave_frequency(k, theta_e: float, transverse: bool = True, n0: float = 0.0) -> float:
    """``Omega`` with ``E(t) = A exp(i Omega t) exp(i k.x)`` solving the envelope equation at constant ``n0``."""
    k2 = float(np.dot(k, k))
    weight = k2 if transverse else theta_e**2 * k2
    return 0.5 * (weight + 1.0 / theta_e**2 + n0)


def solve_corrector_first_order(state: ZakharovState, cfg: ZakharovConfig) -> dict:
    """First-order polarization fields for the ``e^{+i theta}`` harmonic plus mean fields.

    Keys: ``B1`` (``i curl E``), ``vi1`` (``-i E / theta_e``), ``ne1`` (``-theta_e div E``),
    ``ne10`` and ``ni10`` (both the solver's density array, quasineutrality), and
    ``vi10`` (the curl-free ion drift with ``div vi10 = -n_t``).
    """
    grid = cfg.grid
    E = state.E
    return {
        "B1": 1j * fields.curl(E, grid),
        "vi1": -1j * E / cfg.theta_e,
        "ne1": -cfg.theta_e * fields.divergence(E, grid),
        "ne10": state.n,
        "ni10": state.n,
        "vi10": fields.inverse_gradient_potential(-state.nt, grid),
    }
