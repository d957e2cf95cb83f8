"""Stiff Euler-Maxwell runs and their comparison with the Zakharov/WKB prediction.

Time stepping is Lawson-Heun: the skew constant-coefficient part is integrated
exactly per grid frequency and the nonlinear terms by Heun's rule on the
filtered variable.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import fields
from . import wkb
from .em_operator import apply_linear_flow, em_rhs, gauss_field, linear_propagator, nonlinear_rhs
from .errors import BlowUpError
from .model import E_SLICE, NE_INDEX, STATE_DIM, VE_SLICE, W_INDEX, PlasmaParams, ion_density
from .semiclassical_ops import PeriodicGrid, hs_eps_norm
from .zakharov import ZakharovConfig, history, init_from_datum

DEFAULT_DT_DIVISOR = 20.0
MAX_DT_FRACTION = 0.1


def well_prepared_datum(E0, shape=None) -> np.ndarray:
    """Real 14-component state of the leading plasma wave at phase zero.

    ``E = 2 Re E0`` and ``v_e = 2 Re(i E0) = -2 Im E0``; all else zero.
    """
    E0 = np.asarray(E0, dtype=complex)
    u = np.zeros((STATE_DIM,) + E0.shape[1:])
    u[E_SLICE] = 2 * E0.real
    u[VE_SLICE] = -2 * E0.imag
    return u


def builtin_envelope(name: str, grid: PeriodicGrid, amplitude: float = 0.5) -> np.ndarray:
    """Named divergence-free envelopes.

    ``modulated``: ``A (1 + cos(x)/2) e_1 + 0.3 A sin(2x) e_2`` (1D, along ``x_3``).
    ``plane``: ``A e_1 e^{i x_3}``. ``zero``: identically zero.
    """
    x = grid.coordinates()
    x3 = x[0] if grid.dim == 1 else x[2]
    E0 = np.zeros((3,) + grid.shape, dtype=complex)
    if name == "modulated":
        E0[0] = amplitude * (1 + 0.5 * np.cos(x3))
        E0[1] = 0.3 * amplitude * np.sin(2 * x3)
    elif name == "plane":
        E0[0] = amplitude * np.exp(1j * x3)
    elif name != "zero":
        raise ValueError(f"unknown datum {name!r}; choose modulated, plane or zero")
    return E0


@dataclass(frozen=True)
class EMRunConfig:
    grid: PeriodicGrid
    params: PlasmaParams
    T: float
    E0: np.ndarray = field(repr=False)
    dt: float | None = None
    perturbation: np.ndarray | None = field(default=None, repr=False)
    k0: float | None = None
    linear_only: bool = False

    def __post_init__(self):
        eps = self.params.eps
        if self.dt is None:
            object.__setattr__(self, "dt", eps**2 / DEFAULT_DT_DIVISOR)
        if not (0 < self.dt <= MAX_DT_FRACTION * eps**2 * (1 + 1e-12)):
            raise ValueError(f"dt must lie in (0, eps^2/10] = (0, {MAX_DT_FRACTION * eps**2:.3g}], got {self.dt}")
        if self.perturbation is not None:
            if self.k0 is None or self.k0 <= 3 + self.grid.dim / 2:
                raise ValueError(f"perturbation exponent k0 must exceed 3 + d/2 = {3 + self.grid.dim / 2}")

    @property
    def steps(self) -> int:
        return max(int(round(self.T / self.dt)), 0)

    def initial_state(self) -> np.ndarray:
        u = well_prepared_datum(self.E0)
        if self.perturbation is not None:
            u = u + self.params.eps**self.k0 * np.asarray(self.perturbation, dtype=float)
        return u


@dataclass
class Trajectory:
    times: np.ndarray
    states: list
    config: EMRunConfig

    def final(self) -> np.ndarray:
        return self.states[-1]


@dataclass
class ConstraintMonitor:
    times: np.ndarray
    divB: np.ndarray
    gauss: np.ndarray


def lawson_heun_step(u, params: PlasmaParams, grid: PeriodicGrid, dt: float, linear_only: bool = False):
    if linear_only:
        return apply_linear_flow(u, params, grid, dt)
    k1 = nonlinear_rhs(u, params, grid)
    predictor = apply_linear_flow(u + dt * k1, params, grid, dt)
    k2 = nonlinear_rhs(predictor, params, grid)
    return apply_linear_flow(u + 0.5 * dt * k1, params, grid, dt) + 0.5 * dt * k2


def integrate(cfg: EMRunConfig, output_times=None) -> Trajectory:
    """Run to ``cfg.T`` (a whole number of steps, ``dt`` adjusted down to fit) and keep
    the states closest to ``output_times`` (default: start and end)."""
    steps = cfg.steps
    dt = cfg.T / steps if steps else cfg.dt
    params, grid = cfg.params, cfg.grid
    linear_propagator(params, grid, dt)          # build the frequency cache once
    wanted = [0.0, cfg.T] if output_times is None else list(output_times)
    marks = sorted({min(max(int(round(t / dt)), 0), steps) for t in wanted})
    u = cfg.initial_state()
    times, states = [], []
    if marks and marks[0] == 0:
        times.append(0.0)
        states.append(u.copy())
    for i in range(1, steps + 1):
        u = lawson_heun_step(u, params, grid, dt, cfg.linear_only)
        if not np.all(np.isfinite(u)):
            raise BlowUpError(f"non-finite Euler-Maxwell state at t = {i * dt:.6g}", time=i * dt)
        if i in marks:
            times.append(i * dt)
            states.append(u.copy())
    return Trajectory(np.array(times), states, cfg)


def monitor_constraints(traj: Trajectory) -> ConstraintMonitor:
    grid, params = traj.config.grid, traj.config.params
    divB = [fields.sup(fields.divergence(u[0:3], grid)) for u in traj.states]
    gauss = [fields.sup(gauss_field(u, params, grid)) for u in traj.states]
    return ConstraintMonitor(traj.times, np.array(divB), np.array(gauss))


@dataclass
class ComparisonSeries:
    times: np.ndarray
    sup_err_E: np.ndarray
    sup_err_n: np.ndarray            # ion log density against eps * mean density
    sup_err_ne: np.ndarray           # electron log density, same reference
    hs_eps_err: np.ndarray

    def worst(self) -> dict:
        return {k: float(np.max(getattr(self, k))) for k in ("sup_err_E", "sup_err_n", "sup_err_ne", "hs_eps_err")}


def compare_to_wkb(traj: Trajectory, profiles, s: float = 0.0) -> ComparisonSeries:
    """Errors of the run against profiles built at the trajectory's output times.

    ``profiles`` is a sequence aligned with ``traj.times`` (a single profile is
    accepted for a one-time trajectory). Leading-order quantities use only the
    order-0 and mean-density harmonics, whatever the profile order.
    """
    if isinstance(profiles, wkb.WKBProfile):
        profiles = [profiles] * len(traj.times)
    if len(profiles) != len(traj.times):
        raise ValueError("need one profile per output time")
    params, grid = traj.config.params, traj.config.grid
    eps = params.eps
    rows = []
    for t, u, prof in zip(traj.times, traj.states, profiles):
        lead_E = 2 * np.real(prof.component(0, 1)[E_SLICE] * np.exp(1j * t / eps**2))
        mean_n = np.real(prof.component(1, 0)[NE_INDEX]) if prof.order >= 1 else np.zeros(grid.shape)
        n_i = ion_density(u[W_INDEX], params.alpha)
        approx = wkb.evaluate(prof, t)
        rows.append((fields.sup(u[E_SLICE] - lead_E),
                     fields.sup(n_i - eps * mean_n),
                     fields.sup(u[NE_INDEX] - eps * mean_n),
                     hs_eps_norm(u - approx, eps, s, grid)))
    arr = np.array(rows).reshape(-1, 4)
    return ComparisonSeries(np.asarray(traj.times), *arr.T)


@dataclass
class ConvergenceReport:
    eps_values: list
    rows: list                        # dicts per eps
    fitted_order_E: float
    fitted_order_n: float
    fitted_order_total: float
    fitted_order_hs: float
    settings: dict

    @property
    def fitted_order(self) -> float:
        return self.fitted_order_total


def _fit(xs, ys) -> float:
    ys = np.maximum(np.asarray(ys, dtype=float), 1e-300)
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def converge_study(eps_list=(0.2, 0.1, 0.05), theta_e: float = 0.5, alpha: float = 0.1,
                   points: int = 64, T: float = 0.1, order: int = 2, s: float = 0.0,
                   dt_divisor: float = 25.0, zakharov_dt: float = 1e-4, datum: str = "modulated",
                   n_outputs: int = 5, workers: int = 1) -> ConvergenceReport:
    """Euler-Maxwell against the Zakharov envelope for each eps, on one 1D grid.

    The error per eps is the worst over ``n_outputs`` equally spaced times in ``[0, T]``.
    ``workers > 1`` runs the eps values on a thread pool; results do not depend on it.
    """
    grid = PeriodicGrid(1, points)
    E0 = builtin_envelope(datum, grid)
    zcfg = ZakharovConfig(grid, zakharov_dt, theta_e, alpha)
    out_times = np.linspace(0.0, T, n_outputs)
    snapshots = history(init_from_datum(E0, grid), zcfg, out_times)

    def one(eps):
        params = PlasmaParams(eps=eps, theta_e=theta_e, alpha=alpha)
        steps = int(np.ceil(T / (eps**2 / dt_divisor)))
        traj = integrate(EMRunConfig(grid, params, T, E0, dt=T / steps), out_times)
        profiles = [wkb.build_profile(z, zcfg, params, order) for z in snapshots]
        worst = compare_to_wkb(traj, profiles, s).worst()
        worst["total"] = worst["sup_err_E"] + worst["sup_err_n"]
        return {"eps": eps, **worst}

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(one, eps_list))
    else:
        rows = [one(eps) for eps in eps_list]
    eps_arr = [r["eps"] for r in rows]
    return ConvergenceReport(
        list(eps_list), rows,
        _fit(eps_arr, [r["sup_err_E"] for r in rows]),
        _fit(eps_arr, [r["sup_err_n"] for r in rows]),
        _fit(eps_arr, [r["total"] for r in rows]),
        _fit(eps_arr, [r["hs_eps_err"] for r in rows]),
        dict(theta_e=theta_e, alpha=alpha, points=points, T=T, order=order, s=s,
             dt_divisor=dt_divisor, zakharov_dt=zakharov_dt, datum=datum),
    )


def demodulated_envelope(traj: Trajectory) -> np.ndarray:
    """``(E - i v_e) e^{-i t / eps^2} / 2`` per output time: the slowly varying envelope."""
    eps = traj.config.params.eps
    return np.array([0.5 * (u[E_SLICE] - 1j * u[VE_SLICE]) * np.exp(-1j * t / eps**2)
                     for t, u in zip(traj.times, traj.states)])


__all__ = ["EMRunConfig", "Trajectory", "ConstraintMonitor", "ComparisonSeries", "ConvergenceReport",
           "well_prepared_datum", "builtin_envelope", "integrate", "lawson_heun_step", "monitor_constraints",
           "compare_to_wkb", "converge_study", "demodulated_envelope", "em_rhs"]
