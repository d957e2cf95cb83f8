"""Three-scale approximate solutions built from a Zakharov snapshot.

A profile stores harmonics ``u[m, p]`` (14-component grid fields, densities in
fluctuation form) and is evaluated as ``sum_m eps^m sum_p e^{i p t / eps^2} u[m, p]``,
after which both densities are mapped to the log form used by the dynamics.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import fields
from .em_operator import em_rhs
from .errors import InconsistentCorrectorError
from .model import B_SLICE, E_SLICE, NE_INDEX, STATE_DIM, VE_SLICE, VI_SLICE, W_INDEX, PlasmaParams
from .semiclassical_ops import hs_eps_norm
from .zakharov import ZakharovConfig, ZakharovState, rhs as zakharov_rhs, solve_corrector_first_order

ORDERS = (0, 1, 2)
SLOW_STEP = 1e-5


@dataclass(frozen=True)
class WKBProfile:
    harmonics: dict          # (m, p) -> complex array (14, *shape), every p in [-2, 2]
    eps: float
    params: PlasmaParams
    grid: object
    order: int
    time: float = 0.0
    omega: float = 1.0
    rates: dict | None = field(default=None, compare=False)   # time derivatives of the harmonics

    def component(self, m: int, p: int) -> np.ndarray:
        return self.harmonics[(m, p)]


@dataclass
class ResidualReport:
    order: int
    eps_values: list
    residual_norms: list
    fitted_order: float
    s: float = 0.0


def _zero(shape):
    return np.zeros((STATE_DIM,) + tuple(shape), dtype=complex)


def _dot(a, b):
    return np.sum(a * b, axis=0)


def positive_harmonics(state: ZakharovState, cfg: ZakharovConfig, order: int, correctors=None) -> dict:
    """Harmonics ``u[m, p]`` for ``p >= 0`` up to ``order``, densities in fluctuation form."""
    if order not in ORDERS:
        raise ValueError(f"order must be one of {ORDERS}, got {order}")
    grid, te, alpha = cfg.grid, cfg.theta_e, cfg.alpha
    corr = correctors if correctors is not None else solve_corrector_first_order(state, cfg)
    if not (np.array_equal(corr["ne10"], state.n) and np.array_equal(corr["ni10"], state.n)):
        raise InconsistentCorrectorError("mean electron and ion densities must both equal the Zakharov density")
    shape = grid.shape
    E = state.E
    out = {(m, p): _zero(shape) for m in ORDERS for p in range(3)}

    # leading order: plasma wave
    ve0 = 1j * E
    out[0, 1][E_SLICE] = E
    out[0, 1][VE_SLICE] = ve0
    if order == 0:
        return out

    ne11 = corr["ne1"]
    out[1, 1][B_SLICE] = corr["B1"]
    out[1, 1][VI_SLICE] = corr["vi1"]
    out[1, 1][NE_INDEX] = ne11
    out[1, 0][NE_INDEX] = corr["ne10"]
    out[1, 0][W_INDEX] = alpha * corr["ni10"]
    out[1, 0][VI_SLICE] = corr["vi10"]
    if order == 1:
        return out

    n = state.n
    E_t, _, _ = zakharov_rhs(state, cfg)
    # first harmonic: solvability leaves E unchanged, the electron velocity absorbs the rest
    residual_E = -E_t + fields.curl(corr["B1"], grid) - corr["vi1"] / te + n[None] * ve0
    out[2, 1][VE_SLICE] = -residual_E
    # mean: pressure balance and drift matching
    intensity = np.sum(np.abs(E) ** 2, axis=0)
    out[2, 0][E_SLICE] = -te * fields.gradient(n + intensity, grid)
    mean_flux = 2.0 * np.real(ne11[None] * np.conj(ve0))
    out[2, 0][VE_SLICE] = corr["vi10"] / te - mean_flux
    # second harmonic: elliptic inversion of (2i + L0)
    b1 = ne11[None] * ve0
    b2 = -te * fields.gradient(0.5 * _dot(ve0, ve0), grid)
    E22 = (b2 + 2j * b1) / (1.0 - 4.0)
    out[2, 2][E_SLICE] = E22
    out[2, 2][VE_SLICE] = 2j * E22 - b1
    return out


def _complete(positive: dict) -> dict:
    full = dict(positive)
    for (m, p), val in positive.items():
        if p > 0:
            full[m, -p] = np.conj(val)
    return full


def _shift(state: ZakharovState, cfg: ZakharovConfig, h: float) -> ZakharovState:
    E_t, n_t, nt_t = zakharov_rhs(state, cfg)
    return ZakharovState(state.E + h * E_t, state.n + h * n_t, state.nt + h * nt_t, state.t + h)


def harmonic_rates(state: ZakharovState, cfg: ZakharovConfig, order: int, h: float = SLOW_STEP) -> dict:
    """``d/dt u[m, p]`` along the Zakharov flow (centered difference of the exact vector field)."""
    plus = positive_harmonics(_shift(state, cfg, h), cfg, order)
    minus = positive_harmonics(_shift(state, cfg, -h), cfg, order)
    return _complete({key: (plus[key] - minus[key]) / (2 * h) for key in plus})


def build_profile(state: ZakharovState, cfg: ZakharovConfig, params: PlasmaParams, order: int,
                  correctors=None, with_rates: bool = False) -> WKBProfile:
    """Profile of the given order from a Zakharov snapshot.

    ``params`` supplies ``eps``; ``theta_e`` and ``alpha`` must agree with ``cfg``.
    """
    if not (np.isclose(params.theta_e, cfg.theta_e) and np.isclose(params.alpha, cfg.alpha)):
        raise ValueError("plasma parameters disagree with the Zakharov configuration")
    harmonics = _complete(positive_harmonics(state, cfg, order, correctors))
    rates = harmonic_rates(state, cfg, order) if with_rates else None
    return WKBProfile(harmonics, params.eps, params, cfg.grid, order, state.t, rates=rates)


def with_eps(profile: WKBProfile, eps: float) -> WKBProfile:
    """Same harmonics, different small parameter."""
    return replace(profile, eps=eps, params=profile.params.replace(eps=eps))


def _sum_harmonics(harmonics: dict, eps: float, t: float) -> np.ndarray:
    theta = t / eps**2
    total = None
    for (m, p), val in harmonics.items():
        term = eps**m * np.exp(1j * p * theta) * val
        total = term if total is None else total + term
    return total


def _to_log_form(u_sharp, eps, alpha):
    u = u_sharp.copy()
    ne_sharp = u_sharp[NE_INDEX]
    ni_sharp = u_sharp[W_INDEX] / alpha if alpha > 0 else np.zeros_like(ne_sharp)
    if np.any(1.0 + eps * ne_sharp <= 0) or np.any(1.0 + eps * ni_sharp <= 0):
        raise ValueError("profile density leaves the physical range")
    u[NE_INDEX] = np.log1p(eps * ne_sharp) / eps
    u[W_INDEX] = alpha * np.log1p(eps * ni_sharp) / eps
    return u, ne_sharp, ni_sharp


def evaluate_sharp(profile: WKBProfile, t: float | None = None) -> np.ndarray:
    """Real profile with densities in fluctuation form."""
    t = profile.time if t is None else t
    u = _sum_harmonics(profile.harmonics, profile.eps, t)
    return u.real


def evaluate(profile: WKBProfile, t: float | None = None) -> np.ndarray:
    """Approximate solution at time ``t`` on the profile's grid, densities in log form.

    The slow fields are frozen at the snapshot; ``t`` only moves the fast phase.
    """
    u, _, _ = _to_log_form(evaluate_sharp(profile, t), profile.eps, profile.params.alpha)
    return u


def time_derivative(profile: WKBProfile, t: float | None = None) -> np.ndarray:
    """``d/dt`` of :func:`evaluate` (fast phase exactly, slow fields along the Zakharov flow)."""
    if profile.rates is None:
        raise ValueError("profile was built without rates (pass with_rates=True)")
    t = profile.time if t is None else t
    eps = profile.eps
    fast = {(m, p): (1j * p / eps**2) * val for (m, p), val in profile.harmonics.items()}
    du_sharp = (_sum_harmonics(fast, eps, t) + _sum_harmonics(profile.rates, eps, t)).real
    _, ne_sharp, ni_sharp = _to_log_form(evaluate_sharp(profile, t), eps, profile.params.alpha)
    du = du_sharp.copy()
    du[NE_INDEX] = du_sharp[NE_INDEX] / (1.0 + eps * ne_sharp)
    du[W_INDEX] = du_sharp[W_INDEX] / (1.0 + eps * ni_sharp)
    return du


def residual(profile: WKBProfile, t: float | None = None) -> np.ndarray:
    """Defect of the approximate solution in the log-density Euler-Maxwell equations."""
    u = evaluate(profile, t)
    return time_derivative(profile, t) - em_rhs(u, profile.params, profile.grid)


def _fit(eps_list, values) -> float:
    return float(np.polyfit(np.log(eps_list), np.log(values), 1)[0])


def residual_study(state: ZakharovState, cfg: ZakharovConfig, params: PlasmaParams, eps_list,
                   order: int, s: float = 0.0, phases=(0.0, 0.25, 0.5, 0.75)) -> ResidualReport:
    """Residual norm ``max over fast phases of ||residual||_{eps,s}`` per eps, with a log-log fit.

    One Zakharov snapshot feeds every eps; the fast phase ``t / eps^2`` is sampled at
    ``2 pi`` times each entry of ``phases`` so the result does not hinge on one phase.
    """
    base = build_profile(state, cfg, params, order, with_rates=True)
    norms = []
    for eps in eps_list:
        prof = with_eps(base, eps)
        worst = 0.0
        for ph in phases:
            t = 2 * np.pi * ph * eps**2
            worst = max(worst, hs_eps_norm(residual(prof, t), eps, s, cfg.grid))
        norms.append(worst)
    return ResidualReport(order, list(eps_list), norms, _fit(eps_list, norms), s)
