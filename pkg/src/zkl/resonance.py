"""Resonance phases, their localization, cutoffs, and the leading homological solves."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import LocalizationError
from .model import PlasmaParams
from .spectral import ACOUSTIC, KLEIN_GORDON, longitudinal_rest, rest_decomposition

KG_MODES = ("lambda+", "lambda-", "mu+", "mu-")
ACOUSTIC_MODES = ("zero", "mu_s+", "mu_s-")
HARMONICS = (-1, 1)

# Localization constants and the cutoff geometry built around them.
C_L = 0.5
C_M = 1.0
C_M_UPPER = 2.0
C0 = 0.4          # chi_eps plateau at 1 ends here (c0 < c_l)
C1 = 0.8          # chi_eps equals eps beyond this (c_l < c1 < c_m)
C0_PRIME = 0.6    # chi_L reaches 1 here; it vanishes below c_l


def mode_frequency(label: str, r, eps: float, theta_e: float, alpha: float):
    """Closed-form rest frequency of a labelled branch at radius ``r``."""
    r = np.asarray(r, dtype=float)
    if label in ("lambda+", "lambda-"):
        val = np.sqrt(1.0 + r**2 + eps**2 / theta_e**2)
        return val if label.endswith("+") else -val
    if label == "zero":
        return np.zeros_like(r)
    mu, mu_s = longitudinal_rest(eps, theta_e, alpha, r)
    table = {"mu+": mu, "mu-": -mu, "mu_s+": mu_s, "mu_s-": -mu_s}
    if label not in table:
        raise KeyError(f"unknown mode label {label!r}")
    return table[label]


def _radius(xi):
    xi = np.asarray(xi, dtype=float)
    return np.linalg.norm(xi, axis=-1) if xi.ndim and xi.shape[-1] == 3 else np.abs(xi)


def phase(j: str, k: str, p: int, eps: float, xi, theta_e: float = 0.2, alpha: float = 0.1):
    """``lambda_j - lambda_k + p`` at rest; ``xi`` is a radius or a 3-vector."""
    r = _radius(xi)
    return mode_frequency(j, r, eps, theta_e, alpha) - mode_frequency(k, r, eps, theta_e, alpha) + p


def secondary_phase(j: str, p: int, pp: int, xi, theta_e: float = 0.2, alpha: float = 0.1):
    """``lambda_j(eps=0) - (p + p')``."""
    return mode_frequency(j, _radius(xi), 0.0, theta_e, alpha) - (p + pp)


def clip_phase(phi, eps: float):
    """Replace phases smaller than ``eps^2/2`` in magnitude by ``+eps^2/2``."""
    phi = np.asarray(phi, dtype=float)
    floor = 0.5 * eps**2
    out = np.where(np.abs(phi) >= floor, phi, floor)
    return out if out.ndim else float(out)


@dataclass
class ResonanceReport:
    family: str
    roots: list                      # (j, k, p, radius)
    interval: tuple
    margin: float
    constants: dict = field(default_factory=lambda: {"c_l": C_L, "c_m": C_M, "C_m": C_M_UPPER})
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations and self.margin > 0.0


def _roots_on_grid(fun, radii):
    vals = fun(radii)
    roots = []
    for i in np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]:
        roots.append(brentq(fun, radii[i], radii[i + 1], xtol=1e-13, rtol=1e-13))
    return roots, vals


def _pairs(family):
    if family == "0-0":
        return [(j, k) for j in KG_MODES for k in KG_MODES if j != k]
    return [(j, k) for j in KG_MODES for k in ACOUSTIC_MODES]


def locate_resonances(params: PlasmaParams, family: str, strict: bool = True,
                      r_max: float = 100.0, n_grid: int = 2000) -> ResonanceReport:
    """Find resonance radii of one family and check their localization.

    ``(0-0)`` is evaluated at ``eps = 0`` and must sit in ``[c_m, C_m]``;
    ``(0-s)`` uses the rest frequencies at ``params.eps`` and must sit in
    ``[0, c_l]``; ``(0-0-s)`` must have no zero on ``[0, c_m]``. The margin is
    the smallest ``|phase|`` found outside the allowed interval.
    """
    te, al = params.theta_e, params.alpha
    radii = np.concatenate([[0.0], np.logspace(-6, np.log10(r_max), n_grid)])
    roots, violations = [], []
    margin = np.inf
    if family == "0-0-s":
        inside = radii[radii <= C_M]
        for j in KG_MODES:
            for p in HARMONICS:
                for pp in HARMONICS:
                    vals = secondary_phase(j, p, pp, inside, te, al)
                    m = float(np.min(np.abs(vals)))
                    margin = min(margin, m)
                    if m == 0.0 or np.any(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0):
                        violations.append((j, p, pp))
        interval = (0.0, C_M)
    elif family in ("0-0", "0-s"):
        eps = 0.0 if family == "0-0" else params.eps
        interval = (C_M, C_M_UPPER) if family == "0-0" else (0.0, C_L)
        outside = (radii < interval[0]) | (radii > interval[1])
        for j, k in _pairs(family):
            for p in HARMONICS:
                fun = lambda r, j=j, k=k, p=p: phase(j, k, p, eps, r, te, al)
                found, vals = _roots_on_grid(fun, radii)
                if np.any(outside):
                    margin = min(margin, float(np.min(np.abs(vals[outside]))))
                for r in found:
                    roots.append((j, k, p, float(r)))
                    if not (interval[0] - 1e-12 <= r <= interval[1] + 1e-12):
                        violations.append((j, k, p, float(r)))
    else:
        raise ValueError(f"unknown resonance family {family!r}")
    report = ResonanceReport(family, roots, interval, float(margin), violations=violations)
    if strict and not report.ok:
        raise LocalizationError(
            f"({family}) resonances escape the interval {interval}: {violations}", witness=violations)
    return report


def kg_kg_root(theta_e: float) -> float:
    """Radius where ``sqrt(1 + r^2) - sqrt(1 + theta_e^2 r^2) = 1`` (eps = 0)."""
    f = lambda r: np.sqrt(1 + r * r) - np.sqrt(1 + theta_e**2 * r * r) - 1.0
    hi = 2.0
    while f(hi) < 0:
        hi *= 2.0
        if hi > 1e8:
            raise LocalizationError("no Klein-Gordon resonance", witness=theta_e)
    return brentq(f, 0.0, hi, xtol=1e-14, rtol=1e-15)


# -- cutoffs ---------------------------------------------------------------

def _bump_edge(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def smooth_step(t):
    """C-infinity step: 0 for ``t <= 0``, 1 for ``t >= 1``."""
    t = np.asarray(t, dtype=float)
    a = _bump_edge(t)
    b = _bump_edge(1.0 - t)
    return a / (a + b)


def ramp(r, lo: float, hi: float):
    """0 below ``lo``, 1 above ``hi``, smooth in between."""
    return smooth_step((np.asarray(r, dtype=float) - lo) / (hi - lo))


def chi_eps(r, eps: float, c0: float = C0, c1: float = C1):
    """1 on ``|xi| <= c0``, ``eps`` on ``|xi| >= c1``."""
    return 1.0 - (1.0 - eps) * ramp(r, c0, c1)


def chi_L(r, lo: float = C_L, hi: float = C0_PRIME):
    """0 on ``|xi| <= c_l``, 1 on ``|xi| >= c0'``."""
    return ramp(r, lo, hi)


# -- homological equations ---------------------------------------------------

@dataclass
class NormalFormSymbol:
    kind: str
    params: PlasmaParams
    ua: dict                    # harmonic p -> complex 14-vector amplitude
    grad_ua: dict | None = None
    cutoffs: dict = field(default_factory=dict)

    def block_matrix(self, xi, p: int) -> np.ndarray:
        """14x14 symbol of harmonic ``p`` at frequency ``xi``."""
        return _normal_form_harmonic(self, np.asarray(xi, dtype=float), p)

    def matrix(self, xi, t: float = 0.0) -> np.ndarray:
        eps = self.params.eps
        return sum(np.exp(1j * p * t / eps**2) * self.block_matrix(xi, p) for p in self.ua)

    def residual(self, xi, t: float = 0.0) -> np.ndarray:
        """``eps^2 d_t N + i[A, N] - source`` on the block the symbol lives in."""
        eps = self.params.eps
        xi = np.asarray(xi, dtype=float)
        total = 0.0
        for p in self.ua:
            N = self.block_matrix(xi, p)
            H, Pk, Pj, src = _homological_data(self, xi, p)
            lhs = 1j * p * N + 1j * (H @ N - N @ H)
            total = total + np.exp(1j * p * t / eps**2) * (Pk @ lhs @ Pj - src)
        return total


def _homological_data(sym: NormalFormSymbol, xi, p):
    from .transparency import resonant_source   # deferred: transparency builds on this module

    prm = sym.params
    eps = prm.eps if sym.kind == "N0" else 0.0
    dec = rest_decomposition(eps, prm.theta_e, prm.alpha, xi)
    H = sum(l * P for l, P in zip(dec.eigenvalues, dec.projectors))
    pi_s = dec.pis + dec.kernel
    ua = sym.ua[p]
    grad = None if sym.grad_ua is None else sym.grad_ua.get(p)
    r = float(np.linalg.norm(xi))
    if sym.kind == "L":
        src = chi_L(r) * dec.pi0 @ resonant_source(prm, ua, p, xi, projector_eps=0.0, grad_ua=grad,
                                                   include_time_term=False) @ pi_s
        return H, dec.pi0, pi_s, src
    if sym.kind == "M":
        src = pi_s @ resonant_source(prm, ua, p, xi, projector_eps=0.0, grad_ua=grad,
                                     include_time_term=False) @ pi_s
        return H, pi_s, pi_s, src
    src = chi_eps(r, prm.eps) * pi_s @ resonant_source(prm, ua, p, xi, projector_eps=prm.eps,
                                                       grad_ua=grad) @ dec.pi0
    return H, pi_s, dec.pi0, src


def _normal_form_harmonic(sym: NormalFormSymbol, xi, p):
    from .transparency import resonant_source

    prm = sym.params
    eps = prm.eps if sym.kind == "N0" else 0.0
    dec = rest_decomposition(eps, prm.theta_e, prm.alpha, xi)
    ua = sym.ua[p]
    if not np.any(ua):
        return np.zeros((14, 14), dtype=complex)
    grad = None if sym.grad_ua is None else sym.grad_ua.get(p)
    r = float(np.linalg.norm(xi))
    V = resonant_source(prm, ua, p, xi, projector_eps=eps, grad_ua=grad,
                        include_time_term=(sym.kind == "N0"))
    out = np.zeros((14, 14), dtype=complex)
    labels = list(zip(dec.eigenvalues, dec.projectors, dec.classes))
    kg = [(l, P) for l, P, c in labels if c == KLEIN_GORDON]
    ac = [(l, P) for l, P, c in labels if c != KLEIN_GORDON]
    if sym.kind == "L":
        weight = chi_L(r)
        if weight == 0.0:
            return out
        for lj, Pj in kg:
            for lk, Pk in ac:
                out += Pj @ V @ Pk / (1j * (lj - lk + p))
        return weight * out
    if sym.kind == "M":
        for lj, Pj in ac:
            for lk, Pk in ac:
                out += Pj @ V @ Pk / (1j * (lj - lk + p))
        return out
    if sym.kind == "N0":
        for lk, Pk in ac:
            for lj, Pj in kg:
                out += Pk @ V @ Pj / (1j * clip_phase(lk - lj + p, prm.eps))
        return chi_eps(r, prm.eps) * out
    raise ValueError(f"unknown normal form kind {sym.kind!r}")


def solve_homological(kind: str, params: PlasmaParams, ua_coeff: dict, grad_ua: dict | None = None) -> NormalFormSymbol:
    """Leading-order solution of a homological equation.

    ``kind`` is ``"L"`` (Klein-Gordon row, acoustic column, cut off below
    ``c_l``), ``"M"`` (acoustic block) or ``"N0"`` (acoustic row,
    Klein-Gordon column, clipped phases, weighted by ``chi_eps``).
    ``ua_coeff`` maps each harmonic ``p`` to the amplitude ``u_{a,p}``.
    Block ``(row, col)`` of harmonic ``p`` is divided by ``i (lambda_row - lambda_col + p)``,
    the multiplier of ``eps^2 d_t + i[A, .]`` on that block.
    """
    if kind not in ("L", "M", "N0"):
        raise ValueError(f"unknown normal form kind {kind!r}")
    ua = {int(p): np.asarray(v, dtype=complex) for p, v in ua_coeff.items()}
    cut = {"chi_eps": (C0, C1), "chi_L": (C_L, C0_PRIME)} if kind != "M" else {}
    return NormalFormSymbol(kind, params, ua, grad_ua, cut)


def _clip_band_radii(params: PlasmaParams, half_width: int = 20) -> np.ndarray:
    """Radii resolving the clip band ``|phase| < eps^2/2`` around each (0-s) root in ``[0, c_l]``."""
    eps, te, al = params.eps, params.theta_e, params.alpha
    rep = locate_resonances(params, "0-s", strict=False)
    out = []
    for j, k, p, r0 in rep.roots:
        if r0 > C_L:
            continue
        h = 1e-6 * (1.0 + r0)
        slope = abs(phase(j, k, p, eps, r0 + h, te, al) - phase(j, k, p, eps, r0 - h, te, al)) / (2 * h)
        delta = 0.5 * eps**2 / max(slope, 1e-12)
        out.append(r0 + delta * np.linspace(-1.5, 1.5, 2 * half_width + 1))
    return np.concatenate(out) if out else np.empty(0)


def homological_residual_study(params: PlasmaParams, ua_coeff: dict, eps_list, direction=(0.0, 0.0, 1.0),
                               n_radii: int = 200, times=(0.0, 0.37, 1.1)):
    """Sup over ``|xi| <= c_l`` and sample times of the ``N0`` residual, per eps,
    plus the least-squares log-log slope. ``ua_coeff`` may be a callable of eps.

    The residual only lives in the clip band around the (0-s) roots, so the
    uniform radial grid is augmented with points resolving that band.
    """
    d = np.asarray(direction, dtype=float)
    d /= np.linalg.norm(d)
    out = []
    for eps in eps_list:
        prm = params.replace(eps=eps)
        sym = solve_homological("N0", prm, ua_coeff(eps) if callable(ua_coeff) else ua_coeff)
        radii = np.concatenate([np.linspace(C_L / n_radii, C_L, n_radii), _clip_band_radii(prm)])
        best = 0.0
        for r in radii[(radii > 0) & (radii <= C_L)]:
            for t in times:
                best = max(best, float(np.linalg.norm(sym.residual(r * d, t * eps**2), 2)))
        out.append(best)
    slope = float(np.polyfit(np.log(eps_list), np.log(out), 1)[0])
    return np.array(out), slope
