"""Interaction coefficients at the Klein-Gordon/acoustic resonances and the symmetrizer."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BoundViolationError, DegenerateProfileError
from .model import (E_SLICE, NE_INDEX, STATE_DIM, VE_SLICE, VI_SLICE, PlasmaParams, bilinear_B,
                    rest_symbol, source_G)
from .resonance import C_L, locate_resonances
from .spectral import (ACOUSTIC, KERNEL, KLEIN_GORDON, decompose_matrix, longitudinal_rest,
                       kernel_vector, rest_decomposition, rest_eigenvectors)

_EYE = np.eye(STATE_DIM)


def harmonic_amplitudes(A, eps: float, theta_e: float, xi=None) -> dict:
    """Amplitudes ``u_{a,p}`` of a locally constant leading-order profile.

    ``E = A``, ``v_e = i p A`` on harmonic ``p`` plus the first-order ion
    velocity ``-i p eps A / theta_e``; the ``p = -1`` entry is the conjugate.
    """
    A = np.asarray(A, dtype=complex)
    u = np.zeros(STATE_DIM, dtype=complex)
    u[E_SLICE] = A
    u[VE_SLICE] = 1j * A
    u[VI_SLICE] = -1j * eps * A / theta_e
    return {1: u, -1: u.conj()}


def coeff_B(ua, params: PlasmaParams, xi, grad_ua=None) -> np.ndarray:
    """Matrix of the linearized singular source at ``ua``.

    ``z -> B(ua, z) + B(z, ua) - i A1(ua, xi) z``: the quadratic source in
    both slots plus the convection by ``ua`` moved to the right-hand side
    (anti-hermitian). With ``grad_ua`` (x-derivatives of ``ua``), the
    zeroth-order term ``-eps (z.grad) ua`` on the velocity/density rows is added.
    """
    ua = np.asarray(ua, dtype=complex)
    xi = np.asarray(xi, dtype=float)
    cols = [bilinear_B(ua, e, params.theta_e) + bilinear_B(e, ua, params.theta_e) for e in _EYE.astype(complex)]
    M = np.array(cols).T - 1j * symbol_derivative(ua, params, xi)
    if grad_ua is not None:
        g = np.asarray(grad_ua, dtype=complex)          # (3, 14)
        eps = params.eps
        M[6:10, 6:9] -= eps * params.theta_e * g[:, 6:10].T
        M[10:14, 10:13] -= eps**2 * g[:, 10:14].T
    return M


def symbol_derivative(w, params: PlasmaParams, xi, eps: float | None = None) -> np.ndarray:
    """Derivative of the symbol in its (already eps-scaled) state slot, in direction ``w``."""
    eps = params.eps if eps is None else eps
    w = np.asarray(w)
    xi = np.asarray(xi, dtype=float)
    D = np.zeros((STATE_DIM, STATE_DIM), dtype=complex)
    D[np.arange(6, 10), np.arange(6, 10)] = params.theta_e * np.dot(w[VE_SLICE], xi)
    D[np.arange(10, 14), np.arange(10, 14)] = eps * np.dot(w[VI_SLICE], xi)
    return D


def projector_derivative(dec, dA: np.ndarray) -> np.ndarray:
    """First-order change of the acoustic-plus-kernel total projector under ``A -> A + dA``."""
    out = np.zeros((STATE_DIM, STATE_DIM), dtype=complex)
    for lk, Pk, ck in zip(dec.eigenvalues, dec.projectors, dec.classes):
        if ck == KLEIN_GORDON:
            continue
        for lj, Pj, cj in zip(dec.eigenvalues, dec.projectors, dec.classes):
            if cj != KLEIN_GORDON:
                continue
            out += (Pk @ dA @ Pj + Pj @ dA @ Pk) / (lk - lj)
    return out


def _total_projectors_at(params, v, xi, eps):
    M = rest_symbol(eps, params.theta_e, params.alpha, xi)
    M = M + symbol_derivative(v, params, xi, eps)
    d = decompose_matrix(M, xi, params.theta_e)
    return d.pi0, d.pis + d.kernel


def _dv_projector(params, w, xi, which, h=1e-6):
    """Central difference of a total projector (eps = 0) in a complex direction ``w``."""
    w = np.asarray(w, dtype=complex)
    idx = 0 if which == "0" else 1
    out = np.zeros((STATE_DIM, STATE_DIM), dtype=complex)
    for part, scale in ((w.real, 1.0), (w.imag, 1j)):
        if not np.any(part):
            continue
        plus = _total_projectors_at(params, h * part, xi, 0.0)[idx]
        minus = _total_projectors_at(params, -h * part, xi, 0.0)[idx]
        out += scale * (plus - minus) / (2 * h)
    return out


def rho_first_order(params: PlasmaParams, ua, grad_ua, xi, step: float | None = None) -> np.ndarray:
    """First-order part of the projection remainder; ``grad_ua[a]`` is the x_a-derivative of ``ua``.

    Frequency derivatives use central differences with step ``1e-5 (1 + |xi|)``.
    """
    xi = np.asarray(xi, dtype=float)
    if grad_ua is None:
        return np.zeros((STATE_DIM, STATE_DIM), dtype=complex)
    h = 1e-5 * (1.0 + np.linalg.norm(xi)) if step is None else step
    te, al = params.theta_e, params.alpha

    def pieces(x):
        M = rest_symbol(0.0, te, al, x)
        d = decompose_matrix(M, x, te)
        return d.pi0, d.pis + d.kernel, M

    pi0, pis, A0 = pieces(xi)
    out = np.zeros((STATE_DIM, STATE_DIM), dtype=complex)
    for a in range(3):
        g = np.asarray(grad_ua[a], dtype=complex)
        if not np.any(g):
            continue
        e = np.zeros(3)
        e[a] = h
        p0p, psp, Ap = pieces(xi + e)
        p0m, psm, Am = pieces(xi - e)
        d_pis = (psp - psm) / (2 * h)
        d_pi0 = (p0p - p0m) / (2 * h)
        d_pisA = (psp @ Ap - psm @ Am) / (2 * h)
        dv_pi0 = _dv_projector(params, g, xi, "0")
        term = (d_pisA @ dv_pi0 + d_pis @ symbol_derivative(g, params, xi, 0.0)
                + pis @ A0 @ d_pi0 @ dv_pi0 - d_pis @ coeff_B(g, params, xi))
        out += term
    return pis @ out @ pi0


def resonant_source(params: PlasmaParams, ua, p: int, xi, projector_eps: float | None = None,
                    grad_ua=None, include_time_term: bool = True) -> np.ndarray:
    """Matrix whose acoustic-row / Klein-Gordon-column blocks are the linearized
    resonant interaction coefficient for harmonic ``p``.

    ``B(ua) + dPi_s . (i p ua) + eps rho``: the fast time derivative of the
    harmonic is ``i p ua``, and the projector derivative is taken at rest.
    """
    eps = params.eps if projector_eps is None else projector_eps
    xi = np.asarray(xi, dtype=float)
    ua = np.asarray(ua, dtype=complex)
    V = coeff_B(ua, params, xi)
    if include_time_term and np.linalg.norm(xi) > 0.0:
        dec = rest_decomposition(eps, params.theta_e, params.alpha, xi)
        V = V + projector_derivative(dec, symbol_derivative(1j * p * ua, params, xi, eps))
    if grad_ua is not None:
        V = V + eps * rho_first_order(params, ua, grad_ua, xi)
    return V


def interaction_blocks(params: PlasmaParams, ua, p: int, xi, direction: str = "s0", **kw):
    """Norms of the acoustic/Klein-Gordon blocks and their phases.

    ``direction="s0"``: acoustic row, Klein-Gordon column, phase
    ``lambda_k - lambda_j + p`` (the divisor of the homological equation).
    ``direction="0s"``: Klein-Gordon row of the plain coefficient ``B(ua)``.
    Returns a list of ``(lambda_row, lambda_col, norm, phase)``.
    """
    xi = np.asarray(xi, dtype=float)
    dec = rest_decomposition(params.eps, params.theta_e, params.alpha, xi)
    if direction == "s0":
        V = resonant_source(params, ua, p, xi, **kw)
        rows = [(l, P) for l, P, c in zip(dec.eigenvalues, dec.projectors, dec.classes) if c == ACOUSTIC]
        cols = [(l, P) for l, P, c in zip(dec.eigenvalues, dec.projectors, dec.classes) if c == KLEIN_GORDON]
    else:
        V = coeff_B(ua, params, xi)
        rows = [(l, P) for l, P, c in zip(dec.eigenvalues, dec.projectors, dec.classes) if c == KLEIN_GORDON]
        cols = [(l, P) for l, P, c in zip(dec.eigenvalues, dec.projectors, dec.classes) if c == ACOUSTIC]
    out = []
    for lr, Pr in rows:
        for lc, Pc in cols:
            out.append((lr, lc, float(np.linalg.norm(Pr @ V @ Pc, 2)), lr - lc + p))
    return out


def check_nontransparency(params: PlasmaParams, ua: dict, direction=(0.0, 0.0, 1.0), width: float = 0.1,
                          n: int = 21) -> float:
    """Smallest resonant Klein-Gordon/acoustic coupling of ``B(ua)`` near the
    ``(0-s)`` resonance radii (relative window ``1 +/- width``)."""
    if not any(np.any(np.asarray(v)[VE_SLICE]) for v in ua.values()):
        raise DegenerateProfileError("electron velocity of the profile vanishes identically")
    d = np.asarray(direction, dtype=float)
    d /= np.linalg.norm(d)
    rep = locate_resonances(params, "0-s", strict=False)
    radii = sorted({r for _, _, _, r in rep.roots if r > 0})
    if not radii:
        raise DegenerateProfileError("no (0-s) resonance radius to evaluate at")
    eta = np.inf
    for r0 in radii:
        for r in np.linspace(r0 * (1 - width), r0 * (1 + width), n):
            for p, amp in ua.items():
                best = 0.0
                for lr, lc, c, ph in interaction_blocks(params, amp, p, r * d, direction="0s"):
                    # resonant pairing for the Klein-Gordon row: lambda_j - lambda_k + p near 0
                    if abs(ph) < 0.5:
                        best = max(best, c)
                eta = min(eta, best)
    return float(eta)


@dataclass
class TransparencyReport:
    eps_values: list
    C_B: list
    C: list
    C_D: list
    witnesses: list = field(default_factory=list)

    @property
    def spread(self) -> float:
        """Ratio max/min of the fitted C across eps."""
        return float(max(self.C) / min(self.C))


def check_transparency(params: PlasmaParams, A, eps_values=(0.1, 0.05, 0.025), direction=None,
                       n_radii: int = 300, r_max: float = C_L, bound_C: float | None = None) -> TransparencyReport:
    """Fit ``C_B`` in ``|coeff| <= C_B (|xi|^2 + eps |xi|)`` and ``C`` in
    ``|coeff| <= C (eps^2 + |phase|)`` on ``|xi| <= c_l`` for each eps,
    together with ``C_D`` in ``|Pi_k D(ua) Pi_j| <= C_D eps``.

    ``A`` is the complex envelope amplitude of the leading electric field.
    If ``bound_C`` is given, a fitted ``C`` above it raises
    :class:`BoundViolationError` with the worst ``(p, eps, xi)``.
    """
    A = np.asarray(A, dtype=complex)
    if direction is None:
        direction = np.array([1.0, 0.3, 0.5])
    d = np.asarray(direction, dtype=float)
    d /= np.linalg.norm(d)
    CB, CC, CD, wit = [], [], [], []
    for eps in eps_values:
        prm = params.replace(eps=eps)
        ua = harmonic_amplitudes(A, eps, prm.theta_e)
        cb = cc = 0.0
        worst = None
        for r in np.linspace(r_max / n_radii, r_max, n_radii):
            for p, amp in ua.items():
                for lr, lc, c, ph in interaction_blocks(prm, amp, p, r * d):
                    cb = max(cb, c / (r * r + eps * r))
                    q = c / (eps**2 + abs(ph))
                    if q > cc:
                        cc, worst = q, (p, eps, r)
        CB.append(cb)
        CC.append(cc)
        wit.append(worst)
        CD.append(_fit_D(prm, A, d) / eps)
        if bound_C is not None and cc > bound_C:
            raise BoundViolationError(f"transparency constant {cc:.3g} exceeds {bound_C}", witness=worst)
    return TransparencyReport(list(eps_values), CB, CC, CD, wit)


def coeff_D(params: PlasmaParams, ua_real, h: float = 1e-7) -> np.ndarray:
    """Jacobian of the remainder source at a real snapshot ``ua_real``."""
    ua_real = np.asarray(ua_real, dtype=float)
    J = np.zeros((STATE_DIM, STATE_DIM))
    for i in range(STATE_DIM):
        e = np.zeros(STATE_DIM)
        e[i] = h
        J[:, i] = (source_G(params, ua_real + e) - source_G(params, ua_real - e)) / (2 * h)
    return J


def _fit_D(params, A, d, n_radii=20):
    eps = params.eps
    amp = harmonic_amplitudes(A, eps, params.theta_e)[1]
    snap = 2.0 * amp.real
    snap[NE_INDEX] = eps * 0.3          # density fluctuation of size eps
    snap[13] = eps * 0.3 * params.alpha
    D = coeff_D(params, snap)
    worst = 0.0
    for r in np.linspace(C_L / n_radii, C_L, n_radii):
        dec = rest_decomposition(eps, params.theta_e, params.alpha, r * d)
        worst = max(worst, float(np.linalg.norm((dec.pis + dec.kernel) @ D @ dec.pi0, 2)))
    return worst


# -- symmetrizer ---------------------------------------------------------------

@dataclass
class Symmetrizer:
    s0: np.ndarray
    ss: np.ndarray
    gamma: float
    gamma_acoustic: float

    @property
    def matrix(self) -> np.ndarray:
        return self.s0 + self.ss


def acoustic_weight(params: PlasmaParams, r):
    """``-theta_e^2 r^2 / (mu_s^2 - theta_e^2 r^2)`` for the acoustic longitudinal pair."""
    _, mu_s = longitudinal_rest(params.eps, params.theta_e, params.alpha, r)
    q = params.theta_e**2 * np.asarray(r) ** 2
    return -q / (mu_s**2 - q)


def _orthonormal_cluster(vectors):
    Q, _ = np.linalg.qr(np.column_stack(vectors))
    return Q @ Q.conj().T


def build_symmetrizer(params: PlasmaParams, xi) -> Symmetrizer:
    """Block-diagonal symmetrizer diagonal in the rest eigenbasis.

    Klein-Gordon part: weight 1 on transverse pairs, ``lambda/mu`` on the
    longitudinal modes. Acoustic part: weight 1 on the zero cluster
    (orthonormalized) and the acoustic weight on each ``f_s(e+)``.
    """
    xi = np.asarray(xi, dtype=float)
    r = float(np.linalg.norm(xi))
    if r == 0.0:
        raise ValueError("symmetrizer requires |xi| > 0")
    ev = rest_eigenvectors(params, xi)
    lam = ev["e+"][0]
    mu = ev["f+"][0]
    s0 = np.zeros((STATE_DIM, STATE_DIM), dtype=complex)
    for tag in "+-":
        s0 += _orthonormal_cluster([ev["e" + tag][1], ev["e'" + tag][1]])
        f = ev["f" + tag][1]
        s0 += (lam / mu) * np.outer(f, f.conj())
    zero = [ev[k][1] for k in ("e0", "e_s(e-)", "e'_s(e-)", "e_s(e+)", "e'_s(e+)", "f_s(e-)")]
    ss = _orthonormal_cluster(zero)
    w = float(acoustic_weight(params, r))
    for tag in ("+", "-"):
        key = "f_s(e+)" + tag
        if key in ev:
            f = ev[key][1]
            ss += w * np.outer(f, f.conj())
    gamma = float(max(lam / mu, 1.0 / min(lam / mu, 1.0)))
    gamma_ac = float(max(w, 1.0 / w, 1.0))
    return Symmetrizer(s0, ss, gamma, gamma_ac)


def _branch_projectors(dec) -> list[np.ndarray]:
    """Klein-Gordon projectors summed per sign of the eigenvalue."""
    out = []
    for sign in (1.0, -1.0):
        P = np.zeros((STATE_DIM, STATE_DIM), dtype=complex)
        for lam, cls, proj in zip(dec.eigenvalues, dec.classes, dec.projectors):
            if cls == KLEIN_GORDON and np.sign(lam.real) == sign:
                P += proj
        out.append(P)
    return out


def symmetrizer_defect(params: PlasmaParams, ua_real, xi) -> tuple[float, float]:
    """``(|S0 E0 + (S0 E0)^*|, |Ss Es + (Ss Es)^*|)`` at a real snapshot.

    ``E0`` keeps the branch-diagonal Klein-Gordon blocks: couplings between the
    positive and negative branches carry phases ``+-(lambda + mu) + p`` of modulus
    at least one and are removed by the normal form, never symmetrized.
    ``Es`` acts on the complement of the divergence direction ``e0``, which the
    dynamics preserves.
    """
    S = build_symmetrizer(params, xi)
    dec = rest_decomposition(params.eps, params.theta_e, params.alpha, xi)
    Bm = coeff_B(np.asarray(ua_real, dtype=complex), params, xi)
    E0 = sum(P @ Bm @ P for P in _branch_projectors(dec))
    k = kernel_vector(xi).astype(complex)
    div_free = np.eye(STATE_DIM) - np.outer(k, k.conj())
    pis = div_free @ (dec.pis + dec.kernel) @ div_free
    Es = pis @ Bm @ pis
    a = S.s0 @ E0
    b = S.ss @ Es
    return float(np.linalg.norm(a + a.conj().T, 2)), float(np.linalg.norm(b + b.conj().T, 2))
