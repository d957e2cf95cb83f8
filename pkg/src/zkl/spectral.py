"""Eigenvalues, eigenvectors and total projectors of the Euler-Maxwell symbol."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial

from .errors import GapViolationError
from .model import PlasmaParams, STATE_DIM, assemble_symbol, make_state, rest_symbol

KLEIN_GORDON = "KleinGordon"
ACOUSTIC = "Acoustic"
KERNEL = "Kernel"
KG_COUNT = 6
GROUP_TOL = 1e-9


@dataclass
class SpectralDecomposition:
    eigenvalues: np.ndarray      # distinct eigenvalues, ascending
    multiplicities: np.ndarray
    classes: list
    projectors: list
    pi0: np.ndarray
    pis: np.ndarray
    kernel: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return sum(lam * P for lam, P in zip(self.eigenvalues, self.projectors))

    def acoustic_values(self) -> np.ndarray:
        return np.array([l for l, c in zip(self.eigenvalues, self.classes) if c == ACOUSTIC])

    def klein_gordon_values(self) -> np.ndarray:
        return np.array([l for l, c in zip(self.eigenvalues, self.classes) if c == KLEIN_GORDON])


@dataclass
class DispersionRoots:
    transverse: np.ndarray
    longitudinal: np.ndarray
    kernel_root: float = 0.0


def orthonormal_frame(xi):
    """Right-handed frame ``(xi1, xi2, xi_hat)`` with ``xi1`` built from the least aligned axis."""
    xi = np.asarray(xi, dtype=float)
    r = np.linalg.norm(xi)
    if r == 0.0:
        raise ValueError("direction undefined at xi = 0")
    hat = xi / r
    axis = np.eye(3)[np.argmin(np.abs(hat))]
    xi1 = np.cross(axis, hat)
    xi1 /= np.linalg.norm(xi1)
    xi2 = np.cross(hat, xi1)
    return xi1, xi2, hat


def acoustic_threshold(params: PlasmaParams, xi) -> float:
    return 0.5 * np.sqrt(1.0 + params.theta_e**2 * float(np.dot(xi, xi)))


def kernel_vector(xi) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    return make_state(B=xi / np.linalg.norm(xi), dtype=complex)


def _group(lam, vecs, tol):
    groups = []
    start = 0
    n = len(lam)
    scale = 1.0 + np.max(np.abs(lam)) if n else 1.0
    for i in range(1, n + 1):
        if i == n or lam[i] - lam[start] > tol * scale:
            V = vecs[:, start:i]
            groups.append((float(np.mean(lam[start:i])), i - start, V @ V.conj().T))
            start = i
    return groups


def decompose_matrix(M: np.ndarray, xi, theta_e: float, tol: float = GROUP_TOL) -> SpectralDecomposition:
    """Classify and group the spectrum of an already assembled symbol ``M``.

    At ``xi != 0`` the kernel direction ``e0`` is split off exactly and the
    remaining 13 modes are diagonalized on its orthogonal complement.
    Acoustic iff ``|lambda| < 0.5 sqrt(1 + theta_e^2 |xi|^2)``; anything
    other than six Klein-Gordon modes raises :class:`GapViolationError`.
    """
    xi = np.asarray(xi, dtype=float)
    kernel = np.zeros((STATE_DIM, STATE_DIM), dtype=complex)
    if np.linalg.norm(xi) > 0.0:
        e0 = kernel_vector(xi)
        kernel = np.outer(e0, e0.conj())
        Q, _ = np.linalg.qr(np.column_stack([e0, np.eye(STATE_DIM)]))
        Q = Q[:, 1:STATE_DIM]
        lam, W = np.linalg.eigh(Q.conj().T @ M @ Q)
        vecs = Q @ W
    else:
        lam, vecs = np.linalg.eigh(M)

    thr = 0.5 * np.sqrt(1.0 + theta_e**2 * float(np.dot(xi, xi)))
    n_kg = int(np.sum(np.abs(lam) >= thr))
    if n_kg != KG_COUNT:
        raise GapViolationError(
            f"{n_kg} modes above the acoustic threshold {thr:.4g}, expected {KG_COUNT}",
            witness={"xi": xi.tolist(), "eigenvalues": lam.tolist()},
        )
    eigenvalues, mults, classes, projs = [], [], [], []
    for l, m, P in _group(lam, vecs, tol):
        eigenvalues.append(l)
        mults.append(m)
        classes.append(KLEIN_GORDON if abs(l) >= thr else ACOUSTIC)
        projs.append(P)
    if np.linalg.norm(xi) > 0.0:
        eigenvalues.append(0.0)
        mults.append(1)
        classes.append(KERNEL)
        projs.append(kernel)
    order = np.argsort(eigenvalues, kind="stable")
    eigenvalues = np.array(eigenvalues)[order]
    mults = np.array(mults)[order]
    classes = [classes[i] for i in order]
    projs = [projs[i] for i in order]
    pi0 = sum(P for P, c in zip(projs, classes) if c == KLEIN_GORDON)
    pis = sum((P for P, c in zip(projs, classes) if c == ACOUSTIC), np.zeros_like(kernel))
    return SpectralDecomposition(eigenvalues, mults, classes, projs, pi0, pis, kernel)


def eigendecompose(params: PlasmaParams, u, xi, tol: float = GROUP_TOL) -> SpectralDecomposition:
    """Hermitian eigendecomposition of the symbol at ``(eps, u, xi)`` with mode labels."""
    return decompose_matrix(assemble_symbol(params, u, xi), xi, params.theta_e, tol)


def rest_decomposition(eps: float, theta_e: float, alpha: float, xi, tol: float = GROUP_TOL):
    """Decomposition of the rest symbol; unlike :func:`eigendecompose`, ``eps = 0`` is allowed."""
    return decompose_matrix(rest_symbol(eps, theta_e, alpha, xi), xi, theta_e, tol)


def total_projectors(params: PlasmaParams, u, xi):
    """``(pi0, pis)``: Klein-Gordon total and acoustic-plus-kernel total."""
    d = eigendecompose(params, u, xi)
    return d.pi0, d.pis + d.kernel


def transverse_polynomial(params: PlasmaParams, x: float, y: float, xi) -> Polynomial:
    """Degree-four transverse factor in the frequency variable."""
    k2 = float(np.dot(xi, xi))
    e2 = params.eps**2 / params.theta_e**2
    w = Polynomial([0.0, 1.0])
    return (w - x) * (w - y) * (w**2 - 1.0 - k2 - e2) - x * (w - y) - e2 * y * (w - x)


def longitudinal_polynomial(params: PlasmaParams, x: float, y: float, xi) -> Polynomial:
    """Degree-five longitudinal factor in the frequency variable."""
    k2 = float(np.dot(xi, xi))
    eps, te, al = params.eps, params.theta_e, params.alpha
    e2 = eps**2 / te**2
    w = Polynomial([0.0, 1.0])
    ion = (w - y) ** 2 - eps**2 * al**2 * k2
    return w * ion * ((w - x) ** 2 - 1.0 - te**2 * k2) + x * ion - e2 * (w - y) * ((w - x) ** 2 - te**2 * k2)


def characteristic_product(params: PlasmaParams, x: float, y: float, xi, omega):
    """``omega * P_T(omega)^2 * P_L(omega)``; equals ``det(omega - A)``.

    The transverse factor enters squared because each transverse mode is
    doubly degenerate.
    """
    pt = transverse_polynomial(params, x, y, xi)
    pl = longitudinal_polynomial(params, x, y, xi)
    return omega * pt(omega) ** 2 * pl(omega)


def _real_roots(poly: Polynomial) -> np.ndarray:
    r = poly.roots()
    return np.sort(r.real)


def dispersion_polynomials(params: PlasmaParams, conv, xi) -> DispersionRoots:
    """All roots of both dispersion factors at convection scalars ``conv = (x, y)``."""
    xi = np.asarray(xi, dtype=float)
    if np.linalg.norm(xi) == 0.0:
        raise ValueError("dispersion roots require |xi| > 0")
    x, y = conv
    return DispersionRoots(
        transverse=_real_roots(transverse_polynomial(params, x, y, xi)),
        longitudinal=_real_roots(longitudinal_polynomial(params, x, y, xi)),
    )


def transverse_kg(eps: float, theta_e: float, r):
    """Positive transverse Klein-Gordon frequency at rest."""
    return np.sqrt(1.0 + np.asarray(r) ** 2 + eps**2 / theta_e**2)


def longitudinal_rest(eps: float, theta_e: float, alpha: float, r):
    """Positive longitudinal frequencies at rest: ``(mu_kg, mu_acoustic)``.

    The longitudinal factor at zero convection is ``w`` times a quadratic in
    ``w^2``; both positive roots are returned in closed form.
    """
    r = np.asarray(r, dtype=float)
    te, al = theta_e, alpha
    a = eps**2 * al**2 * r**2
    b = 1.0 + te**2 * r**2
    c = eps**2 / te**2
    s = a + b + c
    prod = a * b + c * te**2 * r**2
    disc = np.sqrt(np.maximum(s * s - 4.0 * prod, 0.0))
    big = 0.5 * (s + disc)
    small = np.maximum(prod / big, 0.0)   # avoids cancellation in (s - disc) / 2
    return np.sqrt(big), np.sqrt(small)


def _unit(v):
    return v / np.linalg.norm(v)


def rest_eigenvectors(params: PlasmaParams, xi) -> dict:
    """Labelled eigenvectors of the rest symbol, normalized.

    Returns ``{label: (eigenvalue, vector)}``. The frame ``(xi1, xi2)`` is
    right-handed around ``xi``; in that frame the vectors ``e_s(e-)``,
    ``e_s(e+)`` and ``e'_s(e+)`` carry a flipped sign on their second entry
    relative to the other transverse vectors, which is what makes them
    eigenvectors.
    """
    xi = np.asarray(xi, dtype=float)
    r = np.linalg.norm(xi)
    if r == 0.0:
        raise ValueError("eigenvectors are undefined at xi = 0")
    eps, te, al = params.eps, params.theta_e, params.alpha
    x1, x2, hat = orthonormal_frame(xi)

    def st(**kw):
        return make_state(dtype=complex, **kw)

    out = {"e0": (0.0, kernel_vector(xi))}
    lam = transverse_kg(eps, te, r)
    for sign, tag in ((1.0, "+"), (-1.0, "-")):
        L = sign * lam
        out["e" + tag] = (L, _unit(st(B=r * x2 / L, E=x1, v_e=-1j * x1 / L, v_i=1j * eps / te * x1 / L)))
        out["e'" + tag] = (L, _unit(st(B=-r * x1 / L, E=x2, v_e=-1j * x2 / L, v_i=1j * eps / te * x2 / L)))
    out["e_s(e-)"] = (0.0, _unit(st(B=x1, v_e=-1j * r * x2)))
    out["e'_s(e-)"] = (0.0, _unit(st(B=x2, v_e=1j * r * x1)))
    out["e_s(e+)"] = (0.0, _unit(st(B=1j * eps * x2 / (te * r), v_i=x1)))
    out["e'_s(e+)"] = (0.0, _unit(st(B=-1j * eps * x1 / (te * r), v_i=x2)))

    mu_kg, mu_ac = longitudinal_rest(eps, te, al, r)

    def f_long(mu):
        q = mu**2 - te**2 * r**2
        d = mu**2 - eps**2 * al**2 * r**2
        return _unit(st(E=q / mu * hat, v_e=-1j * hat, n_e=-1j * te * r / mu,
                        v_i=1j * eps / te * q / d * hat, w=1j * al * eps**2 / te * q / d * r / mu))

    def f_acoustic(mu):
        mt = (mu**2 - eps**2 * al**2 * r**2) / mu
        q = mu**2 - te**2 * r**2
        return _unit(st(E=te / eps * mt * hat, v_e=-1j * te / eps * mt * mu / q * hat,
                        n_e=-1j * te**2 / eps * r * mt / q, v_i=1j * hat, w=1j * al * eps * r / mu))

    out["f+"] = (mu_kg, f_long(mu_kg))
    out["f-"] = (-mu_kg, f_long(-mu_kg))
    fs = st(E=-1j * te * xi, n_e=1.0, w=-1.0 / al) if al > 0 else st(E=-1j * te * xi, n_e=1.0)
    out["f_s(e-)"] = (0.0, _unit(fs))
    if mu_ac > 0.0:
        out["f_s(e+)+"] = (mu_ac, f_acoustic(mu_ac))
        out["f_s(e+)-"] = (-mu_ac, f_acoustic(-mu_ac))
    return out
