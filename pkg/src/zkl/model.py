"""Parameters, state layout and the symbols of the Euler-Maxwell system.

State layout (14 real components, fixed order)::

    0:3   B      magnetic field
    3:6   E      electric field
    6:9   v_e    electron velocity
    9     n_e    electron log-density fluctuation
    10:13 v_i    ion velocity
    13    w      scaled ion density slot

The last slot holds ``alpha * n_i`` (the value that makes the symbol hermitian);
:func:`ion_density` converts back to the ion log-density.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

B_SLICE = slice(0, 3)
E_SLICE = slice(3, 6)
VE_SLICE = slice(6, 9)
NE_INDEX = 9
VI_SLICE = slice(10, 13)
W_INDEX = 13
STATE_DIM = 14
SERIES_SWITCH = 1e-4


@dataclass(frozen=True)
class PlasmaParams:
    eps: float = 0.001
    theta_e: float = 0.2
    alpha: float = 0.1
    omega: float = 1.0
    harmonics: tuple = field(default=(-1, 1))

    def __post_init__(self):
        if not (0.0 < self.eps < 1.0):
            raise ValueError(f"eps must lie in (0, 1), got {self.eps}")
        if not self.theta_e > 0.0:
            raise ValueError(f"theta_e must be positive, got {self.theta_e}")
        if not self.alpha >= 0.0:
            raise ValueError(f"alpha must be non-negative, got {self.alpha}")
        if self.omega != 1.0:
            raise ValueError("omega is fixed to 1")
        if tuple(sorted(self.harmonics)) != (-1, 1):
            raise ValueError("harmonics are fixed to {-1, 1}")

    def replace(self, **kw) -> "PlasmaParams":
        d = dict(eps=self.eps, theta_e=self.theta_e, alpha=self.alpha)
        d.update(kw)
        return PlasmaParams(**d)


def zero_state(shape=()) -> np.ndarray:
    return np.zeros((STATE_DIM,) + tuple(shape))


def make_state(B=0.0, E=0.0, v_e=0.0, n_e=0.0, v_i=0.0, w=0.0, dtype=float) -> np.ndarray:
    """Pack named components into a 14-vector (broadcasting scalars)."""
    u = np.zeros(STATE_DIM, dtype=dtype)
    u[B_SLICE] = B
    u[E_SLICE] = E
    u[VE_SLICE] = v_e
    u[NE_INDEX] = n_e
    u[VI_SLICE] = v_i
    u[W_INDEX] = w
    return u


def ion_density(w, alpha: float):
    """Ion log-density from the scaled slot; zero when ``alpha == 0``
    (the slot carries no information in that case)."""
    if alpha == 0.0:
        return np.zeros_like(w)
    return w / alpha


def cross_matrix(xi) -> np.ndarray:
    """Matrix of ``z -> xi x z``."""
    x = np.asarray(xi, dtype=float)
    return np.array([[0.0, -x[2], x[1]], [x[2], 0.0, -x[0]], [-x[1], x[0], 0.0]])


def convection_scalars(params: PlasmaParams, u, xi) -> tuple[float, float]:
    """``(x, y) = (eps theta_e v_e.xi, eps^2 v_i.xi)``."""
    u = np.asarray(u)
    xi = np.asarray(xi, dtype=float)
    x = params.eps * params.theta_e * float(np.dot(u[VE_SLICE].real, xi))
    y = params.eps**2 * float(np.dot(u[VI_SLICE].real, xi))
    return x, y


def rest_symbol(eps: float, theta_e: float, alpha: float, xi) -> np.ndarray:
    """Constant-coefficient part ``A0(eps, xi)``; ``xi`` may be stacked ``(..., 3)``."""
    xi = np.asarray(xi, dtype=float)
    lead = xi.shape[:-1]
    M = np.zeros(lead + (STATE_DIM, STATE_DIM), dtype=complex)
    x1, x2, x3 = xi[..., 0], xi[..., 1], xi[..., 2]
    curl = np.zeros(lead + (3, 3))
    curl[..., 0, 1], curl[..., 0, 2] = -x3, x2
    curl[..., 1, 0], curl[..., 1, 2] = x3, -x1
    curl[..., 2, 0], curl[..., 2, 1] = -x2, x1
    eye = np.eye(3)
    M[..., 0:3, 3:6] = curl
    M[..., 3:6, 0:3] = -curl
    M[..., 3:6, 6:9] = 1j * eye
    M[..., 6:9, 3:6] = -1j * eye
    M[..., 3:6, 10:13] = -1j * eps / theta_e * eye
    M[..., 10:13, 3:6] = 1j * eps / theta_e * eye
    M[..., 6:9, 9] = theta_e * xi
    M[..., 9, 6:9] = theta_e * xi
    M[..., 10:13, 13] = eps * alpha * xi
    M[..., 13, 10:13] = eps * alpha * xi
    return M


def assemble_symbol(params: PlasmaParams, u, xi) -> np.ndarray:
    """Hermitian 14x14 symbol ``A0(eps, xi) + eps A1(eps, u, xi)``.

    ``A1`` is diagonal: ``theta_e v_e.xi`` on the electron rows and
    ``eps v_i.xi`` on the ion rows.
    """
    M = rest_symbol(params.eps, params.theta_e, params.alpha, xi)
    x, y = convection_scalars(params, u, xi)
    idx_e = np.arange(6, 10)
    idx_i = np.arange(10, 14)
    M[idx_e, idx_e] += x
    M[idx_i, idx_i] += y
    return M


def bilinear_B(u, v, theta_e: float = 0.1) -> np.ndarray:
    """Quadratic source ``B(u, v) = (0, n_e v'_e, -theta_e v'_e x B, 0, 0, 0)``.

    Works on single states or on fields with trailing grid axes.
    """
    u = np.asarray(u)
    v = np.asarray(v)
    out = np.zeros(np.broadcast_shapes(u.shape, v.shape), dtype=np.result_type(u, v))
    out[E_SLICE] = u[NE_INDEX] * v[VE_SLICE]
    out[VE_SLICE] = -theta_e * np.cross(v[VE_SLICE], u[B_SLICE], axis=0)
    return out


def f_eps(x, eps: float):
    """``(exp(eps x) - 1 - eps x) / eps^2`` with a series branch near ``eps x = 0``."""
    x = np.asarray(x, dtype=float)
    z = eps * x
    small = np.abs(z) < SERIES_SWITCH
    series = 0.5 * x * x * (1.0 + z / 3.0 + z * z / 12.0)
    with np.errstate(over="ignore"):
        closed = (np.expm1(z) - z) / eps**2
    return np.where(small, series, closed)


def source_G(params: PlasmaParams, u) -> np.ndarray:
    """Remainder source of the log-density system.

    E-row: ``f(n_e) v_e - (n_i + eps f(n_i)) v_i / theta_e``; ion row:
    ``(eps / theta_e) v_i x B``; everything else zero. ``n_i`` is recovered
    from the scaled slot.
    """
    u = np.asarray(u, dtype=float)
    eps, te = params.eps, params.theta_e
    n_i = ion_density(u[W_INDEX], params.alpha)
    out = np.zeros_like(u)
    out[E_SLICE] = f_eps(u[NE_INDEX], eps) * u[VE_SLICE] - (n_i + eps * f_eps(n_i, eps)) * u[VI_SLICE] / te
    out[VI_SLICE] = (eps / te) * np.cross(u[VI_SLICE], u[B_SLICE], axis=0)
    return out


def sharp_transform(n, inverse: bool = False, eps: float = 1.0):
    """Map densities between the fluctuation form and the log form.

    Forward: ``n = log(1 + eps n_sharp) / eps``. Inverse: ``n_sharp = expm1(eps n) / eps``.
    """
    n = np.asarray(n, dtype=float)
    if inverse:
        return np.expm1(eps * n) / eps
    arg = eps * n
    if np.any(1.0 + arg <= 0.0):
        raise ValueError("density outside the domain: 1 + n_sharp must be positive")
    return np.log1p(arg) / eps


def gauss_residual(params: PlasmaParams, div_E, n_e, w):
    """Gauss-law invariant ``div E + (exp(eps n_e) - exp(eps n_i)) / (eps^2 theta_e)``."""
    eps = params.eps
    n_i = ion_density(w, params.alpha)
    return div_E + (np.expm1(eps * n_e) - np.expm1(eps * n_i)) / (eps**2 * params.theta_e)
