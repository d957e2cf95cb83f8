import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zkl import spectral
from zkl.errors import GapViolationError
from zkl.model import (PlasmaParams, assemble_symbol, bilinear_B, f_eps, gauss_residual,
                       ion_density, make_state, rest_symbol, sharp_transform, source_G, zero_state)

PARAMS = PlasmaParams(eps=0.05, theta_e=0.2, alpha=0.1)


@pytest.mark.parametrize("kw", [dict(eps=0.0), dict(eps=1.0), dict(theta_e=0.0), dict(alpha=-0.1),
                                dict(omega=2.0), dict(harmonics=(1, 2))])
def test_params_reject_invalid(kw):
    with pytest.raises(ValueError):
        PlasmaParams(**kw)


def test_defaults_and_replace():
    p = PlasmaParams()
    assert (p.eps, p.theta_e, p.alpha) == (0.001, 0.2, 0.1)
    q = p.replace(eps=0.1)
    assert q.eps == 0.1 and q.theta_e == p.theta_e


def test_make_state_layout():
    u = make_state(B=1, E=2, v_e=3, n_e=4, v_i=5, w=6)
    assert list(u) == [1] * 3 + [2] * 3 + [3] * 3 + [4] + [5] * 3 + [6]


def test_zero_state_has_zero_sources():
    u = zero_state()
    assert not np.any(bilinear_B(u, u, 0.2))
    assert not np.any(source_G(PARAMS, u))


@given(st.floats(-50, 50), st.floats(1e-4, 0.5))
def test_f_eps_matches_definition(x, eps):
    exact = (np.expm1(eps * x) - eps * x) / eps**2
    assert np.isclose(f_eps(x, eps), exact, rtol=1e-9, atol=1e-14)


def test_f_eps_series_branch_is_continuous():
    eps = 1e-3
    x = np.array([0.0999, 0.1001]) / eps * 1e-3   # straddles the series switch
    vals = f_eps(x, eps)
    assert np.allclose(vals, 0.5 * x**2 * (1 + eps * x / 3), rtol=1e-7)


@given(st.floats(-0.9, 10.0), st.floats(1e-3, 0.5))
def test_sharp_transform_round_trip(scaled, eps):
    n_sharp = scaled / eps           # 1 + eps n_sharp stays positive
    n = sharp_transform(n_sharp, eps=eps)
    assert np.isclose(sharp_transform(n, inverse=True, eps=eps), n_sharp, rtol=1e-10, atol=1e-10)


def test_sharp_transform_rejects_non_physical_density():
    with pytest.raises(ValueError):
        sharp_transform(-30.0, eps=0.1)


def test_ion_density_zero_alpha():
    assert ion_density(np.ones(3), 0.0).tolist() == [0, 0, 0]
    assert ion_density(np.ones(3), 0.5).tolist() == [2, 2, 2]


def test_gauss_residual_of_neutral_state_is_divergence():
    assert gauss_residual(PARAMS, 0.3, 0.0, 0.0) == 0.3


@given(st.lists(st.floats(-5, 5), min_size=3, max_size=3), st.lists(st.floats(-5, 5), min_size=14, max_size=14))
@settings(max_examples=50)
def test_symbol_is_hermitian(xi, u):
    M = assemble_symbol(PARAMS, np.array(u), np.array(xi))
    assert np.allclose(M, M.conj().T, atol=1e-14)


def test_rest_symbol_is_stackable():
    xi = np.random.default_rng(0).normal(size=(4, 5, 3))
    M = rest_symbol(0.1, 0.2, 0.1, xi)
    assert M.shape == (4, 5, 14, 14)
    assert np.allclose(M[2, 3], rest_symbol(0.1, 0.2, 0.1, xi[2, 3]))


def test_bilinear_B_structure():
    u = make_state(B=[0, 0, 1.0], n_e=2.0)
    v = make_state(v_e=[1.0, 0, 0])
    out = bilinear_B(u, v, theta_e=0.5)
    assert np.allclose(out[3:6], [2.0, 0, 0])
    assert np.allclose(out[6:9], -0.5 * np.cross([1.0, 0, 0], [0, 0, 1.0]))
    assert not np.any(out[[0, 1, 2, 9, 10, 11, 12, 13]])


def test_decomposition_counts_and_classes():
    dec = spectral.eigendecompose(PARAMS, zero_state(), np.array([0.3, -0.2, 1.1]))
    assert int(sum(dec.multiplicities)) == 14
    kg = sum(m for m, c in zip(dec.multiplicities, dec.classes) if c == spectral.KLEIN_GORDON)
    assert kg == spectral.KG_COUNT
    assert dec.classes.count(spectral.KERNEL) == 1
    assert np.allclose(dec.pi0 + dec.pis + dec.kernel, np.eye(14), atol=1e-12)


def test_transverse_modes_are_double():
    xi = np.array([0.0, 0.0, 1.3])
    dec = spectral.rest_decomposition(0.05, 0.2, 0.1, xi)
    lam = spectral.transverse_kg(0.05, 0.2, 1.3)
    for sign in (1, -1):
        i = int(np.argmin(np.abs(dec.eigenvalues - sign * lam)))
        assert abs(dec.eigenvalues[i] - sign * lam) < 1e-12 and dec.multiplicities[i] == 2


def test_rest_eigenvectors_are_eigenvectors():
    xi = np.array([0.3, -0.5, 0.8])
    M = rest_symbol(PARAMS.eps, PARAMS.theta_e, PARAMS.alpha, xi)
    vecs = spectral.rest_eigenvectors(PARAMS, xi)
    assert len(vecs) == 14
    for label, (lam, v) in vecs.items():
        assert np.linalg.norm(M @ v - lam * v) < 1e-12, label
    V = np.column_stack([v for _, v in vecs.values()])
    assert abs(np.linalg.det(V)) > 1e-8


def test_longitudinal_rest_matches_eigenvalues():
    xi = np.array([0.0, 0.0, 2.0])
    mu, mu_s = spectral.longitudinal_rest(0.05, 0.2, 0.1, 2.0)
    lam = np.linalg.eigvalsh(rest_symbol(0.05, 0.2, 0.1, xi))
    assert np.min(np.abs(lam - mu)) < 1e-12 and np.min(np.abs(lam - mu_s)) < 1e-12


def test_dispersion_roots_are_eigenvalues():
    xi = np.array([0.4, 0.1, -0.7])
    u = make_state(v_e=[0.3, -0.2, 0.5], v_i=[1.0, 0.5, -0.2])
    conv = (PARAMS.eps * PARAMS.theta_e * u[6:9] @ xi, PARAMS.eps**2 * u[10:13] @ xi)
    roots = spectral.dispersion_polynomials(PARAMS, conv, xi)
    lam = np.linalg.eigvalsh(assemble_symbol(PARAMS, u, xi))
    for r in np.concatenate([roots.transverse, roots.longitudinal]):
        assert np.min(np.abs(lam - r)) < 1e-8


def test_gap_violation_carries_witness():
    # a huge convection pushes acoustic modes above the threshold
    u = make_state(v_e=[0.0, 0.0, 1e4])
    with pytest.raises(GapViolationError) as exc:
        spectral.eigendecompose(PARAMS, u, np.array([0.0, 0.0, 1.0]))
    assert "xi" in exc.value.witness


def test_orthonormal_frame_right_handed():
    x1, x2, hat = spectral.orthonormal_frame([1.0, 2.0, -0.5])
    assert np.isclose(np.dot(np.cross(x1, x2), hat), 1.0)
    with pytest.raises(ValueError):
        spectral.orthonormal_frame([0, 0, 0])


def test_symbol_at_zero_frequency_is_the_coupling_block():
    M = assemble_symbol(PARAMS, zero_state(), np.zeros(3))
    expected = np.zeros((14, 14), dtype=complex)
    eye = np.eye(3)
    expected[3:6, 6:9], expected[6:9, 3:6] = 1j * eye, -1j * eye
    k = PARAMS.eps / PARAMS.theta_e
    expected[3:6, 10:13], expected[10:13, 3:6] = -1j * k * eye, 1j * k * eye
    assert np.array_equal(M, expected)


def test_convection_block_vanishes_without_velocities():
    u = make_state(B=[1, 2, 3], E=[0.1, 0.2, 0.3], n_e=0.5, w=0.2)
    xi = np.array([0.3, 0.1, 2.0])
    assert np.array_equal(assemble_symbol(PARAMS, u, xi), rest_symbol(PARAMS.eps, PARAMS.theta_e, PARAMS.alpha, xi))


def test_lorentz_row_of_bilinear_source():
    out = bilinear_B(make_state(B=[0, 0, 1.0]), make_state(v_e=[1.0, 0, 0]), theta_e=0.3)
    assert np.allclose(out[6:9], [0, 0.3, 0])
