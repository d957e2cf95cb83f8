import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zkl import fields
from zkl.semiclassical_ops import (GeneralSymbol, Multiplier, PeriodicGrid, ProductSymbol, dilate, dyadic_piece,
                                   hs_eps_norm, para_matrix, para_remainder, para_smooth, plateau, psi, quantize)


@pytest.mark.parametrize("kw", [dict(dim=2), dict(points_per_axis=48), dict(period=0.0)])
def test_grid_validation(kw):
    with pytest.raises(ValueError):
        PeriodicGrid(**kw)


def test_fourier_normalization_single_mode():
    g = PeriodicGrid(1, 32)
    x = g.coordinates()[0]
    coeffs = g.forward(np.exp(3j * x))
    assert np.isclose(coeffs[3], 1.0) and np.isclose(np.sum(np.abs(coeffs)), 1.0)
    assert np.allclose(g.inverse(coeffs), np.exp(3j * x))


def test_hs_norm_of_single_mode():
    g = PeriodicGrid(1, 32)
    x = g.coordinates()[0]
    val = hs_eps_norm(np.exp(4j * x), 0.1, 2.0, g)
    assert np.isclose(val, np.sqrt(2 * np.pi) * (1 + 0.16))


def test_dilation_preserves_l2_norm():
    g = PeriodicGrid(1, 64)
    v = np.cos(g.coordinates()[0])
    w, g2 = dilate(v, g, 0.25)
    assert np.isclose(hs_eps_norm(w, 1.0, 0.0, g2), hs_eps_norm(v, 1.0, 0.0, g))


def test_multiplier_matches_oracle():
    g = PeriodicGrid(1, 32)
    u = np.exp(np.sin(g.coordinates()[0]))
    v = np.zeros(g.shape)
    fast = quantize(Multiplier(lambda xi: 1 / np.sqrt(1 + xi[0] ** 2)), v, u, 0.2, g)
    slow = quantize(GeneralSymbol(lambda vv, xi: 1 / np.sqrt(1 + xi[0] ** 2) + 0 * vv), v, u, 0.2, g)
    assert np.allclose(fast, slow, atol=1e-12)


def test_product_symbol_matches_oracle():
    g = PeriodicGrid(1, 32)
    x = g.coordinates()[0]
    v, u = np.cos(x), np.exp(np.sin(2 * x))
    sym = ProductSymbol([(np.sin, lambda xi: xi[0] / np.sqrt(1 + xi[0] ** 2))])
    assert np.allclose(quantize(sym, v, u, 0.3, g), quantize(sym, v, u, 0.3, g, oracle=True), atol=1e-12)


def test_oracle_size_limit():
    g = PeriodicGrid(3, 32)
    with pytest.raises(ValueError):
        quantize(GeneralSymbol(lambda v, xi: v), np.zeros(g.shape), np.zeros(g.shape), 0.1, g)


def test_unsupported_symbol_type():
    g = PeriodicGrid(1, 8)
    with pytest.raises(TypeError):
        quantize(object(), np.zeros(8), np.zeros(8), 0.1, g)


@given(st.floats(0, 1e4))
@settings(max_examples=100)
def test_dyadic_pieces_sum_to_one(xi):
    total = sum(dyadic_piece(k, xi) for k in range(40))
    assert np.isclose(total, 1.0)


def test_plateau_shape():
    assert plateau(1.0) == 1.0 and plateau(2.0) == 0.0 and 0 < plateau(1.5) < 1


def test_psi_kills_high_symbol_frequencies():
    # eta much larger than xi: outside the paradifferential cone
    assert psi(100.0, 1.0) == 0.0
    assert psi(0.0, 50.0) == 1.0


def test_para_smooth_plus_remainder_is_full_operator():
    g = PeriodicGrid(1, 64, 4 * np.pi)
    x = g.coordinates()[0]
    v, u = np.cos(x) + 0.3 * np.sin(5 * x), np.exp(np.cos(x / 2))
    sym = ProductSymbol([(np.sin, lambda xi: 1 / np.sqrt(1 + xi[0] ** 2))])
    eps = 0.3
    total = para_smooth(sym, v, u, eps, g) + para_remainder(sym, v, u, eps, g)
    assert np.allclose(total, quantize(sym, v, u, eps, g), atol=1e-12)


def test_para_matrix_columns_match_para_smooth():
    g = PeriodicGrid(1, 16)
    x = g.coordinates()[0]
    v = np.cos(x)
    sym = ProductSymbol([(lambda w: w, lambda xi: np.ones_like(xi[0]))])
    M = para_matrix(sym, v, 0.5, g)
    u = np.exp(np.sin(x))
    direct = g.forward(para_smooth(sym, v, u, 0.5, g))
    assert np.allclose(M @ g.forward(u), direct, atol=1e-12)


def test_multiplier_needs_no_smoothing():
    g = PeriodicGrid(1, 16)
    u = np.sin(g.coordinates()[0])
    m = Multiplier(lambda xi: 1 + xi[0] ** 2)
    assert np.allclose(para_remainder(m, None, u, 0.2, g), 0)


def test_vector_calculus_identities():
    g = PeriodicGrid(3, 16)
    x = g.coordinates()
    F = np.array([np.sin(x[1]) * np.cos(x[2]), np.cos(x[0] + x[2]), np.sin(2 * x[0]) * np.cos(x[1])])
    f = np.exp(np.cos(x[0])) * np.sin(x[1] - x[2])
    assert fields.sup(fields.divergence(fields.curl(F, g), g)) < 1e-10
    assert fields.sup(fields.curl(fields.gradient(f, g), g)) < 1e-10
    assert fields.sup(fields.divergence(fields.leray(F, g), g)) < 1e-10
    G = fields.inverse_gradient_potential(f - f.mean(), g)
    assert fields.sup(fields.divergence(G, g) - (f - f.mean())) < 1e-8


def test_one_dimensional_fields_depend_on_x3():
    g = PeriodicGrid(1, 32)
    x = g.coordinates()[0]
    grad = fields.gradient(np.sin(x), g)
    assert np.allclose(grad[:2], 0) and np.allclose(grad[2], np.cos(x))
