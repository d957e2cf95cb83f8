import numpy as np
import pytest

from zkl import em_dynamics, fields, wkb, zakharov as Z
from zkl.errors import InconsistentCorrectorError
from zkl.model import E_SLICE, VE_SLICE, PlasmaParams
from zkl.semiclassical_ops import PeriodicGrid

GRID = PeriodicGrid(1, 64)
CFG = Z.ZakharovConfig(GRID, 1e-3, 0.5, 0.1)
PARAMS = PlasmaParams(eps=0.1, theta_e=0.5, alpha=0.1)


@pytest.fixture(scope="module")
def snapshot():
    s = Z.init_from_datum(em_dynamics.builtin_envelope("modulated", GRID), GRID)
    return Z.run(s, CFG, 0.05)[0]


def test_zero_snapshot_gives_zero_profile():
    s = Z.init_from_datum(np.zeros((3, 64), dtype=complex), GRID)
    prof = wkb.build_profile(s, CFG, PARAMS, 2, with_rates=True)
    assert all(not np.any(v) for v in prof.harmonics.values())
    assert not np.any(wkb.evaluate(prof, 0.3))
    assert not np.any(wkb.residual(prof, 0.1))


@pytest.mark.parametrize("order", wkb.ORDERS)
def test_profile_is_real_and_has_all_slots(snapshot, order):
    prof = wkb.build_profile(snapshot, CFG, PARAMS, order)
    assert set(prof.harmonics) == {(m, p) for m in wkb.ORDERS for p in range(-2, 3)}
    for (m, p), val in prof.harmonics.items():
        assert np.array_equal(val, np.conj(prof.harmonics[m, -p]))
    assert np.isrealobj(wkb.evaluate(prof, 0.123))


def test_leading_profile_matches_well_prepared_datum():
    E0 = em_dynamics.builtin_envelope("modulated", GRID)
    s = Z.init_from_datum(E0, GRID)
    prof = wkb.build_profile(s, CFG, PARAMS, 0)
    assert np.allclose(wkb.evaluate(prof, 0.0), em_dynamics.well_prepared_datum(E0), atol=1e-15)


def test_fast_phase_flips_sign_after_half_period(snapshot):
    prof = wkb.build_profile(snapshot, CFG, PARAMS, 0)
    eps = PARAMS.eps
    assert np.allclose(wkb.evaluate(prof, np.pi * eps**2), -wkb.evaluate(prof, 0.0), atol=1e-13)


def test_plane_wave_corrector_is_transverse():
    E0 = np.zeros((3, 64), dtype=complex)
    E0[0] = 0.4 * np.exp(2j * GRID.coordinates()[0])
    prof = wkb.build_profile(Z.init_from_datum(E0, GRID), CFG, PARAMS, 1)
    assert fields.sup(prof.component(1, 1)[9]) < 1e-14                 # n_e harmonic vanishes
    assert fields.sup(prof.component(1, 1)[1] + 2 * 0.4 * np.exp(2j * GRID.coordinates()[0])) < 1e-12


def test_second_order_leaves_envelope_alone(snapshot):
    prof = wkb.build_profile(snapshot, CFG, PARAMS, 2)
    assert not np.any(prof.component(2, 1)[E_SLICE])
    assert np.any(prof.component(2, 1)[VE_SLICE])


def test_inconsistent_correctors_rejected(snapshot):
    corr = Z.solve_corrector_first_order(snapshot, CFG)
    corr["ni10"] = corr["ni10"] + 1e-3
    with pytest.raises(InconsistentCorrectorError):
        wkb.build_profile(snapshot, CFG, PARAMS, 1, correctors=corr)


def test_parameter_mismatch_rejected(snapshot):
    with pytest.raises(ValueError):
        wkb.build_profile(snapshot, CFG, PARAMS.replace(theta_e=0.2), 1)
    with pytest.raises(ValueError):
        wkb.build_profile(snapshot, CFG, PARAMS, 3)


def test_time_derivative_needs_rates(snapshot):
    with pytest.raises(ValueError):
        wkb.time_derivative(wkb.build_profile(snapshot, CFG, PARAMS, 0))


def test_time_derivative_matches_finite_difference_of_fast_phase(snapshot):
    # with frozen slow fields the derivative is the fast phase alone
    prof = wkb.build_profile(snapshot, CFG, PARAMS, 2, with_rates=True)
    frozen = wkb.WKBProfile(prof.harmonics, prof.eps, prof.params, prof.grid, prof.order, prof.time, rates={
        k: np.zeros_like(v) for k, v in prof.harmonics.items()})
    t, h = 0.01, 1e-7
    fd = (wkb.evaluate(frozen, t + h) - wkb.evaluate(frozen, t - h)) / (2 * h)
    assert np.allclose(wkb.time_derivative(frozen, t), fd, rtol=1e-5, atol=1e-3)


def test_residual_orders_increase(snapshot):
    orders = [wkb.residual_study(snapshot, CFG, PARAMS, (0.2, 0.1, 0.05), m).fitted_order for m in wkb.ORDERS]
    assert orders[0] == pytest.approx(-1.0, abs=0.2)
    assert orders[1] == pytest.approx(0.0, abs=0.3)
    assert orders[2] >= 0.9


def test_with_eps_keeps_harmonics(snapshot):
    prof = wkb.build_profile(snapshot, CFG, PARAMS, 1)
    other = wkb.with_eps(prof, 0.05)
    assert other.eps == 0.05 and other.params.eps == 0.05 and other.harmonics is prof.harmonics
