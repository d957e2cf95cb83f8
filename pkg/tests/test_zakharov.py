import numpy as np
import pytest

from zkl import fields, zakharov as Z
from zkl.errors import BlowUpError, DivergenceError
from zkl.semiclassical_ops import PeriodicGrid

GRID = PeriodicGrid(1, 64)
X3 = GRID.coordinates()[0]


def _cfg(dt=1e-3, theta=0.2):
    return Z.ZakharovConfig(GRID, dt, theta, 0.1)


def _envelope(component, k=1, amp=0.5):
    E = np.zeros((3, 64), dtype=complex)
    E[component] = amp * np.exp(1j * k * X3)
    return E


def test_config_validation():
    with pytest.raises(ValueError):
        Z.ZakharovConfig(GRID, 0.0)
    with pytest.raises(ValueError):
        Z.ZakharovConfig(GRID, np.inf)
    with pytest.raises(ValueError):
        Z.ZakharovConfig(GRID, 1e-3, splitting_order=1)
    assert np.isclose(_cfg().sound_speed, np.sqrt(1.01))


def test_zero_datum_gives_zero_state_forever():
    s = Z.init_from_datum(np.zeros((3, 64), dtype=complex), GRID)
    out, series = Z.run(s, _cfg(), 0.1)
    assert not np.any(out.E) and not np.any(out.n) and not np.any(out.nt)
    assert np.all(series[:, 1:] == 0)


def test_transverse_plane_wave_accepted_unchanged():
    E0 = _envelope(0, k=3)
    assert np.array_equal(Z.init_from_datum(E0, GRID).E, E0)


def test_longitudinal_datum_rejected():
    with pytest.raises(DivergenceError):
        Z.init_from_datum(_envelope(2, k=2), GRID)


def test_nearly_solenoidal_datum_projected():
    E0 = _envelope(0)
    E0[2] = 1e-9 * np.exp(2j * X3)
    s = Z.init_from_datum(E0, GRID)
    assert fields.sup(fields.divergence(s.E, GRID)) < 1e-14
    assert fields.sup(s.E - _envelope(0)) < 1e-15


def test_envelope_shape_checked():
    with pytest.raises(ValueError):
        Z.init_from_datum(np.zeros((3, 32)), GRID)


@pytest.mark.parametrize("component,k", [(0, 1), (1, 3), (0, -2)])
def test_plane_wave_matches_dispersion(component, k):
    E0 = _envelope(component, k)
    T = 0.5
    out, _ = Z.run(Z.init_from_datum(E0, GRID), _cfg(), T)
    omega = Z.plane_wave_frequency([0, 0, k], 0.2)
    assert fields.sup(out.E - E0 * np.exp(1j * omega * T)) < 1e-10
    assert fields.sup(out.n) < 1e-12


def test_longitudinal_plane_wave_frequency():
    assert np.isclose(Z.plane_wave_frequency([0, 0, 2], 0.5, transverse=False, n0=0.3),
                      0.5 * (0.25 * 4 + 4 + 0.3))


def test_standing_density_wave_is_exact():
    k, T = 3, 0.7
    c = np.sqrt(1.01)
    s = Z.ZakharovState(np.zeros((3, 64), dtype=complex), np.cos(k * X3), np.zeros(64))
    out, _ = Z.run(s, _cfg(dt=0.01), T)
    assert fields.sup(out.n - np.cos(k * X3) * np.cos(c * k * T)) < 1e-12
    assert fields.sup(out.nt + c * k * np.cos(k * X3) * np.sin(c * k * T)) < 1e-12


def test_density_responds_to_intensity_gradient():
    # wave sign: n_tt - c^2 Lap n = +Lap |E|^2 pushes density out of intense regions
    E = np.zeros((3, 64), dtype=complex)
    E[0] = 1.0 + 0.5 * np.cos(X3)
    s = Z.ZakharovState(E, np.zeros(64), np.zeros(64))
    _, _, nt_t = Z.rhs(s, _cfg())
    assert nt_t[0] < 0 and nt_t[32] > 0


def test_rhs_matches_step_to_first_order():
    E = np.zeros((3, 64), dtype=complex)
    E[0] = 0.5 * (1 + 0.5 * np.cos(X3))
    E[1] = 0.1 * np.sin(2 * X3)
    s = Z.ZakharovState(E, 0.1 * np.sin(X3), 0.05 * np.cos(X3))
    h = 1e-5
    nxt = Z.step(s, _cfg(dt=h))
    E_t, n_t, nt_t = Z.rhs(s, _cfg())
    assert fields.sup((nxt.E - s.E) / h - E_t) < 1e-3
    assert fields.sup((nxt.n - s.n) / h - n_t) < 1e-3
    assert fields.sup((nxt.nt - s.nt) / h - nt_t) < 1e-3


def test_mass_conserved_in_three_dimensions():
    g = PeriodicGrid(3, 8)
    x = g.coordinates()
    E = np.zeros((3,) + g.shape, dtype=complex)
    E[0] = 0.5 * np.exp(1j * x[2])
    E[1] = 0.2 * np.exp(1j * x[0])
    cfg = Z.ZakharovConfig(g, 1e-3, 0.2, 0.1)
    out, series = Z.run(Z.init_from_datum(E, g), cfg, 0.1, record_every=20)
    assert len(series) == 6
    assert abs(series[-1, 1] - series[0, 1]) < 1e-11


def test_history_hits_requested_times():
    s = Z.init_from_datum(_envelope(0), GRID)
    snaps = Z.history(s, _cfg(), [0.0, 0.01, 0.05])
    assert [st.t for st in snaps] == [0.0, 0.01, 0.05]
    direct, _ = Z.run(s, _cfg(), 0.05)
    assert np.array_equal(snaps[-1].E, direct.E)


def test_blow_up_reported_with_time():
    E = _envelope(0)
    s = Z.ZakharovState(E, np.full(64, np.nan), np.zeros(64))
    with pytest.raises(BlowUpError) as exc:
        Z.step(s, _cfg())
    assert exc.value.time == pytest.approx(1e-3)


def test_first_order_corrector_of_plane_wave():
    k, A = 2, 0.4
    E0 = _envelope(0, k, A)
    corr = Z.solve_corrector_first_order(Z.init_from_datum(E0, GRID), _cfg())
    expected = np.zeros((3, 64), dtype=complex)
    expected[1] = -k * A * np.exp(1j * k * X3)
    assert fields.sup(corr["B1"] - expected) < 1e-12
    assert fields.sup(corr["ne1"]) < 1e-14
    assert fields.sup(corr["vi1"] + 1j * E0 / 0.2) < 1e-14


def test_quasineutral_mean_densities_are_bit_identical():
    s = Z.ZakharovState(_envelope(0), 0.1 * np.cos(X3), 0.2 * np.sin(X3))
    corr = Z.solve_corrector_first_order(s, _cfg())
    assert corr["ne10"] is s.n and corr["ni10"] is s.n
    assert fields.sup(fields.divergence(corr["vi10"], GRID) + s.nt) < 1e-12
