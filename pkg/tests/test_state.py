import numpy as np
import pytest

from twophase1d.state import (
    FlowState, Grid1D, ModelParams, PositivityError,
    desymmetrize, pressure, sound_speed, symmetrize,
)


def test_pressure_value():
    p = ModelParams(a=1.0, gamma=1.4)
    # frozen: 2**1.4
    assert pressure(2.0, p) == pytest.approx(2.6390158215457884, rel=1e-14)


def test_sound_speed_value():
    p = ModelParams(a=1.0, gamma=1.4, rho_star=1.0)
    # frozen: sqrt(1.4)
    assert sound_speed(1.0, p) == pytest.approx(1.1832159566199232, rel=1e-14)
    assert p.sigma_star == pytest.approx(1.1832159566199232, rel=1e-14)


def test_sound_speed_consistency_with_pressure():
    p = ModelParams(a=0.7, gamma=1.6)
    rho = np.linspace(0.2, 5.0, 41)
    lhs = sound_speed(rho, p) ** 2
    rhs = p.gamma * pressure(rho, p) / rho
    assert np.max(np.abs(lhs - rhs) / rhs) <= 1e-13


def test_pressure_monotone():
    p = ModelParams(a=2.0, gamma=1.3)
    rho = np.linspace(0.05, 10.0, 200)
    assert np.all(np.diff(pressure(rho, p)) > 0)
    assert np.all(np.diff(sound_speed(rho, p)) > 0)


def test_symmetrize_value():
    p = ModelParams(a=1.0, gamma=2.0, rho_star=1.0)
    assert p.sigma_star == pytest.approx(1.4142135623730951, rel=1e-14)
    g = Grid1D(L=8.0, N=8)
    s = FlowState.create(0.0, np.full(8, 4.0), np.zeros(8), np.ones(8), np.zeros(8), g)
    sym = symmetrize(s, p)
    # frozen: 2*(sqrt(8) - sqrt(2))
    assert sym.v[0] == pytest.approx(2.8284271247461903, rel=1e-14)


def test_symmetrize_round_trip():
    rng = np.random.default_rng(20260819)
    p = ModelParams(a=1.3, gamma=1.4, rho_star=1.0, n_star=2.0)
    N = 16
    g = Grid1D(L=4.0, N=N)
    for _ in range(1000):
        rho = np.exp(rng.uniform(-1.5, 1.5, N))
        n = np.exp(rng.uniform(-1.5, 1.5, N))
        u = rng.uniform(-2, 2, N)
        w = rng.uniform(-2, 2, N)
        s = FlowState.create(0.0, rho, rho * u, n, n * w, g)
        back = desymmetrize(symmetrize(s, p), p)
        for a, b in ((s.rho, back.rho), (s.m, back.m), (s.n, back.n), (s.M, back.M)):
            denom = np.maximum(np.abs(a), 1e-30)
            assert np.max(np.abs(a - b) / denom) <= 1e-12


def test_gamma_one_rejected_by_symmetrize():
    p = ModelParams(a=1.0, gamma=1.0)
    g = Grid1D(L=8.0, N=8)
    s = FlowState.equilibrium(p, g)
    with pytest.raises(ValueError):
        symmetrize(s, p)
    # but gamma = 1 params themselves are legal (isothermal closure)
    assert p.sigma_star == pytest.approx(1.0)


def test_param_validation():
    with pytest.raises(ValueError):
        ModelParams(a=0.0)
    with pytest.raises(ValueError):
        ModelParams(gamma=0.9)
    with pytest.raises(ValueError):
        ModelParams(rho_star=-1.0)
    with pytest.raises(ValueError):
        ModelParams(n_star=0.0)


def test_grid_validation():
    g = Grid1D(L=10.0, N=16)
    assert g.dx == pytest.approx(0.625)
    assert g.x[0] == pytest.approx(0.3125)
    assert len(g.x) == 16
    with pytest.raises(ValueError):
        Grid1D(L=10.0, N=7)
    with pytest.raises(ValueError):
        Grid1D(L=10.0, N=6)
    with pytest.raises(ValueError):
        Grid1D(L=-1.0, N=16)


def test_positivity_enforced():
    g = Grid1D(L=8.0, N=8)
    rho = np.ones(8)
    rho[3] = -0.1
    with pytest.raises(PositivityError) as e:
        FlowState.create(1.5, rho, np.zeros(8), np.ones(8), np.zeros(8), g)
    assert e.value.field == "rho"
    assert e.value.index == 3
    assert e.value.t == 1.5


def test_positivity_catches_nan():
    g = Grid1D(L=8.0, N=8)
    n = np.ones(8)
    n[5] = np.nan
    with pytest.raises(PositivityError):
        FlowState.create(0.0, np.ones(8), np.zeros(8), n, np.zeros(8), g)


def test_velocity_properties():
    g = Grid1D(L=8.0, N=8)
    s = FlowState.create(0.0, np.full(8, 2.0), np.full(8, 1.0),
                         np.full(8, 4.0), np.full(8, -2.0), g)
    assert np.allclose(s.u, 0.5)
    assert np.allclose(s.omega, -0.5)
