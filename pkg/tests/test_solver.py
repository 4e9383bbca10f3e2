"""Solver checks: hand stencil oracle, CFL arithmetic, conservation,
positivity abort, grid convergence, and restartability."""

import numpy as np
import pytest

from twophase1d.state import (FlowState, Grid1D, ModelParams, PositivityError,
                              pressure, sound_speed)
from twophase1d import solver as sv


P = ModelParams()


def test_scheme_config_validation():
    sv.SchemeConfig(cfl=1.0, t_end=1.0)
    with pytest.raises(ValueError):
        sv.SchemeConfig(cfl=0.0, t_end=1.0)
    with pytest.raises(ValueError):
        sv.SchemeConfig(cfl=1.2, t_end=1.0)
    with pytest.raises(ValueError):
        sv.SchemeConfig(t_end=0.0)
    with pytest.raises(ValueError):
        sv.SchemeConfig(t_end=1.0, reconstruction="weno5")
    with pytest.raises(ValueError):
        sv.SchemeConfig(t_end=1.0, output_every=0)
    with pytest.raises(ValueError):
        sv.SchemeConfig(t_end=1.0, fixed_dt=-0.1)


def test_equilibrium_tendency_is_exactly_zero():
    g = Grid1D(20.0, 64)
    eq = FlowState.equilibrium(P, g)
    for recon in sv.RECONSTRUCTIONS:
        td = sv.rhs(eq, P, g, sv.SchemeConfig(reconstruction=recon, t_end=1.0))
        for arr in (td.drho, td.dm, td.dn, td.dM):
            assert np.all(arr == 0.0)


def test_equilibrium_is_a_fixed_point():
    g = Grid1D(20.0, 64)
    sc = sv.SchemeConfig(t_end=1.0)
    eq = FlowState.equilibrium(P, g)
    out = sv.step(eq, sv.cfl_dt(eq, P, g, sc), P, g, sc)
    assert np.array_equal(out.rho, eq.rho) and np.array_equal(out.m, eq.m)
    assert np.array_equal(out.n, eq.n) and np.array_equal(out.M, eq.M)
    assert out.t > 0


def test_constant_state_feels_only_drag():
    g = Grid1D(6.4, 64)
    U0 = 0.05
    N = g.N
    st = FlowState.create(0.0, np.full(N, P.rho_star),
                          np.full(N, P.rho_star * U0),
                          np.full(N, P.n_star), np.zeros(N))
    td = sv.rhs(st, P, g, sv.SchemeConfig(t_end=1.0))
    assert np.all(td.drho == 0.0) and np.all(td.dn == 0.0)
    assert np.allclose(td.dm, -P.rho_star * P.n_star * U0, rtol=1e-14)
    # the drag contributions are the same array with opposite signs
    assert np.all(td.dm + td.dM == 0.0)
    # one forward-Euler substep moves m by exactly -dt rho* n* U0
    dt = 1e-3
    assert np.allclose(st.m + dt * td.dm, P.rho_star * U0 - dt * 0.05,
                       rtol=1e-14)


def test_single_mode_pressure_stencil_oracle():
    # brute-force re-evaluation of the first-order flux stencil, scalar loops
    N, L, eps = 16, 8.0, 1e-3
    g = Grid1D(L, N)
    x = g.x
    rho = P.rho_star + eps * np.sin(2 * np.pi * x / L)
    st = FlowState.create(0.0, rho, np.zeros(N), np.full(N, P.n_star),
                          np.zeros(N))
    td = sv.rhs(st, P, g, sv.SchemeConfig(reconstruction="first-order",
                                          t_end=1.0))
    dx = g.dx
    Frho = np.zeros(N)
    Fm = np.zeros(N)
    for i in range(N):                       # face i+1/2
        j = (i + 1) % N
        rl, rr = rho[i], rho[j]
        ml, mr = 0.0, 0.0
        a = max(abs(ml / rl) + sound_speed(rl, P),
                abs(mr / rr) + sound_speed(rr, P))
        Frho[i] = 0.5 * (ml + mr) - 0.5 * a * (rr - rl)
        pl = ml * ml / rl + pressure(rl, P)
        pr = mr * mr / rr + pressure(rr, P)
        Fm[i] = 0.5 * (pl + pr) - 0.5 * a * (mr - ml)
    for i in range(N):
        assert td.drho[i] == pytest.approx(-(Frho[i] - Frho[i - 1]) / dx,
                                           rel=1e-13, abs=1e-15)
        assert td.dm[i] == pytest.approx(-(Fm[i] - Fm[i - 1]) / dx,
                                         rel=1e-13, abs=1e-15)
    # with m = 0 the momentum tendency is the centered pressure gradient
    pr = pressure(rho, P)
    grad = (np.roll(pr, -1) - np.roll(pr, 1)) / (2 * dx)
    assert np.allclose(td.dm, -grad, rtol=1e-12, atol=1e-16)
    assert np.all(td.dn == 0.0)


def test_cfl_dt_equilibrium_arithmetic():
    # dx = 0.1, cfl = 0.5, sigma* = 1: dt = 0.5 min(0.1, 0.01/2) = 0.0025
    p1 = ModelParams(a=1.0, gamma=1.0, rho_star=1.0, n_star=1.0)
    g = Grid1D(6.4, 64)
    eq = FlowState.equilibrium(p1, g)
    dt = sv.cfl_dt(eq, p1, g, sv.SchemeConfig(cfl=0.5, t_end=1.0))
    assert dt == pytest.approx(0.0025, rel=1e-12)


def test_cfl_dt_refinement_scaling():
    p1 = ModelParams(a=1.0, gamma=1.0, rho_star=1.0, n_star=1.0)
    sc = sv.SchemeConfig(cfl=0.5, t_end=1.0)
    coarse = sv.cfl_dt(FlowState.equilibrium(p1, Grid1D(6.4, 64)), p1,
                       Grid1D(6.4, 64), sc)
    fine = sv.cfl_dt(FlowState.equilibrium(p1, Grid1D(6.4, 128)), p1,
                     Grid1D(6.4, 128), sc)
    # the viscous bound rules here, so halving dx quarters dt
    assert fine == pytest.approx(coarse / 4, rel=1e-12)


def test_cfl_dt_hyperbolic_bound():
    # coarse grid, |u| + sigma = 2 everywhere: bound dx/2
    p1 = ModelParams(a=1.0, gamma=1.0, rho_star=1.0, n_star=1.0)
    g = Grid1D(128.0, 32)          # dx = 4: hyperbolic bound binds
    N = g.N
    st = FlowState.create(0.0, np.ones(N), np.ones(N), np.ones(N), np.zeros(N))
    dt = sv.cfl_dt(st, p1, g, sv.SchemeConfig(cfl=1.0, t_end=1.0))
    assert dt == pytest.approx(g.dx / 2, rel=1e-12)


def test_step_rejects_oversized_dt():
    g = Grid1D(20.0, 64)
    sc = sv.SchemeConfig(t_end=1.0)
    eq = FlowState.equilibrium(P, g)
    with pytest.raises(ValueError):
        sv.step(eq, 1.5 * sv.cfl_dt(eq, P, g, sc), P, g, sc)


def _smooth_state(g, amp=0.01):
    x = g.x
    w = np.sin(2 * np.pi * x / g.L)
    rho = P.rho_star + amp * w
    m = amp * np.cos(2 * np.pi * x / g.L)
    n = P.n_star - 0.5 * amp * w
    M = amp * np.sin(4 * np.pi * x / g.L)
    return FlowState.create(0.0, rho, m, n, M)


def test_conservation_over_a_run():
    g = Grid1D(20.0, 128)
    series, fin = sv.run(_smooth_state(g), P, g,
                         sv.SchemeConfig(t_end=10.0, output_every=25))
    mass0 = P.rho_star * g.L
    for col in ("mass_rho", "mass_n"):
        drift = np.max(np.abs(series.column(col) - series.column(col)[0]))
        assert drift <= 1e-12 * mass0
    mom = series.column("momentum")
    scale = np.sqrt(np.sum(_smooth_state(g).m ** 2) * g.dx) + 1.0
    assert np.max(np.abs(mom - mom[0])) <= 1e-12 * scale


def test_entropy_never_increases_on_smooth_runs():
    g = Grid1D(20.0, 128)
    series, _ = sv.run(_smooth_state(g), P, g,
                       sv.SchemeConfig(t_end=10.0, output_every=10))
    E = series.column("entropy")
    assert np.all(np.diff(E) <= 1e-12 * max(1.0, E[0]))
    assert np.all(series.column("dissipation") >= 0.0)


def test_positivity_abort_carries_diagnostics():
    # MUSCL at cfl = 1 has no positivity guarantee; this draw breaches it
    g = Grid1D(3.2, 32)
    rng = np.random.default_rng(63)
    n = 10.0 ** rng.uniform(-4, 0, 32)
    omega = rng.uniform(-8, 8, 32)
    rho = 10.0 ** rng.uniform(-2, 0.5, 32)
    u = rng.uniform(-4, 4, 32)
    st = FlowState.create(0.0, rho, rho * u, n, n * omega)
    sc = sv.SchemeConfig(cfl=1.0, reconstruction="muscl-minmod", t_end=0.3)
    with pytest.raises(PositivityError) as exc:
        sv.run(st, P, g, sc)
    err = exc.value
    assert err.field == "rho"
    assert err.t > 0 and err.index is not None
    assert not err.value > 0      # negative or NaN


def _coarsen(arr):
    return 0.5 * (arr[0::2] + arr[1::2])


def _refinement_ratio(recon):
    L, t_end = 10.0, 0.5
    Ns = [64, 128, 256]
    dt = 0.9 * (L / Ns[-1]) ** 2 / 4    # stable on the finest grid
    sols = {}
    for N in Ns:
        g = Grid1D(L, N)
        x = g.x
        w = 0.05 * np.sin(2 * np.pi * x / L) + 0.02 * np.cos(4 * np.pi * x / L)
        st = FlowState.create(0.0, P.rho_star + w,
                              0.03 * np.sin(2 * np.pi * x / L + 0.7),
                              P.n_star - 0.04 * np.cos(2 * np.pi * x / L),
                              0.02 * np.sin(4 * np.pi * x / L))
        sc = sv.SchemeConfig(reconstruction=recon, t_end=t_end, fixed_dt=dt,
                             output_every=10 ** 9)
        _, sols[N] = sv.run(st, P, g, sc)
    errs = []
    for N in Ns[:-1]:
        e = 0.0
        for f in ("rho", "m", "n", "M"):
            d = getattr(sols[N], f) - _coarsen(getattr(sols[2 * N], f))
            e += np.sum(d * d) * (L / N)
        errs.append(np.sqrt(e))
    return errs[0] / errs[1]


def test_grid_convergence_first_order():
    assert _refinement_ratio("first-order") >= 1.8


def test_grid_convergence_muscl():
    assert _refinement_ratio("muscl-minmod") >= 3.0


def test_restart_matches_single_run_bitwise():
    g = Grid1D(10.0, 64)
    dt = 1.0 / 256.0               # dyadic: restart times align exactly
    half = sv.SchemeConfig(t_end=0.5, fixed_dt=dt, output_every=32)
    full = sv.SchemeConfig(t_end=1.0, fixed_dt=dt, output_every=32)
    _, mid = sv.run(_smooth_state(g), P, g, half)
    _, restarted = sv.run(mid, P, g, full)
    _, direct = sv.run(_smooth_state(g), P, g, full)
    assert restarted.t == direct.t
    for f in ("rho", "m", "n", "M"):
        assert np.array_equal(getattr(restarted, f), getattr(direct, f))


def test_zero_perturbation_series_is_identically_zero():
    g = Grid1D(10.0, 64)
    sc = sv.SchemeConfig(t_end=100 * 0.9 * (10 / 64) ** 2 / 2,
                         fixed_dt=0.9 * (10 / 64) ** 2 / 2, output_every=10)
    series, _ = sv.run(FlowState.equilibrium(P, g), P, g, sc)
    assert len(series) >= 10
    from twophase1d.diagnostics import NORM_FIELDS
    for name in NORM_FIELDS:
        if name == "t":
            continue
        assert np.all(series.column(name) == 0.0), name


def test_run_records_cadence_and_final_state():
    g = Grid1D(10.0, 32)
    sc = sv.SchemeConfig(t_end=0.23, fixed_dt=0.01, output_every=7)
    series, fin = sv.run(_smooth_state(g), P, g, sc)
    # 23 steps: initial record, steps 7/14/21, and the off-cadence final
    assert len(series) == 5
    assert series.t[0] == 0.0
    assert series.t[-1] == fin.t
    assert fin.t == pytest.approx(0.23, abs=1e-12)
