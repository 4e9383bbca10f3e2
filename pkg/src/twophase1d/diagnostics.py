"""Norms, spectral derivatives, and entropy bookkeeping.

Everything here is measured against the constant background (rho*, 0, n*, 0):
the perturbation vector is (rho - rho*, u, n - n*, omega). Derivatives are
spectral (FFT) since the domain is periodic; norms carry the dx weight.
"""

from dataclasses import dataclass, fields

import numpy as np

from .state import pressure  # noqa: F401  (re-exported for callers doing EOS checks)


def _sum(a):
    # single fixed-order reduction point; keeps output reproducible run-to-run
    return float(np.add.reduce(np.asarray(a, dtype=float), axis=None))


def derivative_k(f, grid, k=1):
    """k-th spectral derivative of a periodic field (k >= 1).

    The Nyquist mode is zeroed for odd k, where it has no faithful
    derivative representation on a real grid.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    fh = np.fft.rfft(f)
    kappa = 2.0 * np.pi * np.fft.rfftfreq(grid.N, grid.dx)
    mult = (1j * kappa) ** k
    if k % 2 == 1:
        mult[-1] = 0.0
    return np.fft.irfft(fh * mult, n=grid.N)


def norm_l1(f, grid):
    return _sum(np.abs(f)) * grid.dx


def norm_l2(f, grid):
    return np.sqrt(_sum(f * f) * grid.dx)


def norm_linf(f):
    return float(np.max(np.abs(f)))


def perturbation(state, params):
    """(rho - rho*, u, n - n*, omega) as a list of fields."""
    return [state.rho - params.rho_star, state.u,
            state.n - params.n_star, state.omega]


def _vec_l2(comps, grid):
    return np.sqrt(sum(norm_l2(c, grid) ** 2 for c in comps))


def entropy_Q1(rho, params):
    """Relative pressure potential of the inviscid phase.

    Nonnegative, vanishing to second order at rho*, with Q1'' = p'(rho)/rho.
    """
    g, a, rs = params.gamma, params.a, params.rho_star
    if g == 1:
        return a * (rho * np.log(rho / rs) - (rho - rs))
    return a / (g - 1) * (rho ** g - rs ** g - g * rs ** (g - 1) * (rho - rs))


def entropy_Q2(n, params):
    """Relative pressure potential of the viscous phase (pressure = n)."""
    ns = params.n_star
    return n * np.log(n) - ns * np.log(ns) - (1 + np.log(ns)) * (n - ns)


def entropy(state, params, grid):
    """E(t) = sum over cells of rho u^2/2 + Q1 + n omega^2/2 + Q2, times dx."""
    u, w = state.u, state.omega
    dens = (0.5 * state.rho * u * u + entropy_Q1(state.rho, params)
            + 0.5 * state.n * w * w + entropy_Q2(state.n, params))
    return _sum(dens) * grid.dx


def dissipation(state, params, grid):
    """D(t) = sum of n omega_x^2 + rho n (u - omega)^2, times dx."""
    w = state.omega
    wx = derivative_k(w, grid, 1)
    du = state.u - w
    return _sum(state.n * wx * wx + state.rho * state.n * du * du) * grid.dx


def bd_effective_velocity(state, grid):
    """omega + (log n)_x, the quantity whose L2 norm controls n_x."""
    return state.omega + derivative_k(np.log(state.n), grid, 1)


@dataclass
class NormVector:
    """One diagnostic record. Field order fixes the CSV column order."""

    t: float
    l1: float          # L1 of the 4-component perturbation (sum of components)
    l2: float          # L2, components combined in quadrature
    linf: float        # max over components of the sup norm
    dx1_l2: float      # L2 of first derivative of the perturbation
    dx2_l2: float      # L2 of second derivative
    udiff_l2: float    # L2 of u - omega
    udiff_dx1_l2: float
    entropy: float
    dissipation: float
    mass_rho: float    # sum (rho - rho*) dx; drift measures conservation
    mass_n: float      # sum (n - n*) dx
    momentum: float    # sum (m + M) dx
    bd_l2: float       # L2 of omega + (log n)_x

    @classmethod
    def measure(cls, state, params, grid):
        pert = perturbation(state, params)
        d1 = [derivative_k(c, grid, 1) for c in pert]
        d2 = [derivative_k(c, grid, 2) for c in pert]
        du = state.u - state.omega
        return cls(
            t=state.t,
            l1=sum(norm_l1(c, grid) for c in pert),
            l2=_vec_l2(pert, grid),
            linf=max(norm_linf(c) for c in pert),
            dx1_l2=_vec_l2(d1, grid),
            dx2_l2=_vec_l2(d2, grid),
            udiff_l2=norm_l2(du, grid),
            udiff_dx1_l2=norm_l2(derivative_k(du, grid, 1), grid),
            entropy=entropy(state, params, grid),
            dissipation=dissipation(state, params, grid),
            mass_rho=_sum(state.rho - params.rho_star) * grid.dx,
            mass_n=_sum(state.n - params.n_star) * grid.dx,
            momentum=_sum(state.m + state.M) * grid.dx,
            bd_l2=norm_l2(bd_effective_velocity(state, grid), grid),
        )


NORM_FIELDS = [f.name for f in fields(NormVector)]


class NormSeries:
    """Append-only sequence of NormVector records with CSV round-trip."""

    def __init__(self, records=None):
        self.records = list(records) if records else []

    def append(self, rec):
        self.records.append(rec)

    def __len__(self):
        return len(self.records)

    def column(self, name):
        return np.array([getattr(r, name) for r in self.records])

    @property
    def t(self):
        return self.column("t")

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write(",".join(NORM_FIELDS) + "\n")
            for r in self.records:
                fh.write(",".join(f"{getattr(r, name):.17g}" for name in NORM_FIELDS) + "\n")

    @classmethod
    def from_csv(cls, path):
        with open(path) as fh:
            header = fh.readline().strip().split(",")
            if header != NORM_FIELDS:
                raise ValueError(f"unexpected columns in {path}: {header}")
            recs = []
            for line in fh:
                if not line.strip():
                    continue
                vals = [float(tok) for tok in line.split(",")]
                recs.append(NormVector(*vals))
        return cls(recs)


def entropy_balance(series):
    """Residual r(t_k) = E(t_k) + trapz(D, [0, t_k]) - E(0) from a NormSeries.

    Trapezoid runs at the recording cadence, so the cadence sets part of the
    error budget alongside the scheme's own O(dx^2, dt^2) drift.
    """
    t = series.t
    E = series.column("entropy")
    D = series.column("dissipation")
    if len(t) < 2:
        return np.zeros(len(t))
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (D[1:] + D[:-1]) * np.diff(t))])
    return E + cum - E[0]


class WeightedSup:
    """Running sup of (1+t)^(1/2+m) * ||d^m perturbation||_L2^2."""

    def __init__(self, m):
        self.m = m
        self.value = 0.0   # the sup of the weighted squared norm
        self.t_at = None

    def update(self, t, norm_m):
        cand = (1.0 + t) ** (0.5 + self.m) * norm_m ** 2
        if cand > self.value:
            self.value = cand
            self.t_at = t
        return self.value


def weighted_sup_update(ws, t, norm_m):
    return ws.update(t, norm_m)


def weighted_sups_from_series(series, ms=(0, 1, 2)):
    """Replay a NormSeries through WeightedSup trackers; returns {m: tracker}."""
    col = {0: "l2", 1: "dx1_l2", 2: "dx2_l2"}
    out = {}
    for m in ms:
        ws = WeightedSup(m)
        for t, v in zip(series.t, series.column(col[m])):
            ws.update(t, v)
        out[m] = ws
    return out
