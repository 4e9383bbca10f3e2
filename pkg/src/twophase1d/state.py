"""Model parameters, grid, and state containers for the two-phase 1D system.

The inviscid phase carries (rho, m = rho*u) with pressure a*rho^gamma; the
viscous phase carries (n, M = n*omega) with pressure n and viscosity
coefficient n. Both live on a periodic cell-centered grid over [0, L).
"""

from dataclasses import dataclass

import numpy as np


class PositivityError(RuntimeError):
    """A density field lost positivity; carries the offending snapshot."""

    def __init__(self, message, t=None, field=None, index=None, value=None):
        super().__init__(message)
        self.t = t
        self.field = field
        self.index = index
        self.value = value


@dataclass(frozen=True)
class ModelParams:
    """Physical constants. gamma = 1 is allowed here (isothermal pressure);
    only the symmetrizing change of variables refuses it."""

    a: float = 1.0
    gamma: float = 1.4
    rho_star: float = 1.0
    n_star: float = 1.0

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"a must be > 0, got {self.a}")
        if not self.gamma >= 1:
            raise ValueError(f"gamma must be >= 1, got {self.gamma}")
        if not self.rho_star > 0:
            raise ValueError(f"rho_star must be > 0, got {self.rho_star}")
        if not self.n_star > 0:
            raise ValueError(f"n_star must be > 0, got {self.n_star}")

    @property
    def sigma_star(self):
        """Background sound speed sqrt(p'(rho_star))."""
        return float(np.sqrt(self.a * self.gamma * self.rho_star ** (self.gamma - 1)))


@dataclass(frozen=True)
class Grid1D:
    L: float
    N: int

    def __post_init__(self):
        if not self.L > 0:
            raise ValueError(f"L must be > 0, got {self.L}")
        if self.N < 8 or self.N % 2 != 0:
            raise ValueError(f"N must be even and >= 8, got {self.N}")

    @property
    def dx(self):
        return self.L / self.N

    @property
    def x(self):
        """Cell centers (i + 1/2) * dx."""
        return (np.arange(self.N) + 0.5) * self.dx


def _as_field(name, arr, N):
    a = np.asarray(arr, dtype=float)
    if a.shape != (N,):
        raise ValueError(f"{name} must have shape ({N},), got {a.shape}")
    return a


@dataclass
class FlowState:
    """Conservative variables at one instant: (rho, m, n, M) on the grid."""

    t: float
    rho: np.ndarray
    m: np.ndarray
    n: np.ndarray
    M: np.ndarray

    @classmethod
    def create(cls, t, rho, m, n, M, grid=None):
        N = grid.N if grid is not None else len(rho)
        rho = _as_field("rho", rho, N)
        m = _as_field("m", m, N)
        n = _as_field("n", n, N)
        M = _as_field("M", M, N)
        check_positive(rho, "rho", t)
        check_positive(n, "n", t)
        return cls(float(t), rho, m, n, M)

    @classmethod
    def equilibrium(cls, params, grid, t=0.0):
        z = np.zeros(grid.N)
        return cls(float(t),
                   np.full(grid.N, params.rho_star), z.copy(),
                   np.full(grid.N, params.n_star), z.copy())

    @property
    def u(self):
        return self.m / self.rho

    @property
    def omega(self):
        return self.M / self.n

    def copy(self):
        return FlowState(self.t, self.rho.copy(), self.m.copy(),
                         self.n.copy(), self.M.copy())


def check_positive(field, name, t):
    # np.min is NaN-poisoning, so NaN blowups are caught here too
    lo = np.min(field)
    if not lo > 0:
        i = int(np.argmin(field)) if np.isfinite(lo) else int(np.argmax(~np.isfinite(field)))
        raise PositivityError(
            f"{name} lost positivity at t={t}: {name}[{i}] = {field[i]}",
            t=t, field=name, index=i, value=float(field[i]))


@dataclass
class SymmetrizedState:
    """Symmetrized variables (v, u, n, omega) with v = 2/(gamma-1)(sigma - sigma*)."""

    t: float
    v: np.ndarray
    u: np.ndarray
    n: np.ndarray
    omega: np.ndarray


def pressure(rho, params):
    """a * rho^gamma."""
    return params.a * rho ** params.gamma


def sound_speed(rho, params):
    """sigma(rho) = sqrt(p'(rho)) = sqrt(a gamma rho^(gamma-1))."""
    return np.sqrt(params.a * params.gamma * rho ** (params.gamma - 1))


def symmetrize(state, params):
    if params.gamma == 1:
        raise ValueError("symmetrize is singular at gamma = 1")
    v = 2.0 / (params.gamma - 1) * (sound_speed(state.rho, params) - params.sigma_star)
    return SymmetrizedState(state.t, v, state.m / state.rho,
                            state.n.copy(), state.M / state.n)


def desymmetrize(sym, params):
    if params.gamma == 1:
        raise ValueError("desymmetrize is singular at gamma = 1")
    sigma = params.sigma_star + 0.5 * (params.gamma - 1) * sym.v
    if np.any(sigma <= 0):
        raise ValueError("v out of range: reconstructed sound speed not positive")
    rho = (sigma ** 2 / (params.a * params.gamma)) ** (1.0 / (params.gamma - 1))
    return FlowState.create(sym.t, rho, rho * sym.u, sym.n, sym.n * sym.omega)
