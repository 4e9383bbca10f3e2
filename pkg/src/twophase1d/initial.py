"""Initial-data families for decay experiments.

All families perturb the constant background (rho*, 0, n*, 0) in primitive
variables (rho, u, n, omega) and convert to conserved ones at the end.
Amplitude epsilon = 0 reproduces the equilibrium exactly.
"""

import numpy as np

from .config import ConfigError, InitialSpec, COMPONENTS
from .diagnostics import derivative_k, norm_l2
from .state import FlowState, Grid1D, ModelParams


def gaussian_shape(x, center, width):
    return np.exp(-((x - center) / width) ** 2)


def compact_bump_shape(x, center, width):
    """exp(-1/(1 - s^2)) for |s| < 1, exactly zero outside the support."""
    s = (x - center) / width
    out = np.zeros_like(x)
    inside = np.abs(s) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - s[inside] ** 2))
    return out


def _random_band_limited(grid, seed):
    """Four independent fields on Fourier modes 1..N/8, unit-free amplitudes."""
    rng = np.random.default_rng(seed)
    kmax = max(1, grid.N // 8)
    x = grid.x
    fields = []
    for _ in range(4):
        a = rng.standard_normal(kmax)
        b = rng.standard_normal(kmax)
        f = np.zeros_like(x)
        for k in range(1, kmax + 1):
            ph = 2 * np.pi * k * x / grid.L
            f += a[k - 1] * np.cos(ph) + b[k - 1] * np.sin(ph)
        fields.append(f)
    return fields


def _h1_norm(fields, grid):
    total = 0.0
    for f in fields:
        total += norm_l2(f, grid) ** 2 + norm_l2(derivative_k(f, grid), grid) ** 2
    return np.sqrt(total)


def make_initial_data(spec: InitialSpec, grid: Grid1D,
                      params: ModelParams) -> FlowState:
    x = grid.x
    center = grid.L / 2
    eps = spec.epsilon
    mask = [c in spec.components for c in COMPONENTS]

    if spec.family == "gaussian":
        g = gaussian_shape(x, center, spec.width)
        pert = [eps * g if on else np.zeros_like(x) for on in mask]
    elif spec.family == "compact-bump":
        g = compact_bump_shape(x, center, spec.width)
        pert = [eps * g if on else np.zeros_like(x) for on in mask]
    elif spec.family == "random-band-limited":
        fields = _random_band_limited(grid, spec.seed)
        pert = [f if on else np.zeros_like(x)
                for f, on in zip(fields, mask)]
        h1 = _h1_norm(pert, grid)
        scale = eps / h1 if h1 > 0 else 0.0   # epsilon is the H1 norm here
        pert = [scale * f for f in pert]
    elif spec.family == "difference-mode":
        # velocities only, equal and opposite: the drag-cancelling structure
        g = gaussian_shape(x, center, spec.width)
        pert = [np.zeros_like(x), eps * g, np.zeros_like(x), -eps * g]
    else:
        raise ConfigError(f"unknown initial-data family {spec.family!r}")

    drho, u, dn, omega = pert
    rho = params.rho_star + drho
    n = params.n_star + dn

    floor = 0.5 * min(params.rho_star, params.n_star)
    if np.min(rho) < floor or np.min(n) < floor:
        raise ConfigError(
            f"initial data positivity pre-check failed: min rho "
            f"{np.min(rho):.3g}, min n {np.min(n):.3g}, required >= {floor:.3g}"
            f" (reduce epsilon)")

    return FlowState.create(0.0, rho, rho * u, n, n * omega)
