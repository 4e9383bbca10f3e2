"""Sweep the 4x4 symbol across frequency and print the branch structure.

Shows the three regimes: the heat-like branch -xi^2/2 and the damped
acoustic pair at low frequency, the crossover, and the uniform spectral
gap at high frequency where one branch tracks -xi^2 and the rest stay
order one.  Ends with the certified decay-region constants.
"""

import numpy as np

from twophase1d.spectral import branch_roles, decay_regions, eigen_branches

xis = np.geomspace(1e-3, 1e2, 26)
lam, degen = eigen_branches(xis)

print(f"{'xi':>10} {'diffusive':>22} {'acoustic (one of pair)':>26} "
      f"{'relaxed':>22}")
for xi in xis:
    r = branch_roles(xi)
    d, a, x = r["diffusive"], r["acoustic_plus"], r["relaxed"]
    print(f"{xi:10.3e} {d.real:12.4e}{d.imag:+9.2e}j "
          f"{a.real:13.4e}{a.imag:+10.3e}j {x.real:12.4e}{x.imag:+9.2e}j")

# low-frequency asymptotics against the expansion coefficients
print("\nsmall-xi checks (xi = 1e-3):")
r = branch_roles(1e-3)
print(f"  diffusive / xi^2      = {r['diffusive'].real / 1e-6:+.6f}  "
      f"(expect -0.5)")
print(f"  Re acoustic / xi^2    = {r['acoustic_plus'].real / 1e-6:+.6f}  "
      f"(expect -0.25)")
print(f"  Im acoustic / xi      = {r['acoustic_plus'].imag / 1e-3:+.6f}  "
      f"(expect +1, the sound speed)")
print(f"  relaxed               = {r['relaxed'].real:+.6f}  (expect -2)")

regions = decay_regions()
print(f"\ncertified decay regions:")
print(f"  Re lambda <= -{regions.beta1:.4f} xi^2   for xi <= {regions.r1:.3f}")
print(f"  Re lambda <= -{regions.beta2:.4f}        for xi >= {regions.r2:.3f}")
