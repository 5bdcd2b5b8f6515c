"""The generalized Gronwall comparison rho' = gamma Psi(rho).

Psi(x) = x(1 - log x) below 1 is only log-Lipschitz at 0, which is exactly
what makes uniqueness work: the envelope through rho0 collapses to zero as
rho0 -> 0, while any rho0 > 0 still grows at a controlled rate.
"""

import numpy as np

from rellandau import gronwall

# forward integration vs the closed-form inversion
problem = gronwall.GronwallProblem(rho0=1e-4, gamma=2.0, T=1.0, dt=1e-4)
ts, rho = gronwall.integrate(problem)
exact = gronwall.invert_bound(1e-4, 2.0 * ts[-1])
print(f"RK4 rho(1) = {rho[-1]:.8g}, closed form = {exact:.8g}")

# the uniqueness mechanism: envelopes collapse with the initial condition
print("\nrho0        envelope at t = 1 (gamma = 1)")
for k in range(2, 13, 2):
    rho0 = 10.0**-k
    print(f"1e-{k:02d}      {gronwall.invert_bound(rho0, 1.0):.6g}")

# zero initial condition stays identically zero
_, flat = gronwall.integrate(gronwall.GronwallProblem(0.0, 5.0, 1.0, 1e-3))
print("\nrho0 = 0 trajectory max:", np.max(flat))
