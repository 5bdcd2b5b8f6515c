"""Numerical form of the generalized Gronwall comparison rho' = gamma Psi(rho).

Two routes are provided: fixed-step RK4 forward integration, and inversion
of the closed-form integral bound via bisection.  The two agree for constant
gamma; near rho = 0 the closed form is the authoritative one (Psi is only
log-Lipschitz there).
"""

import math
from dataclasses import dataclass

import numpy as np

from rellandau.estimates import psi, psi_integral

__all__ = ["GronwallProblem", "integrate", "invert_bound"]


@dataclass
class GronwallProblem:
    """rho' = gamma(t) Psi(rho), rho(0) = rho0, on [0, T] with step dt.

    ``gamma`` is a piecewise-constant time series of nonnegative weights on
    equal subintervals of [0, T] (a single scalar is promoted).
    """

    rho0: float
    gamma: np.ndarray
    T: float
    dt: float

    def __post_init__(self):
        self.gamma = np.atleast_1d(np.asarray(self.gamma, dtype=float))
        if self.rho0 < 0:
            raise ValueError("rho0 must be nonnegative")
        if np.any(self.gamma < 0):
            raise ValueError("gamma must be nonnegative")
        if not (0 < self.dt <= self.T):
            raise ValueError("need 0 < dt <= T")

    def gamma_at(self, t):
        idx = min(int(t / self.T * len(self.gamma)), len(self.gamma) - 1)
        return self.gamma[idx]


def _dpsi(x):
    """Derivative of Psi away from the breakpoint (right value at 0, 1)."""
    if x >= 1.0:
        return 1.0
    if x <= 0.0:
        return 1.0
    return -math.log(x)


def integrate(problem):
    """Fixed-step RK4 trajectory of the comparison ODE.

    Returns arrays (t, rho).  Raises on a step size violating the stability
    guard dt * max(gamma) * Psi'(rho0 + 1) > 1.
    """
    g_max = float(problem.gamma.max())
    if problem.dt * g_max * _dpsi(problem.rho0 + 1.0) > 1.0:
        raise ValueError("dt too large for stable integration of rho' = gamma Psi(rho)")
    n_steps = int(round(problem.T / problem.dt))
    ts = np.linspace(0.0, n_steps * problem.dt, n_steps + 1)
    rho = np.empty(n_steps + 1)
    rho[0] = problem.rho0
    f = lambda t, y: problem.gamma_at(min(t, problem.T)) * psi(max(y, 0.0))
    h = problem.dt
    for i in range(n_steps):
        t, y = ts[i], rho[i]
        k1 = f(t, y)
        k2 = f(t + h / 2, y + h / 2 * k1)
        k3 = f(t + h / 2, y + h / 2 * k2)
        k4 = f(t + h, y + h * k3)
        rho[i + 1] = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return ts, rho


def invert_bound(rho0, gamma_integral):
    """Solve psi_integral(rho0, r) = gamma_integral for r by bisection.

    The closed form is strictly increasing in r, so the solution exists and
    is unique for rho0 > 0 and gamma_integral >= 0.
    """
    if rho0 <= 0:
        raise ValueError("invert_bound requires rho0 > 0")
    if gamma_integral < 0:
        raise ValueError("gamma_integral must be nonnegative")
    if gamma_integral == 0.0:
        return rho0
    lo, hi = rho0, max(2.0 * rho0, 1.0)
    while psi_integral(rho0, hi) < gamma_integral:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if psi_integral(rho0, mid) < gamma_integral:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-14 * hi:
            break
    # upper endpoint: psi_integral(rho0, hi) >= gamma_integral, so the
    # returned envelope never undershoots the exact solution
    return hi
