import math

import numpy as np
import pytest

from rellandau.gronwall import GronwallProblem, integrate, invert_bound


class TestProblemValidation:
    def test_negative_rho0(self):
        with pytest.raises(ValueError):
            GronwallProblem(-1.0, 1.0, 1.0, 1e-3)

    def test_negative_gamma(self):
        with pytest.raises(ValueError):
            GronwallProblem(0.1, [-1.0, 2.0], 1.0, 1e-3)

    def test_bad_step(self):
        with pytest.raises(ValueError):
            GronwallProblem(0.1, 1.0, 1.0, 2.0)

    def test_scalar_gamma_promoted(self):
        prob = GronwallProblem(0.1, 2.0, 1.0, 1e-3)
        assert prob.gamma.shape == (1,)
        assert prob.gamma_at(0.5) == 2.0

    def test_piecewise_gamma_lookup(self):
        prob = GronwallProblem(0.1, [1.0, 3.0], 1.0, 1e-3)
        assert prob.gamma_at(0.25) == 1.0
        assert prob.gamma_at(0.75) == 3.0
        assert prob.gamma_at(1.0) == 3.0


class TestIntegrate:
    def test_zero_initial_stays_zero(self):
        _, rho = integrate(GronwallProblem(0.0, 5.0, 1.0, 1e-3))
        assert np.all(rho == 0.0)

    def test_exponential_branch_oracle(self):
        # for rho >= 1, Psi(x) = x: exact solution rho0 e^{gamma t}
        ts, rho = integrate(GronwallProblem(2.0, 1.5, 1.0, 1e-4))
        np.testing.assert_allclose(rho, 2.0 * np.exp(1.5 * ts), rtol=1e-6)

    def test_matches_closed_form(self):
        for rho0 in (1e-8, 1e-3, 0.5, 2.0):
            gamma = 1.0
            ts, rho = integrate(GronwallProblem(rho0, gamma, 1.0, 1e-4))
            for k in (len(ts) // 2, len(ts) - 1):
                exact = invert_bound(rho0, gamma * ts[k])
                assert rho[k] == pytest.approx(exact, rel=1e-5)

    def test_monotone_increasing(self):
        _, rho = integrate(GronwallProblem(1e-4, 2.0, 1.0, 1e-3))
        assert np.all(np.diff(rho) >= 0)

    def test_stability_guard(self):
        with pytest.raises(ValueError):
            integrate(GronwallProblem(0.1, 1e6, 1.0, 0.5))


class TestInvertBound:
    def test_requires_positive_rho0(self):
        with pytest.raises(ValueError):
            invert_bound(0.0, 1.0)

    def test_zero_integral_is_identity(self):
        assert invert_bound(0.3, 0.0) == 0.3

    def test_exponential_oracle(self):
        # starting at 1 the bound is exactly e^t
        assert invert_bound(1.0, 2.0) == pytest.approx(math.exp(2.0), rel=1e-12)

    def test_log_branch_oracle(self):
        # psi_integral(e^-1, 1) = log 2
        assert invert_bound(math.exp(-1.0), math.log(2.0)) == pytest.approx(1.0, rel=1e-12)

    def test_vanishing_initial_condition(self):
        # the uniqueness mechanism: envelopes collapse as rho0 -> 0
        prev = math.inf
        for k in range(2, 13):
            val = invert_bound(10.0**-k, 1.0)
            assert val < prev
            prev = val
        assert prev < 1e-3

    def test_monotone_in_integral(self):
        vals = [invert_bound(1e-4, g) for g in (0.0, 0.5, 1.0, 2.0, 4.0)]
        assert all(a < b for a, b in zip(vals[:-1], vals[1:]))
