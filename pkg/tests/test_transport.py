import itertools
import math

import numpy as np
import pytest
from scipy import integrate, special

from rellandau import transport
from rellandau.transport import (
    W2_SIZE_CAP,
    Ensemble,
    juttner_mass,
    juttner_mean_energy,
    moments,
    optimal_coupling,
    sample_juttner,
    w2_exact,
)


def rng(seed=11):
    return np.random.Generator(np.random.Philox(seed))


class TestEnsemble:
    def test_shape_validation(self):
        with pytest.raises(ValueError):
            Ensemble(np.zeros((0, 3)))
        with pytest.raises(ValueError):
            Ensemble(np.zeros((4, 2)))

    def test_len(self):
        assert len(Ensemble(np.zeros((7, 3)))) == 7

    def test_subsample(self):
        e = Ensemble(rng().normal(size=(100, 3)))
        sub = e.subsample(10, rng())
        assert len(sub) == 10

    def test_csv_roundtrip(self, tmp_path):
        e = Ensemble(rng().normal(size=(20, 3)))
        path = tmp_path / "ens.csv"
        e.to_csv(path)
        header = path.read_text().splitlines()[0]
        assert header == "px,py,pz"
        back = Ensemble.from_csv(path)
        np.testing.assert_allclose(back.momenta, e.momenta, rtol=1e-12)

    def test_rlen_roundtrip(self, tmp_path):
        e = Ensemble(rng().normal(size=(33, 3)))
        path = tmp_path / "ens.rlen"
        e.to_rlen(path)
        raw = path.read_bytes()
        assert raw[:4] == b"RLEN"
        assert len(raw) == 4 + 4 + 33 * 24
        back = Ensemble.from_rlen(path)
        np.testing.assert_array_equal(back.momenta, e.momenta)

    def test_rlen_bad_magic(self, tmp_path):
        path = tmp_path / "bad.rlen"
        path.write_bytes(b"NOPE" + b"\x00" * 16)
        with pytest.raises(ValueError):
            Ensemble.from_rlen(path)


class TestJuttner:
    def test_mass_is_bessel_k2(self):
        assert juttner_mass() == pytest.approx(special.kv(2, 1.0), rel=1e-10)

    def test_mean_energy_oracle(self):
        # <p0> = 3 + K1(1)/K2(1)
        expected = 3.0 + special.kv(1, 1.0) / special.kv(2, 1.0)
        assert juttner_mean_energy() == pytest.approx(expected, rel=1e-10)

    def test_sampler_requires_positive_n(self):
        with pytest.raises(ValueError):
            sample_juttner(0, rng())

    def test_sampler_radial_distribution(self):
        # KS test of |p| against the exact radial CDF
        n = 20000
        r = np.linalg.norm(sample_juttner(n, rng()).momenta, axis=1)
        norm = juttner_mass()

        def cdf(x):
            val, _ = integrate.quad(
                lambda s: s * s * np.exp(-np.sqrt(1 + s * s)) / norm, 0.0, x
            )
            return val

        r.sort()
        grid = np.quantile(r, np.linspace(0.02, 0.98, 25))
        emp = np.searchsorted(r, grid, side="right") / n
        theo = np.array([cdf(x) for x in grid])
        ks = np.abs(emp - theo).max()
        assert ks < 1.63 / math.sqrt(n)

    def test_sampler_isotropic(self):
        p = sample_juttner(20000, rng()).momenta
        mean_dir = (p / np.linalg.norm(p, axis=1, keepdims=True)).mean(axis=0)
        assert np.linalg.norm(mean_dir) < 0.02

    def test_sampler_mean_energy(self):
        n = 40000
        e = np.sqrt(1 + np.sum(sample_juttner(n, rng()).momenta ** 2, axis=1))
        se = e.std() / math.sqrt(n)
        assert abs(e.mean() - juttner_mean_energy()) < 4 * se

    def test_deterministic(self):
        a = sample_juttner(100, rng(5)).momenta
        b = sample_juttner(100, rng(5)).momenta
        np.testing.assert_array_equal(a, b)


class TestMoments:
    def test_oracle(self):
        e = Ensemble(np.array([[1.0, 0, 0], [0.0, 0, 0]]))
        s = moments(e, ks=(2.0,))
        np.testing.assert_allclose(s.mean_momentum, [0.5, 0, 0])
        assert s.mean_energy == pytest.approx((math.sqrt(2) + 1) / 2)
        assert s.weighted_moments[2.0] == pytest.approx((4.0 + 1.0) / 2)


class TestW2:
    @staticmethod
    def brute_force(e1, e2):
        best = math.inf
        n = len(e1)
        for perm in itertools.permutations(range(n)):
            c = np.sum((e1.momenta - e2.momenta[list(perm)]) ** 2) / n
            best = min(best, c)
        return math.sqrt(best)

    def test_matches_brute_force(self):
        g = rng(3)
        for _ in range(100):
            n = int(g.integers(1, 7))
            e1 = Ensemble(g.normal(size=(n, 3)))
            e2 = Ensemble(g.normal(size=(n, 3)))
            d, _ = w2_exact(e1, e2)
            assert d == pytest.approx(self.brute_force(e1, e2), abs=1e-12)

    def test_identity_of_indiscernibles(self):
        e = Ensemble(rng().normal(size=(30, 3)))
        d, _ = w2_exact(e, Ensemble(e.momenta.copy()))
        assert d == 0.0

    def test_symmetry(self):
        g = rng(4)
        e1 = Ensemble(g.normal(size=(25, 3)))
        e2 = Ensemble(g.normal(size=(25, 3)))
        d12, _ = w2_exact(e1, e2)
        d21, _ = w2_exact(e2, e1)
        assert d12 == pytest.approx(d21, abs=1e-9)

    def test_triangle_inequality(self):
        g = rng(5)
        for _ in range(20):
            es = [Ensemble(g.normal(size=(15, 3))) for _ in range(3)]
            d01, _ = w2_exact(es[0], es[1])
            d12, _ = w2_exact(es[1], es[2])
            d02, _ = w2_exact(es[0], es[2])
            assert d02 <= d01 + d12 + 1e-9

    def test_translation_oracle(self):
        e = Ensemble(rng().normal(size=(40, 3)))
        shifted = Ensemble(e.momenta + np.array([0.7, 0, 0]))
        d, plan = w2_exact(e, shifted)
        assert d == pytest.approx(0.7, rel=1e-9)
        np.testing.assert_array_equal(plan.permutation, np.arange(40))

    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            optimal_coupling(Ensemble(np.zeros((3, 3))), Ensemble(np.zeros((4, 3))))

    def test_size_cap(self):
        big = Ensemble(np.zeros((W2_SIZE_CAP + 1, 3)))
        with pytest.raises(ValueError):
            optimal_coupling(big, big)

    def test_plan_is_permutation(self):
        g = rng(6)
        e1 = Ensemble(g.normal(size=(50, 3)))
        e2 = Ensemble(g.normal(size=(50, 3)))
        _, plan = w2_exact(e1, e2)
        assert sorted(plan.permutation) == list(range(50))
